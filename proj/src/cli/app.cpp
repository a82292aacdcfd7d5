#include "qgtlab/cli/commands.hpp"
#include "qgtlab/errors.hpp"

#include <CLI11.hpp>

#include <functional>
#include <map>
#include <ostream>

namespace qgtlab::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"qgtlab: quantum geometric tensor laboratory"};
    app.require_subcommand(1, 1);
    std::string configPath, outDir, formats;
    std::uint64_t seed = 0;

    using Command = std::function<CommandResult(const RunConfig&, const std::filesystem::path&)>;
    const std::map<std::string, std::pair<std::string, Command>> commands{
        {"analytic", {"analytic QGT over a parameter grid", cmd_analytic}},
        {"drive", {"weak-drive Rabi extraction of the QGT", cmd_drive}},
        {"chern", {"Chern, spin Chern and Z2 invariants", cmd_chern}},
        {"circuit", {"four-transmon coupling-law calibration", cmd_circuit}},
    };
    std::map<std::string, CLI::App*> subs;
    std::map<std::string, CLI::Option*> seedOpts, formatOpts;
    for (const auto& [name, info] : commands) {
        CLI::App* s = app.add_subcommand(name, info.first);
        s->add_option("--config", configPath, "configuration file (YAML subset)")->required();
        s->add_option("--out", outDir, "output directory")->required();
        seedOpts[name] = s->add_option("--seed", seed, "noise seed (overrides noise.seed)");
        formatOpts[name] = s->add_option("--format", formats, "comma-separated subset of csv,json,svg");
        subs[name] = s;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    for (const auto& [name, sub] : subs) {
        if (!sub->parsed()) continue;
        try {
            RunConfig cfg = load_config(configPath);
            if (seedOpts[name]->count() > 0) cfg.noise.seed = seed;
            if (formatOpts[name]->count() > 0) cfg.formats = parse_formats(formats);
            const CommandResult r = commands.at(name).second(cfg, outDir);
            for (const auto& f : r.files) out << (std::filesystem::path(outDir) / f).string() << "\n";
            if (r.exitCode == kExitZ2Bound) err << "error: |C+ + C-| exceeds chern.z2_bound\n";
            return r.exitCode;
        } catch (const ConfigInvalid& e) {
            err << "error: " << e.what() << "\n";
            return kExitConfig;
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return kExitNumerical;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kExitNumerical;
        }
    }
    return kExitConfig;
}

}  // namespace qgtlab::cli
