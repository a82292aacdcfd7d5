#include "qgtlab/cli/config.hpp"

#include "qgtlab/errors.hpp"
#include "qgtlab/models.hpp"
#include "qgtlab/numkit/matrix.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace qgtlab::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail_at(const YAML::Node& n, const std::string& msg) {
    if (n.Mark().is_null()) throw ConfigInvalid(msg);
    throw ConfigInvalid(fmt::format("line {}: {}", n.Mark().line + 1, msg));
}

struct Entry {
    const YAML::Node& node;
    std::string path;  // section.key
};

double to_double(const Entry& e, const YAML::Node& n) {
    if (!n.IsScalar()) fail_at(n, e.path + ": expected a number");
    double v = 0.0;
    try {
        v = n.as<double>();
    } catch (const YAML::Exception&) {
        fail_at(n, e.path + ": expected a number, got '" + n.Scalar() + "'");
    }
    if (!std::isfinite(v)) fail_at(n, e.path + ": value must be finite");
    return v;
}

double as_double(const Entry& e) { return to_double(e, e.node); }

std::vector<double> as_doubles(const Entry& e) {
    std::vector<double> out;
    if (e.node.IsScalar()) {
        out.push_back(to_double(e, e.node));
    } else if (e.node.IsSequence()) {
        for (const auto& item : e.node) out.push_back(to_double(e, item));
    } else {
        fail_at(e.node, e.path + ": expected a number or a list of numbers");
    }
    return out;
}

std::uint64_t as_u64(const Entry& e) {
    if (!e.node.IsScalar()) fail_at(e.node, e.path + ": expected a non-negative integer");
    const std::string& s = e.node.Scalar();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        fail_at(e.node, e.path + ": expected a non-negative integer, got '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        fail_at(e.node, e.path + ": integer out of range");
    }
}

std::size_t as_count(const Entry& e, std::size_t minimum) {
    const std::uint64_t v = as_u64(e);
    if (v < minimum) fail_at(e.node, fmt::format("{}: must be at least {}", e.path, minimum));
    if (v > 1000000) fail_at(e.node, e.path + ": value too large");
    return static_cast<std::size_t>(v);
}

std::vector<std::size_t> as_counts(const Entry& e, std::size_t minimum) {
    std::vector<std::size_t> out;
    if (e.node.IsSequence()) {
        for (const auto& item : e.node) out.push_back(as_count({item, e.path}, minimum));
    } else {
        out.push_back(as_count(e, minimum));
    }
    return out;
}

std::string as_string(const Entry& e, std::initializer_list<const char*> allowed) {
    if (!e.node.IsScalar()) fail_at(e.node, e.path + ": expected a string");
    const std::string s = e.node.Scalar();
    if (allowed.size() == 0) return s;
    std::string list;
    for (const char* a : allowed) {
        if (s == a) return s;
        list += (list.empty() ? "" : ", ") + std::string(a);
    }
    fail_at(e.node, fmt::format("{}: '{}' is not one of {}", e.path, s, list));
}

bool as_bool(const Entry& e) {
    if (!e.node.IsScalar()) fail_at(e.node, e.path + ": expected true or false");
    const std::string& s = e.node.Scalar();
    if (s == "true") return true;
    if (s == "false") return false;
    fail_at(e.node, e.path + ": expected true or false, got '" + s + "'");
}

std::vector<double> scaled(std::vector<double> v, double f) {
    for (double& x : v) x *= f;
    return v;
}

std::vector<double> pi_list(const Entry& e) { return scaled(as_doubles(e), kPi); }

// [start, stop, count] in units of pi, both ends included.
std::vector<double> pi_range(const Entry& e) {
    if (!e.node.IsSequence() || e.node.size() != 3) fail_at(e.node, e.path + ": expected [start, stop, count]");
    const double a = to_double(e, e.node[0]), b = to_double(e, e.node[1]);
    const std::size_t n = as_count({e.node[2], e.path}, 1);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = kPi * (n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

json echo_value(const YAML::Node& n) {
    if (n.IsSequence()) {
        json arr = json::array();
        for (const auto& item : n) arr.push_back(echo_value(item));
        return arr;
    }
    const std::string& s = n.Scalar();
    if (s == "true") return true;
    if (s == "false") return false;
    try {
        std::size_t pos = 0;
        const double d = std::stod(s, &pos);
        if (pos == s.size()) {
            if (s.find_first_not_of("0123456789") == std::string::npos) return std::stoull(s);
            return d;
        }
    } catch (const std::exception&) {
    }
    return s;
}

using Handler = std::function<void(RunConfig&, const Entry&)>;
using Section = std::map<std::string, Handler>;

std::map<std::string, Section> schema() {
    std::map<std::string, Section> s;
    s["model"] = {
        {"type", [](RunConfig& c, const Entry& e) { c.model.type = as_string(e, {"diamond", "bhz"}); }},
        {"omega0_mhz",
         [](RunConfig& c, const Entry& e) {
             const double v = as_double(e);
             if (v <= 0.0) fail_at(e.node, e.path + ": must be positive");
             c.model.omega0 = mhz_to_angular(v);
         }},
        {"hxy_mhz", [](RunConfig& c, const Entry& e) { c.model.hxy = mhz_to_angular(as_double(e)); }},
        {"hz_mhz", [](RunConfig& c, const Entry& e) { c.model.hz = mhz_to_angular(as_double(e)); }},
        {"m_mhz", [](RunConfig& c, const Entry& e) { c.model.M = mhz_to_angular(as_double(e)); }},
        {"bg_mhz", [](RunConfig& c, const Entry& e) { c.model.bg = mhz_to_angular(as_double(e)); }},
        {"level", [](RunConfig& c, const Entry& e) { c.model.level = as_count(e, 0); }},
    };
    s["grid"] = {
        {"theta_pi", [](RunConfig& c, const Entry& e) { c.grid.theta = pi_list(e); }},
        {"theta_range_pi", [](RunConfig& c, const Entry& e) { c.grid.theta = pi_range(e); }},
        {"phi_pi", [](RunConfig& c, const Entry& e) { c.grid.phi = pi_list(e); }},
        {"kx_pi", [](RunConfig& c, const Entry& e) { c.grid.kx = pi_list(e); }},
        {"ky_pi", [](RunConfig& c, const Entry& e) { c.grid.ky = pi_list(e); }},
    };
    s["drive"] = {
        {"mu", [](RunConfig& c, const Entry& e) { c.drive.mu = as_string(e, {}); }},
        {"nu", [](RunConfig& c, const Entry& e) { c.drive.nu = as_string(e, {}); }},
        {"a_mhz",
         [](RunConfig& c, const Entry& e) {
             c.drive.A = scaled(as_doubles(e), kTwoPi);
             for (double a : c.drive.A)
                 if (a <= 0.0) fail_at(e.node, e.path + ": amplitudes must be positive");
         }},
        {"delta_mhz", [](RunConfig& c, const Entry& e) { c.drive.Delta = scaled(as_doubles(e), kTwoPi); }},
        {"blocks",
         [](RunConfig& c, const Entry& e) {
             c.drive.blocks.clear();
             for (double b : as_doubles(e)) {
                 if (b != 1.0 && b != 2.0) fail_at(e.node, e.path + ": blocks are 1 or 2");
                 c.drive.blocks.push_back(static_cast<int>(b));
             }
         }},
        {"samples", [](RunConfig& c, const Entry& e) { c.drive.samples = as_count(e, 64); }},
        {"duration_us", [](RunConfig& c, const Entry& e) { c.drive.duration = as_double(e); }},
        {"step_fraction",
         [](RunConfig& c, const Entry& e) {
             c.drive.stepFraction = as_double(e);
             if (c.drive.stepFraction <= 0.0 || c.drive.stepFraction > 0.1)
                 fail_at(e.node, e.path + ": must lie in (0, 0.1]");
         }},
    };
    s["noise"] = {
        {"sigma",
         [](RunConfig& c, const Entry& e) {
             c.noise.sigma = as_double(e);
             if (c.noise.sigma < 0.0) fail_at(e.node, e.path + ": must be non-negative");
         }},
        {"seed", [](RunConfig& c, const Entry& e) { c.noise.seed = as_u64(e); }},
    };
    s["chern"] = {
        {"source",
         [](RunConfig& c, const Entry& e) { c.chern.source = as_string(e, {"analytic", "driven", "lattice"}); }},
        {"n_theta", [](RunConfig& c, const Entry& e) { c.chern.nTheta = as_count(e, 11); }},
        {"n_phi", [](RunConfig& c, const Entry& e) { c.chern.nPhi = as_count(e, 4); }},
        {"n_grid", [](RunConfig& c, const Entry& e) { c.chern.nGrid = as_counts(e, 4); }},
        {"z2_bound",
         [](RunConfig& c, const Entry& e) {
             c.chern.z2Bound = as_double(e);
             if (c.chern.z2Bound < 0.0) fail_at(e.node, e.path + ": must be non-negative");
         }},
    };
    s["circuit"] = {
        {"pair", [](RunConfig& c, const Entry& e) { c.circuit.pair = as_string(e, {"12", "23", "34", "41"}); }},
        {"j_mhz", [](RunConfig& c, const Entry& e) { c.circuit.J = mhz_to_angular(as_double(e)); }},
        {"amp_over_freq",
         [](RunConfig& c, const Entry& e) {
             c.circuit.ampOverFreq = as_doubles(e);
             for (double x : c.circuit.ampOverFreq)
                 if (x < 0.0) fail_at(e.node, e.path + ": must be non-negative");
         }},
        {"tone_phase_pi", [](RunConfig& c, const Entry& e) { c.circuit.tonePhase = kPi * as_double(e); }},
        {"resonance_search", [](RunConfig& c, const Entry& e) { c.circuit.resonanceSearch = as_bool(e); }},
        {"emergence_amp_over_freq",
         [](RunConfig& c, const Entry& e) {
             c.circuit.emergenceAmpOverFreq = as_double(e);
             if (c.circuit.emergenceAmpOverFreq <= 0.0) fail_at(e.node, e.path + ": must be positive");
         }},
        {"emergence_delta_mhz",
         [](RunConfig& c, const Entry& e) { c.circuit.emergenceDelta = scaled(as_doubles(e), kTwoPi); }},
        {"emergence_phi_pi", [](RunConfig& c, const Entry& e) { c.circuit.emergencePhi = pi_list(e); }},
    };
    s["output"] = {
        {"formats",
         [](RunConfig& c, const Entry& e) {
             std::string list;
             if (e.node.IsSequence()) {
                 for (const auto& item : e.node) {
                     if (!item.IsScalar()) fail_at(item, e.path + ": expected format names");
                     list += (list.empty() ? "" : ",") + item.Scalar();
                 }
             } else {
                 list = as_string(e, {});
             }
             try {
                 c.formats = parse_formats(list);
             } catch (const ConfigInvalid& err) {
                 fail_at(e.node, e.path + ": " + err.what());
             }
         }},
    };
    return s;
}

void apply_defaults(RunConfig& c, const json& echo) {
    auto has = [&](const char* sec, const char* key) { return echo.contains(sec) && echo[sec].contains(key); };
    if (!has("model", "omega0_mhz")) c.model.omega0 = mhz_to_angular(6.5);
    if (!has("model", "hxy_mhz")) c.model.hxy = mhz_to_angular(1.0);
    if (!has("model", "hz_mhz")) c.model.hz = mhz_to_angular(1.0);
    if (!has("model", "m_mhz")) c.model.M = mhz_to_angular(2.0);
    if (!has("model", "level")) c.model.level = c.model.type == "diamond" ? kDiamondPreparedLevel : 0;
    if (!has("grid", "phi_pi")) c.grid.phi = {0.0};
    if (!has("drive", "a_mhz")) c.drive.A = {mhz_to_angular(3.0)};
    if (!has("drive", "delta_mhz")) c.drive.Delta = {0.0};
    if (!has("circuit", "j_mhz")) c.circuit.J = mhz_to_angular(5.0);
    if (!has("circuit", "amp_over_freq")) c.circuit.ampOverFreq = {0.25, 0.5, 1.0, 1.5};
    if (has("circuit", "emergence_delta_mhz") && !has("circuit", "emergence_phi_pi")) c.circuit.emergencePhi = {0.0};
    if (has("grid", "theta_pi") && has("grid", "theta_range_pi"))
        throw ConfigInvalid("grid: give either theta_pi or theta_range_pi, not both");
}

}  // namespace

std::vector<Format> parse_formats(const std::string& list) {
    std::vector<Format> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        Format f;
        if (item == "csv") f = Format::Csv;
        else if (item == "json") f = Format::Json;
        else if (item == "svg") f = Format::Svg;
        else throw ConfigInvalid("unknown output format '" + item + "'");
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    }
    if (out.empty()) throw ConfigInvalid("no output format given");
    return out;
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigInvalid(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
    }
    if (root.IsNull()) throw ConfigInvalid("configuration is empty");
    if (!root.IsMap()) fail_at(root, "top level must be a mapping of sections");

    RunConfig c;
    const auto sch = schema();
    for (const auto& sec : root) {
        const std::string name = sec.first.as<std::string>();
        const auto it = sch.find(name);
        if (it == sch.end()) fail_at(sec.first, "unknown section '" + name + "'");
        if (!sec.second.IsMap()) fail_at(sec.second, "section '" + name + "' must be a mapping");
        json& echoSec = c.echo[name];
        echoSec = json::object();
        for (const auto& kv : sec.second) {
            const std::string key = kv.first.as<std::string>();
            const auto h = it->second.find(key);
            if (h == it->second.end()) fail_at(kv.first, "unknown key '" + name + "." + key + "'");
            if (echoSec.contains(key)) fail_at(kv.first, "duplicate key '" + name + "." + key + "'");
            if (kv.second.IsMap()) fail_at(kv.second, name + "." + key + ": nested mappings are not allowed");
            if (kv.second.IsSequence())
                for (const auto& item : kv.second)
                    if (!item.IsScalar()) fail_at(item, name + "." + key + ": list items must be scalars");
            if (kv.second.IsNull()) fail_at(kv.first, name + "." + key + ": missing value");
            h->second(c, {kv.second, name + "." + key});
            echoSec[key] = echo_value(kv.second);
        }
    }
    apply_defaults(c, c.echo);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigInvalid("cannot read configuration file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace qgtlab::cli
