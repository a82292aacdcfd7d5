#include "qgtlab/cli/output.hpp"

#include "qgtlab/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace qgtlab::cli {

ConventionBlock conventions() {
    return {
        {"units", "frequencies in MHz (ordinary, f = omega / 2 pi), times in us, angles in rad"},
        {"basis", "diamond kets |q1 q2 q3 q4> ordered |0001>,|0010>,|0100>,|1000>; block 1 = {|0001>,|0010>}, "
                  "block 2 = {|0100>,|1000>}; BHZ block 1 = rows {1,3}, block 2 = rows {2,4}"},
        {"level", "diamond geometry on the +Omega0 degenerate level (j = 1 in block 1, j = 2 in block 2)"},
        {"tensor", "Q_ij = <d_mu i|(1 - P)|d_nu j>, g = (Q + Q^dagger)/2, F = i (Q - Q^dagger)"},
        {"delta_sign", "Delta = (E_gap - omega)/2; positive Delta drives below the gap; Omega = sqrt(A^2 Q + Delta^2)"},
        {"dphi_sign", "dphi = phi_nu - phi_mu; S(dphi) = Q_mumu + Q_nunu + 2 Re(e^{-i dphi} Q_munu)"},
        {"orientation", "sphere chart: C = (1/2pi) int (-F^{theta phi}) dtheta dphi so block 1 gives C+ = +1; "
                        "torus chart: C = (1/2pi) int F^{kx ky} dkx dky"},
    };
}

nlohmann::json conventions_json() {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : conventions()) j[k] = v;
    return j;
}

std::string format_number(double v) {
    if (!std::isfinite(v)) return "";
    if (v == 0.0) return "0";
    return fmt::format("{}", v);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw std::invalid_argument("CSV header is empty");
}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("CSV row width does not match the header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::render() const {
    std::string out;
    for (const auto& [k, v] : conventions()) out += "# " + k + ": " + v + "\n";
    auto line = [&out](const auto& cells, auto&& fmtCell) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += fmtCell(cells[i]);
        }
        out += '\n';
    };
    line(header_, [](const std::string& s) { return csv_escape(s); });
    for (const auto& r : rows_) {
        line(r, [](const Cell& c) -> std::string {
            if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
            if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
            if (std::holds_alternative<std::string>(c)) return csv_escape(std::get<std::string>(c));
            return "";
        });
    }
    return out;
}

std::string render_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigInvalid("cannot create output directory '" + dir.string() + "': " + ec.message());
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigInvalid("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw ConfigInvalid("failed writing '" + path.string() + "'");
}

}  // namespace qgtlab::cli
