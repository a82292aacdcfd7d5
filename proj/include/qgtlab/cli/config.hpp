#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qgtlab::cli {

enum class Format { Csv, Json, Svg };

/// Rates are stored in rad/us (converted once while parsing), angles in rad.
struct ModelConfig {
    std::string type = "diamond";  // diamond | bhz
    double omega0 = 0.0;           // diamond
    double hxy = 0.0, hz = 0.0, bg = 0.0;
    double M = 2.0;
    /// Degenerate level examined; defaults to the prepared level (diamond) or 0 (bhz).
    std::size_t level = 0;
};

struct GridConfig {
    std::vector<double> theta, phi;  // diamond
    std::vector<double> kx, ky;      // bhz
};

struct DriveConfig {
    std::string mu = "theta";
    std::string nu;  // empty: single-parameter drive
    std::vector<double> A;
    std::vector<double> Delta;
    std::vector<int> blocks{1, 2};
    std::size_t samples = 512;
    double duration = 0.0;  // us, <= 0: automatic
    double stepFraction = 0.01;
};

struct NoiseConfig {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

struct ChernConfig {
    std::string source = "analytic";  // analytic | driven | lattice
    std::size_t nTheta = 101;
    std::size_t nPhi = 4;
    std::vector<std::size_t> nGrid{64};
    double z2Bound = 0.05;
};

struct CircuitConfig {
    std::string pair = "12";
    double J = 0.0;
    std::vector<double> ampOverFreq;
    double tonePhase = 0.0;
    bool resonanceSearch = true;
    double emergenceAmpOverFreq = 1.8;
    std::vector<double> emergenceDelta;  // rad/us; empty: no emergence table
    std::vector<double> emergencePhi;
};

struct RunConfig {
    ModelConfig model;
    GridConfig grid;
    DriveConfig drive;
    NoiseConfig noise;
    ChernConfig chern;
    CircuitConfig circuit;
    std::vector<Format> formats{Format::Csv, Format::Json, Format::Svg};
    /// Parsed configuration in input units (MHz, us, multiples of pi), keyed
    /// as in the file; copied verbatim into output metadata.
    nlohmann::json echo = nlohmann::json::object();
};

/// Parses the configuration text. Throws ConfigInvalid (with line numbers
/// where available) on syntax errors, unknown sections or keys, wrong types,
/// out-of-range values or nesting deeper than one level.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// "csv,json,svg" -> formats; throws ConfigInvalid on unknown or empty entries.
std::vector<Format> parse_formats(const std::string& list);

}  // namespace qgtlab::cli
