#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "physmimo/channel.hpp"
#include "physmimo/rmt.hpp"
#include "physmimo/sim.hpp"

namespace physmimo {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { support, eigen, saturation, ber, ber_distinct, ber_short };
std::string to_string(ExperimentKind k);
ExperimentKind kind_from_string(const std::string& s);

struct ExperimentConfig {
    std::string preset;            // empty when built from explicit keys
    std::string scale = "desk";    // desk | paper
    ExperimentKind kind = ExperimentKind::eigen;
    SystemParams params;
    BerSweep sweep;
    SupportGrid grid;
    std::string support_mode = "double"; // onesided | double | distinct
    std::vector<int> m_values;     // antenna battery / physical M for saturation
    std::vector<int> p_values;     // AoA sweep, or P4 values for ber_distinct
    std::vector<int> n_values;     // block lengths for ber_short
    bool iid_reference = false;
    int trials = 20;
    long long bits = 100000;
    int bins = 100;
    std::uint64_t seed = 1;
    std::string out_dir = "results";

    bool operator==(const ExperimentConfig&) const = default;
};

// Named presets: fig1 .. fig9, intro-saturation, intro-ratio.
std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name, const std::string& scale = "desk");

// Unknown keys, wrong types and inconsistent dimensions throw ConfigError
// naming the key path. Power keys accept a _db suffix (10^(x/10)).
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_file(const std::filesystem::path& path);
SystemParams parse_params(const nlohmann::json& j, const std::string& path = "params",
                          const SystemParams& base = {});
nlohmann::json to_json(const ExperimentConfig& c);
nlohmann::json to_json(const SystemParams& p);

// Sets a dotted key (e.g. "params.M") from a JSON literal or bare string.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Full validation; returns soft warnings.
std::vector<std::string> validate(const ExperimentConfig& c);

// FNV-1a over the canonical JSON dump, output directory excluded.
std::string config_hash(const ExperimentConfig& c);

struct ResultEnvelope {
    ExperimentConfig config;
    std::string version = kVersion;
    double wall_clock_s = 0.0;
    nlohmann::json payload;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

// Runs the experiment described by the config.
ResultEnvelope run_experiment(const ExperimentConfig& c);

// Writes result.json plus CSV plot data into dir; returns the files written.
// Partial outputs are removed if anything fails. Empty payloads are an error.
std::vector<std::filesystem::path> write_outputs(const ResultEnvelope& env, const std::filesystem::path& dir);

// CSV text for each plot-data file (name -> contents); no files touched.
std::vector<std::pair<std::string, std::string>> emit_plot_data(const ResultEnvelope& env);

} // namespace physmimo
