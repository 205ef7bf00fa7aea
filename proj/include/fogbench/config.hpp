#pragma once
// Experiment configuration: a structured text file of key = value entries
// grouped into [tables], e.g.
//
//   [experiment]
//   seed = 1234
//   out = "runs/demo"
//
//   [fog]
//   types = ["radiation", "advection"]
//   visibility_ranges = ["10-20", "20-30", "30-40", "50-60"]
//
// Precedence is flags > config > defaults; the CLI applies flag overrides
// after parsing.

#include "fogbench/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace fogbench::cfg {

/// Scalar or array-of-scalar config value.
struct Value {
    std::variant<bool, double, std::string, std::vector<Value>> data;

    bool is_array() const { return std::holds_alternative<std::vector<Value>>(data); }
};

/// Flat view of a parsed config file: "table.key" -> value.
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
    static ConfigFile load(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    double get_number(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_numbers(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    const std::map<std::string, Value>& entries() const { return entries_; }

private:
    std::map<std::string, Value> entries_;
    std::string origin_;

    [[noreturn]] void type_error(const std::string& key, const char* expected) const;
};

/// One fog grid entry; a range is represented by its midpoint when a single
/// attenuation coefficient is needed.
struct FogGridEntry {
    atmosphere::FogType type = atmosphere::FogType::radiation;
    double visibility_lo_m = 0.0;
    double visibility_hi_m = 0.0;

    double midpoint_m() const { return 0.5 * (visibility_lo_m + visibility_hi_m); }
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string out_dir;
    double step_m = 0.25;
    double bin_width_m = 1.0;
    double epsilon = atmosphere::kDefaultEpsilon;
    int frames_per_condition = 0; // 0 disables frame rendering

    std::vector<scene::Scenario> scenarios;
    std::vector<FogGridEntry> fog_grid;
    std::vector<scene::SensorModel> sensors;
    std::vector<scene::ReflectanceTarget> targets;
    scene::Illumination illumination;
    scene::SceneLayout layout = scene::SceneLayout::standard_targets_layout();

    void validate() const;
};

/// The experiment matrix used throughout: scenario 1, both fog types, the
/// four visibility ranges, both sensors, three targets. No frames.
ExperimentConfig default_experiment();

/// Build an ExperimentConfig from a parsed file (missing keys keep defaults).
/// Validation failures name the offending field path.
ExperimentConfig experiment_from_config(const ConfigFile& file);

ExperimentConfig load_experiment(const std::filesystem::path& path);

} // namespace fogbench::cfg
