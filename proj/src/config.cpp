#include "fogbench/config.hpp"

#include "fogbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fogbench::cfg {

namespace {

std::string strip(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void parse_error(const std::string& origin, int line_no, const std::string& what) {
    throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": " + what);
}

Value parse_scalar(const std::string& token, const std::string& origin, int line_no) {
    if (token.size() >= 2 && token.front() == '"' && token.back() == '"')
        return Value{token.substr(1, token.size() - 2)};
    if (token == "true") return Value{true};
    if (token == "false") return Value{false};
    try {
        std::size_t pos = 0;
        const double num = std::stod(token, &pos);
        if (pos == token.size()) return Value{num};
    } catch (const std::exception&) {
    }
    parse_error(origin, line_no, "cannot parse value '" + token + "'");
}

Value parse_value(const std::string& text, const std::string& origin, int line_no) {
    const std::string t = strip(text);
    if (t.empty()) parse_error(origin, line_no, "missing value");
    if (t.front() == '[') {
        if (t.back() != ']') parse_error(origin, line_no, "unterminated array");
        std::vector<Value> items;
        std::string inner = t.substr(1, t.size() - 2);
        std::string token;
        std::stringstream ss(inner);
        while (std::getline(ss, token, ',')) {
            const std::string item = strip(token);
            if (item.empty()) continue;
            items.push_back(parse_scalar(item, origin, line_no));
        }
        return Value{std::move(items)};
    }
    return parse_scalar(t, origin, line_no);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

} // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
    ConfigFile file;
    file.origin_ = origin;
    std::stringstream ss(text);
    std::string line;
    std::string table;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string body = strip(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') parse_error(origin, line_no, "unterminated table header");
            table = strip(body.substr(1, body.size() - 2));
            if (table.empty()) parse_error(origin, line_no, "empty table name");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            parse_error(origin, line_no, "expected 'key = value': '" + body + "'");
        const std::string key = strip(body.substr(0, eq));
        if (key.empty()) parse_error(origin, line_no, "empty key");
        const std::string full = table.empty() ? key : table + "." + key;
        if (file.entries_.count(full))
            parse_error(origin, line_no, "duplicate key '" + full + "'");
        file.entries_[full] = parse_value(body.substr(eq + 1), origin, line_no);
    }
    return file;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open config: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.string());
}

bool ConfigFile::has(const std::string& key) const { return entries_.count(key) > 0; }

void ConfigFile::type_error(const std::string& key, const char* expected) const {
    throw std::invalid_argument(origin_ + ": " + key + ": expected " + expected);
}

double ConfigFile::get_number(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (const double* num = std::get_if<double>(&it->second.data)) return *num;
    type_error(key, "a number");
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) const {
    const double num = get_number(key, static_cast<double>(fallback));
    const double rounded = std::round(num);
    if (rounded != num)
        throw std::invalid_argument(origin_ + ": " + key + ": expected an integer");
    return static_cast<std::int64_t>(rounded);
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (const bool* b = std::get_if<bool>(&it->second.data)) return *b;
    type_error(key, "a boolean");
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (const std::string* s = std::get_if<std::string>(&it->second.data)) return *s;
    type_error(key, "a string");
}

std::vector<double> ConfigFile::get_numbers(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return {};
    const auto* items = std::get_if<std::vector<Value>>(&it->second.data);
    if (!items) type_error(key, "an array of numbers");
    std::vector<double> out;
    for (const Value& v : *items) {
        const double* num = std::get_if<double>(&v.data);
        if (!num) type_error(key, "an array of numbers");
        out.push_back(*num);
    }
    return out;
}

std::vector<std::string> ConfigFile::get_strings(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return {};
    const auto* items = std::get_if<std::vector<Value>>(&it->second.data);
    if (!items) type_error(key, "an array of strings");
    std::vector<std::string> out;
    for (const Value& v : *items) {
        const std::string* s = std::get_if<std::string>(&v.data);
        if (!s) type_error(key, "an array of strings");
        out.push_back(*s);
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (scenarios.empty())
        throw std::invalid_argument("config: scenario: at least one scenario required");
    if (fog_grid.empty())
        throw std::invalid_argument("config: fog: at least one fog condition required");
    if (sensors.empty())
        throw std::invalid_argument("config: sensors: at least one sensor required");
    if (targets.empty())
        throw std::invalid_argument("config: targets: at least one target required");
    if (!(step_m > 0.0)) throw std::invalid_argument("config: experiment.step_m must be > 0");
    if (!(bin_width_m > 0.0))
        throw std::invalid_argument("config: experiment.bin_width_m must be > 0");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("config: experiment.epsilon must be in (0, 1)");
    if (frames_per_condition < 0)
        throw std::invalid_argument("config: experiment.frames must be >= 0");
    for (const auto& s : scenarios) s.validate();
    for (const auto& s : sensors) s.validate();
    for (const auto& f : fog_grid)
        if (!(f.visibility_lo_m > 0.0) || f.visibility_hi_m < f.visibility_lo_m)
            throw std::invalid_argument("config: fog: bad visibility range");
    for (const auto& t : targets)
        if (t.rho < 0.0 || t.rho > 1.0)
            throw std::invalid_argument("config: targets.rho must be in [0, 1]");
}

ExperimentConfig default_experiment() {
    ExperimentConfig config;
    config.scenarios = {scene::Scenario::passive()};
    for (auto type : {atmosphere::FogType::radiation, atmosphere::FogType::advection})
        for (auto [lo, hi] : {std::pair{10.0, 20.0}, std::pair{20.0, 30.0},
                              std::pair{30.0, 40.0}, std::pair{50.0, 60.0}})
            config.fog_grid.push_back({type, lo, hi});
    config.sensors = {scene::SensorModel::standard_camera(), scene::SensorModel::gated_camera()};
    config.targets = scene::standard_targets();
    return config;
}

namespace {

atmosphere::FogType fog_type_from(const std::string& name) {
    if (name == "radiation") return atmosphere::FogType::radiation;
    if (name == "advection") return atmosphere::FogType::advection;
    throw std::invalid_argument("config: fog.types: unknown fog type '" + name + "'");
}

FogGridEntry range_from(const std::string& text, atmosphere::FogType type) {
    const auto dash = text.find('-');
    FogGridEntry entry;
    entry.type = type;
    try {
        if (dash == std::string::npos) {
            entry.visibility_lo_m = entry.visibility_hi_m = std::stod(text);
        } else {
            entry.visibility_lo_m = std::stod(text.substr(0, dash));
            entry.visibility_hi_m = std::stod(text.substr(dash + 1));
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("config: fog.visibility_ranges: cannot parse '" + text + "'");
    }
    return entry;
}

scene::SensorModel sensor_from(const ConfigFile& file, const std::string& name) {
    scene::SensorModel sensor;
    if (name == "standard") {
        sensor = scene::SensorModel::standard_camera();
    } else if (name == "gated") {
        sensor = scene::SensorModel::gated_camera();
    } else {
        throw std::invalid_argument("config: sensors: unknown sensor '" + name + "'");
    }
    const std::string table = "sensor." + name + ".";
    sensor.bit_depth = static_cast<int>(file.get_int(table + "bit_depth", sensor.bit_depth));
    sensor.width = static_cast<int>(file.get_int(table + "width", sensor.width));
    sensor.height = static_cast<int>(file.get_int(table + "height", sensor.height));
    sensor.noise.read_sigma = file.get_number(table + "read_sigma", sensor.noise.read_sigma);
    sensor.noise.shot_scale = file.get_number(table + "shot_scale", sensor.noise.shot_scale);
    sensor.noise.seed =
        static_cast<std::uint64_t>(file.get_int(table + "noise_seed", 0));
    if (sensor.kind == scene::SensorKind::gated) {
        gated::GatingScheme scheme;
        scheme.t_laser_ns = file.get_number("gating.t_laser_ns", scheme.t_laser_ns);
        scheme.t_delay_ns = file.get_number("gating.t_delay_ns", scheme.t_delay_ns);
        scheme.t_gate_ns = file.get_number("gating.t_gate_ns", scheme.t_gate_ns);
        scheme.micro_exposures =
            static_cast<int>(file.get_int("gating.micro_exposures", scheme.micro_exposures));
        sensor.gating = scheme;
        sensor.laser_intensity = file.get_number(table + "laser_intensity", 0.0);
    }
    return sensor;
}

scene::Scenario scenario_from(const ConfigFile& file, const std::string& kind) {
    scene::Scenario scenario;
    if (kind == "passive") {
        scenario = scene::Scenario::passive();
    } else if (kind == "oncoming_car") {
        scene::OncomingSource source;
        source.position_m = file.get_number("scenario.oncoming_position_m", source.position_m);
        source.lateral_offset_m =
            file.get_number("scenario.oncoming_lateral_m", source.lateral_offset_m);
        source.intensity = file.get_number("scenario.oncoming_intensity", source.intensity);
        source.angular_sigma_rad =
            file.get_number("scenario.oncoming_sigma_rad", source.angular_sigma_rad);
        scenario = scene::Scenario::oncoming_car(source);
    } else {
        throw std::invalid_argument("config: scenario.kinds: unknown scenario '" + kind + "'");
    }
    scenario.chamber_length_m =
        file.get_number("scenario.chamber_length_m", scenario.chamber_length_m);
    scenario.chamber_width_m =
        file.get_number("scenario.chamber_width_m", scenario.chamber_width_m);
    scenario.chamber_height_m =
        file.get_number("scenario.chamber_height_m", scenario.chamber_height_m);
    return scenario;
}

} // namespace

ExperimentConfig experiment_from_config(const ConfigFile& file) {
    ExperimentConfig config = default_experiment();

    config.seed = static_cast<std::uint64_t>(file.get_int("experiment.seed", 1));
    config.out_dir = file.get_string("experiment.out", "");
    config.step_m = file.get_number("experiment.step_m", config.step_m);
    config.bin_width_m = file.get_number("experiment.bin_width_m", config.bin_width_m);
    config.epsilon = file.get_number("experiment.epsilon", config.epsilon);
    config.frames_per_condition =
        static_cast<int>(file.get_int("experiment.frames", config.frames_per_condition));

    if (file.has("scenario.kinds")) {
        config.scenarios.clear();
        for (const std::string& kind : file.get_strings("scenario.kinds"))
            config.scenarios.push_back(scenario_from(file, kind));
    } else if (file.has("scenario.chamber_length_m")) {
        config.scenarios = {scenario_from(file, "passive")};
    }

    if (file.has("fog.types") || file.has("fog.visibility_ranges") ||
        file.has("fog.visibilities")) {
        std::vector<atmosphere::FogType> types;
        if (file.has("fog.types")) {
            for (const std::string& t : file.get_strings("fog.types"))
                types.push_back(fog_type_from(t));
        } else {
            types = {atmosphere::FogType::radiation, atmosphere::FogType::advection};
        }
        config.fog_grid.clear();
        for (atmosphere::FogType type : types) {
            for (const std::string& range : file.get_strings("fog.visibility_ranges"))
                config.fog_grid.push_back(range_from(range, type));
            for (double v : file.get_numbers("fog.visibilities"))
                config.fog_grid.push_back({type, v, v});
        }
        if (config.fog_grid.empty()) {
            // types given without ranges: fall back to the default ranges
            for (atmosphere::FogType type : types)
                for (auto [lo, hi] : {std::pair{10.0, 20.0}, std::pair{20.0, 30.0},
                                      std::pair{30.0, 40.0}, std::pair{50.0, 60.0}})
                    config.fog_grid.push_back({type, lo, hi});
        }
    }

    if (file.has("sensors.enabled")) {
        config.sensors.clear();
        for (const std::string& name : file.get_strings("sensors.enabled"))
            config.sensors.push_back(sensor_from(file, name));
    } else {
        for (scene::SensorModel& sensor : config.sensors)
            sensor = sensor_from(file, to_string(sensor.kind));
    }

    if (file.has("targets.rho")) {
        config.targets.clear();
        const double height = file.get_number("targets.mount_height_m", 1.6);
        for (double rho : file.get_numbers("targets.rho"))
            config.targets.push_back({rho, height});
    }

    config.illumination.headlight_scale =
        file.get_number("illumination.headlight_scale", config.illumination.headlight_scale);
    config.illumination.ambient_i_inf =
        file.get_number("illumination.ambient_i_inf", config.illumination.ambient_i_inf);
    config.illumination.onset_m =
        file.get_number("illumination.onset_m", config.illumination.onset_m);
    config.illumination.beta_a_ratio =
        file.get_number("illumination.beta_a_ratio", config.illumination.beta_a_ratio);

    config.validate();
    return config;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    return experiment_from_config(ConfigFile::load(path));
}

} // namespace fogbench::cfg
