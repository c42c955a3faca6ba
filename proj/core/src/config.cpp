#include "sgbh/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "sgbh/presets.hpp"

namespace sgbh {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parse_sections(const std::string& text) {
    SectionMap out;
    std::istringstream in(text);
    std::string line, section = "";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

double to_double(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("field [" + section + "] " + key + ": not a number: '" + v + "'");
    }
}

long to_int(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("field [" + section + "] " + key + ": not an integer: '" + v + "'");
    }
}

bool to_bool(const std::string& section, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("field [" + section + "] " + key + ": not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& section, const std::string& key,
                            const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(section, key, item));
    }
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    const SectionMap sections = parse_sections(text);
    RunConfig cfg;
    for (const auto& [section, kv] : sections) {
        for (const auto& [key, value] : kv) {
            const std::string where = section;
            auto unknown = [&]() {
                throw ConfigError("field [" + section + "] " + key + ": unknown key");
            };
            if (section == "model") {
                if (key == "nu") cfg.model.nu = to_double(where, key, value);
                else if (key == "alpha") cfg.model.alpha = to_double(where, key, value);
                else if (key == "beta") cfg.model.beta = to_double(where, key, value);
                else if (key == "gamma") cfg.model.gamma = to_double(where, key, value);
                else if (key == "delta") cfg.model.delta = static_cast<int>(to_int(where, key, value));
                else if (key == "T") cfg.model.T = to_double(where, key, value);
                else unknown();
            } else if (section == "noise") {
                if (key == "preset") cfg.noise_preset = value;
                else if (key == "sigma") cfg.noise_sigma = to_double(where, key, value);
                else if (key == "t_switch") cfg.noise_t_switch = to_double(where, key, value);
                else unknown();
            } else if (section == "grid") {
                if (key == "m") cfg.m = static_cast<int>(to_int(where, key, value));
                else if (key == "n_steps") cfg.n_steps = static_cast<int>(to_int(where, key, value));
                else unknown();
            } else if (section == "scheme") {
                if (key == "type") cfg.scheme = value;
                else if (key == "n_modes") cfg.n_modes = static_cast<int>(to_int(where, key, value));
                else unknown();
            } else if (section == "picard") {
                if (key == "lambda_mode") cfg.lambda_mode = value;
                else if (key == "lambda") cfg.lambda = to_double(where, key, value);
                else if (key == "tol") cfg.tol = to_double(where, key, value);
                else if (key == "max_iters") cfg.max_iters = static_cast<int>(to_int(where, key, value));
                else if (key == "trunc_n") cfg.trunc_n = to_double(where, key, value);
                else if (key == "trunc_p") cfg.trunc_p = to_double(where, key, value);
                else if (key == "n_schedule") {
                    cfg.n_schedule = to_list(where, key, value);
                    cfg.n_schedule_set = true;
                }
                else unknown();
            } else if (section == "ic") {
                if (key == "preset") cfg.ic_preset = value;
                else if (key == "amplitude") cfg.ic_amplitude = to_double(where, key, value);
                else unknown();
            } else if (section == "experiment") {
                if (key == "type") cfg.experiment = value;
                else if (key == "compare_preset") cfg.compare_preset = value;
                else if (key == "compare_amplitude") cfg.compare_amplitude = to_double(where, key, value);
                else if (key == "compare_tol") cfg.compare_tol = to_double(where, key, value);
                else if (key == "r_index") cfg.malliavin_r_index = static_cast<int>(to_int(where, key, value));
                else if (key == "z_index") cfg.malliavin_z_index = static_cast<int>(to_int(where, key, value));
                else if (key == "epsilon") cfg.malliavin_epsilon = to_double(where, key, value);
                else if (key == "a") cfg.malliavin_a = to_double(where, key, value);
                else if (key == "b") cfg.malliavin_b = to_double(where, key, value);
                else if (key == "obs_times") cfg.obs_times = to_list(where, key, value);
                else if (key == "obs_x") cfg.obs_x = to_double(where, key, value);
                else if (key == "levels") cfg.conv_levels = static_cast<int>(to_int(where, key, value));
                else if (key == "m_coarsest") cfg.conv_m0 = static_cast<int>(to_int(where, key, value));
                else if (key == "n_coarsest") cfg.conv_n0 = static_cast<int>(to_int(where, key, value));
                else unknown();
            } else if (section == "seeds") {
                if (key == "base") cfg.seed_base = static_cast<std::uint64_t>(to_int(where, key, value));
                else if (key == "count") cfg.seed_count = static_cast<int>(to_int(where, key, value));
                else unknown();
            } else if (section == "output") {
                if (key == "directory") cfg.output_dir = value;
                else if (key == "csv") cfg.out_csv = to_bool(where, key, value);
                else if (key == "binary") cfg.out_binary = to_bool(where, key, value);
                else unknown();
            } else {
                throw ConfigError("unknown config section [" + section + "]");
            }
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void validate_config(const RunConfig& cfg) {
    try {
        cfg.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field [model]: ") + e.what());
    }
    const auto noises = noise_preset_names();
    if (std::find(noises.begin(), noises.end(), cfg.noise_preset) == noises.end())
        throw ConfigError("field [noise] preset: unknown preset '" + cfg.noise_preset + "'");
    const auto ics = initial_preset_names();
    if (std::find(ics.begin(), ics.end(), cfg.ic_preset) == ics.end())
        throw ConfigError("field [ic] preset: unknown preset '" + cfg.ic_preset + "'");
    if (cfg.experiment == "compare" &&
        std::find(ics.begin(), ics.end(), cfg.compare_preset) == ics.end())
        throw ConfigError("field [experiment] compare_preset: unknown preset '" +
                          cfg.compare_preset + "'");
    if (cfg.m < 3) throw ConfigError("field [grid] m: need m >= 3");
    if (cfg.n_steps < 1) throw ConfigError("field [grid] n_steps: need n_steps >= 1");
    if (cfg.scheme != "picard" && cfg.scheme != "galerkin" && cfg.scheme != "transformed")
        throw ConfigError("field [scheme] type: must be picard | galerkin | transformed");
    if (cfg.n_modes < 0 || cfg.n_modes > cfg.m)
        throw ConfigError("field [scheme] n_modes: need 0 <= n_modes <= m");
    if (cfg.lambda_mode != "auto" && cfg.lambda_mode != "fixed")
        throw ConfigError("field [picard] lambda_mode: must be auto | fixed");
    if (!(cfg.tol > 0.0)) throw ConfigError("field [picard] tol: must be > 0");
    if (cfg.max_iters < 1) throw ConfigError("field [picard] max_iters: must be >= 1");
    if (!(cfg.trunc_n > 0.0)) throw ConfigError("field [picard] trunc_n: must be > 0");
    const double pmin = 2.0 * cfg.model.delta + 1.0;
    if (cfg.trunc_p != 0.0 && cfg.trunc_p < pmin)
        throw ConfigError("field [picard] trunc_p: must be >= 2*delta + 1");
    static const char* kExperiments[] = {"solve",   "compare",   "energy",     "malliavin",
                                         "density", "dichotomy", "convergence"};
    bool known = false;
    for (const char* e : kExperiments) known = known || cfg.experiment == e;
    if (!known) throw ConfigError("field [experiment] type: unknown experiment '" + cfg.experiment + "'");
    if (cfg.seed_count < 1) throw ConfigError("field [seeds] count: must be >= 1");
    if (cfg.output_dir.empty()) throw ConfigError("field [output] directory: must be nonempty");
    if (cfg.experiment == "malliavin") {
        if (cfg.malliavin_r_index < 0 || cfg.malliavin_r_index >= cfg.n_steps)
            throw ConfigError("field [experiment] r_index: out of range");
        if (cfg.malliavin_z_index < 0 || cfg.malliavin_z_index >= cfg.m)
            throw ConfigError("field [experiment] z_index: out of range");
        if (cfg.malliavin_epsilon == 0.0)
            throw ConfigError("field [experiment] epsilon: must be nonzero");
    }
    if (cfg.experiment == "convergence") {
        if (cfg.conv_levels < 3) throw ConfigError("field [experiment] levels: need >= 3");
        if (cfg.conv_m0 < 3) throw ConfigError("field [experiment] m_coarsest: need >= 3");
        if (cfg.conv_n0 < 1) throw ConfigError("field [experiment] n_coarsest: need >= 1");
    }
    if (cfg.experiment == "dichotomy" && cfg.noise_preset != "switch")
        throw ConfigError("field [noise] preset: dichotomy experiment requires the switch preset");
}

nlohmann::json config_echo(const RunConfig& cfg) {
    nlohmann::json j;
    j["model"] = {{"nu", cfg.model.nu},     {"alpha", cfg.model.alpha}, {"beta", cfg.model.beta},
                  {"gamma", cfg.model.gamma}, {"delta", cfg.model.delta}, {"T", cfg.model.T}};
    j["noise"] = {{"preset", cfg.noise_preset},
                  {"sigma", cfg.noise_sigma},
                  {"t_switch", cfg.noise_t_switch}};
    j["grid"] = {{"m", cfg.m}, {"n_steps", cfg.n_steps}};
    j["scheme"] = {{"type", cfg.scheme}, {"n_modes", cfg.n_modes == 0 ? cfg.m : cfg.n_modes}};
    j["picard"] = {{"lambda_mode", cfg.lambda_mode}, {"lambda", cfg.lambda},
                   {"tol", cfg.tol},                 {"max_iters", cfg.max_iters},
                   {"trunc_n", cfg.trunc_n},
                   {"trunc_p", cfg.trunc_p == 0.0 ? 2.0 * cfg.model.delta + 1.0 : cfg.trunc_p},
                   {"n_schedule", cfg.n_schedule}};
    j["ic"] = {{"preset", cfg.ic_preset}, {"amplitude", cfg.ic_amplitude}};
    j["experiment"] = {{"type", cfg.experiment},
                       {"compare_preset", cfg.compare_preset},
                       {"compare_amplitude", cfg.compare_amplitude},
                       {"compare_tol", cfg.compare_tol},
                       {"r_index", cfg.malliavin_r_index},
                       {"z_index", cfg.malliavin_z_index},
                       {"epsilon", cfg.malliavin_epsilon},
                       {"a", cfg.malliavin_a},
                       {"b", cfg.malliavin_b},
                       {"obs_times", cfg.obs_times},
                       {"obs_x", cfg.obs_x},
                       {"levels", cfg.conv_levels},
                       {"m_coarsest", cfg.conv_m0},
                       {"n_coarsest", cfg.conv_n0}};
    j["seeds"] = {{"base", cfg.seed_base}, {"count", cfg.seed_count}};
    j["output"] = {{"directory", cfg.output_dir}, {"csv", cfg.out_csv}, {"binary", cfg.out_binary}};
    return j;
}

}  // namespace sgbh
