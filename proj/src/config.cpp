#include "qbm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    if (value == "inf" || value == "infinity") return std::numeric_limits<double>::infinity();
    double out = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end || std::isnan(out)) {
        throw ConfigError("key '" + key + "': '" + value + "' is not a number");
    }
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("key '" + key + "': '" + value + "' is not a non-negative integer");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("key '" + key + "': '" + value + "' is not a boolean");
}

void require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) throw ConfigError("key '" + key + "': " + message);
}

}  // namespace

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
    auto number = [&] { return parse_double(key, value); };
    if (key == "s") c.bath.s = number();
    else if (key == "gamma") c.bath.gamma = number();
    else if (key == "cutoff" || key == "Omega") c.bath.cutoff = number();
    else if (key == "mass") c.bath.mass = number();
    else if (key == "omega_s") c.bath.omega_s = number();
    else if (key == "beta") c.bath.beta = number();
    else if (key == "infinite_temperature") c.bath.infinite_temperature = parse_bool(key, value);
    else if (key == "mu") {
        c.mu.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) c.mu.push_back(parse_double(key, trim(item)));
        require(!c.mu.empty(), key, "empty list");
    } else if (key == "var_q_sweep") {
        c.var_q_sweep.clear();
        if (value == "none") return;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) c.var_q_sweep.push_back(parse_double(key, trim(item)));
    } else if (key == "q_a") c.initial.q_a = number();
    else if (key == "p_a") c.initial.p_a = number();
    else if (key == "var_q") {
        c.initial.var_q = number();
        require(c.initial.var_q > 0.0, key, "must be positive");
        c.initial.var_p = 0.25 / c.initial.var_q;
    } else if (key == "var_p") c.initial.var_p = number();
    else if (key == "cov_qp") c.initial.cov_qp = number();
    else if (key == "dt") c.dt = number();
    else if (key == "t_end") c.t_end = value == "auto" ? std::nullopt : std::optional<double>(number());
    else if (key == "oversample") {
        c.oversample = value == "auto" ? std::nullopt : std::optional<std::size_t>(parse_count(key, value));
    } else if (key == "kernel_method") {
        try {
            c.kernel_method = parse_kernel_method(value);
        } catch (const ConfigError& e) {
            throw ConfigError("key '" + key + "': " + e.what());
        }
    } else if (key == "oracle") c.oracle = parse_bool(key, value);
    else if (key == "oracle_modes") c.oracle_modes = parse_count(key, value);
    else if (key == "oracle_omega_max") {
        c.oracle_omega_max = value == "auto" ? std::nullopt : std::optional<double>(number());
    } else if (key == "frequency_convention") {
        c.frequency = value == "auto" ? std::nullopt
                                      : std::optional<FrequencyConvention>(parse_frequency_convention(value));
    } else if (key == "noise_convention") {
        c.noise = value == "auto" ? std::nullopt : std::optional<NoiseConvention>(parse_noise_convention(value));
    } else if (key == "dissipation_sign") {
        if (value == "auto") {
            c.dissipation_sign.reset();
        } else {
            const double v = number();
            require(v == 1.0 || v == -1.0, key, "must be +1, -1 or auto");
            c.dissipation_sign = static_cast<int>(v);
        }
    } else if (key == "coefficient_form") {
        if (value == "exact") c.coefficient_form = CoefficientForm::exact;
        else if (value == "printed") c.coefficient_form = CoefficientForm::printed;
        else throw ConfigError("key '" + key + "': expected exact or printed");
    } else if (key == "window_fraction") c.window_fraction = number();
    else if (key == "drift_tolerance") c.drift_tolerance = number();
    else if (key == "gamma_superohmic") c.gamma_superohmic = number();
    else if (key == "calibration_t_end") c.calibration_t_end = number();
    else if (key == "output_dir") c.output_dir = value;
    else throw ConfigError("unknown key '" + key + "'");
}

void RunConfig::validate() const {
    try {
        bath.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("bath parameters: ") + e.what());
    }
    try {
        initial.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("initial state: ") + e.what());
    }
    for (double v : var_q_sweep) require(v > 0.0 && std::isfinite(v), "var_q_sweep", "entries must be positive");
    require(dt > 0.0 && std::isfinite(dt), "dt", "must be positive");
    require(!t_end || (*t_end >= 0.0 && std::isfinite(*t_end)), "t_end", "must be non-negative");
    require(!oversample || *oversample >= 1, "oversample", "must be at least 1");
    for (double m : mu) require(std::isfinite(m), "mu", "must be finite");
    require(oracle_modes >= 1, "oracle_modes", "must be at least 1");
    require(omega_max() > 0.0, "oracle_omega_max", "must be positive");
    require(window_fraction > 0.0 && window_fraction <= 1.0, "window_fraction", "must lie in (0, 1]");
    require(drift_tolerance > 0.0, "drift_tolerance", "must be positive");
    require(gamma_superohmic >= 0.0, "gamma_superohmic", "must be non-negative");
    require(calibration_t_end > 0.0, "calibration_t_end", "must be positive");
    require(!output_dir.empty(), "output_dir", "must not be empty");
}

std::vector<GaussianState> RunConfig::initial_states() const {
    if (var_q_sweep.empty()) return {initial};
    std::vector<GaussianState> out;
    for (double v : var_q_sweep) out.push_back(GaussianState{initial.q_a, initial.p_a, v, 0.25 / v, 0.0});
    return out;
}

Switches RunConfig::switches() const {
    Switches s;
    if (frequency) s.frequency = *frequency;
    if (noise) s.noise = *noise;
    if (dissipation_sign) s.dissipation_sign = *dissipation_sign;
    return s;
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
    auto join = [](const std::vector<double>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
        return out;
    };
    const std::string mus = join(mu);
    return {
        {"s", format_number(bath.s)},
        {"gamma", format_number(bath.gamma)},
        {"cutoff", format_number(bath.cutoff)},
        {"mass", format_number(bath.mass)},
        {"omega_s", format_number(bath.omega_s)},
        {"beta", format_number(bath.beta)},
        {"infinite_temperature", bath.infinite_temperature ? "true" : "false"},
        {"mu", mus},
        {"q_a", format_number(initial.q_a)},
        {"p_a", format_number(initial.p_a)},
        {"var_q", format_number(initial.var_q)},
        {"var_p", format_number(initial.var_p)},
        {"cov_qp", format_number(initial.cov_qp)},
        {"var_q_sweep", var_q_sweep.empty() ? "none" : join(var_q_sweep)},
        {"dt", format_number(dt)},
        {"t_end", t_end ? format_number(*t_end) : "auto"},
        {"oversample", oversample ? std::to_string(*oversample) : "auto"},
        {"kernel_method", to_string(kernel_method)},
        {"oracle", oracle ? "true" : "false"},
        {"oracle_modes", std::to_string(oracle_modes)},
        {"oracle_omega_max", format_number(omega_max())},
        {"frequency_convention", frequency ? to_string(*frequency) : "auto"},
        {"noise_convention", noise ? to_string(*noise) : "auto"},
        {"dissipation_sign", dissipation_sign ? std::to_string(*dissipation_sign) : "auto"},
        {"coefficient_form", coefficient_form == CoefficientForm::exact ? "exact" : "printed"},
        {"window_fraction", format_number(window_fraction)},
        {"drift_tolerance", format_number(drift_tolerance)},
        {"gamma_superohmic", format_number(gamma_superohmic)},
        {"calibration_t_end", format_number(calibration_t_end)},
        {"output_dir", output_dir},
    };
}

RunConfig parse_config(std::istream& in) {
    RunConfig c;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(number) + ": empty key or value");
        }
        apply_setting(c, key, value);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

}  // namespace qbm
