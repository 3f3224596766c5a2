#include "esrom/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "esrom/errors.hpp"

namespace esrom {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

int to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int out = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not an integer: " + v);
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not a number: " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key " + key + ": not a boolean: " + v);
}

} // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);

    ExperimentConfig cfg;
    std::map<std::string, std::function<void(const std::string&, const std::string&)>>
        setters;
    auto set_str = [](std::string& target) {
        return [&target](const std::string&, const std::string& v) { target = v; };
    };
    setters["name"] = set_str(cfg.name);
    setters["model.kind"] = set_str(cfg.model_kind);
    setters["model.g"] = [&](const std::string& k, const std::string& v) {
        cfg.sw_gravity = to_double(k, v);
    };
    setters["model.gamma"] = [&](const std::string& k, const std::string& v) {
        cfg.euler_gamma = to_double(k, v);
    };
    setters["grid.n_cells"] = [&](const std::string& k, const std::string& v) {
        cfg.n_cells = to_int(k, v);
    };
    setters["grid.domain_a"] = [&](const std::string& k, const std::string& v) {
        cfg.domain_a = to_double(k, v);
    };
    setters["grid.domain_b"] = [&](const std::string& k, const std::string& v) {
        cfg.domain_b = to_double(k, v);
    };
    setters["time.dt"] = [&](const std::string& k, const std::string& v) {
        cfg.dt = to_double(k, v);
    };
    setters["time.t_end"] = [&](const std::string& k, const std::string& v) {
        cfg.t_end = to_double(k, v);
    };
    setters["time.snapshot_stride"] = [&](const std::string& k, const std::string& v) {
        cfg.snapshot_stride = to_int(k, v);
    };
    setters["ic.name"] = set_str(cfg.ic_name);
    setters["fom.dissipation"] = [&](const std::string&, const std::string& v) {
        cfg.fom_dissipation = dissipation_from_string(v);
    };
    setters["fit.manifold_kind"] = set_str(cfg.fit_kind);
    setters["fit.r"] = [&](const std::string& k, const std::string& v) {
        cfg.fit.r = to_int(k, v);
    };
    setters["fit.lambda"] = [&](const std::string& k, const std::string& v) {
        cfg.fit.lambda = to_double(k, v);
    };
    setters["fit.lm_max_iters"] = [&](const std::string& k, const std::string& v) {
        cfg.fit.lm.max_iters = to_int(k, v);
    };
    setters["fit.lm_gradient_tol"] = [&](const std::string& k, const std::string& v) {
        cfg.fit.lm.gradient_tol = to_double(k, v);
    };
    setters["fit.lm_step_tol"] = [&](const std::string& k, const std::string& v) {
        cfg.fit.lm.step_tol = to_double(k, v);
    };
    setters["fit.lm_initial_damping"] = [&](const std::string& k, const std::string& v) {
        cfg.fit.lm.initial_damping = to_double(k, v);
    };
    setters["fit.warm_start"] = [&](const std::string& k, const std::string& v) {
        cfg.fit.warm_start = to_bool(k, v);
    };
    setters["rom.variant"] = [&](const std::string&, const std::string& v) {
        cfg.rom_variant = rom_variant_from_string(v);
    };
    setters["rom.tse"] = [&](const std::string& k, const std::string& v) {
        cfg.rom_tse = to_bool(k, v);
    };
    setters["rom.dissipation"] = [&](const std::string&, const std::string& v) {
        cfg.rom_dissipation = dissipation_from_string(v);
    };
    setters["rom.dt"] = [&](const std::string& k, const std::string& v) {
        cfg.rom_dt = to_double(k, v);
    };
    setters["io.snapshots"] = set_str(cfg.io_snapshots);
    setters["io.entropy"] = set_str(cfg.io_entropy);
    setters["io.manifold"] = set_str(cfg.io_manifold);
    setters["io.fit_report"] = set_str(cfg.io_fit_report);
    setters["io.singular_values"] = set_str(cfg.io_singular_values);
    setters["io.trace"] = set_str(cfg.io_trace);
    setters["io.coords"] = set_str(cfg.io_coords);
    setters["io.status"] = set_str(cfg.io_status);
    setters["io.report"] = set_str(cfg.io_report);
    setters["io.summary"] = set_str(cfg.io_summary);

    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": unknown key: " + key);
        it->second(key, value);
    }

    if (cfg.n_cells < 1) throw ConfigError(path + ": grid.n_cells must be set");
    if (!(cfg.domain_b > cfg.domain_a))
        throw ConfigError(path + ": grid domain must satisfy b > a");
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0))
        throw ConfigError(path + ": time.dt and time.t_end must be positive");
    if (cfg.snapshot_stride < 1)
        throw ConfigError(path + ": time.snapshot_stride must be >= 1");
    if (cfg.fit.r < 1) throw ConfigError(path + ": fit.r must be >= 1");
    if (cfg.fit.lambda < 0.0) throw ConfigError(path + ": fit.lambda must be >= 0");
    if (cfg.rom_dt < 0.0) throw ConfigError(path + ": rom.dt must be positive");
    if (cfg.rom_dt > 0.0) {
        // ROM coordinate samples must land on the snapshot time grid
        const double spacing = cfg.snapshot_stride * cfg.dt;
        const double ratio = spacing / cfg.rom_dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
            throw ConfigError(path +
                              ": rom.dt must divide the snapshot spacing "
                              "(snapshot_stride * time.dt)");
    }
    return cfg;
}

std::unique_ptr<ConservationLaw> make_model(const ExperimentConfig& config) {
    return make_model(config.model_kind, config.sw_gravity, config.euler_gamma);
}

Grid make_grid(const ExperimentConfig& config) {
    const auto model = make_model(config);
    return Grid::uniform(config.n_cells, config.domain_a, config.domain_b,
                         model->n_vars());
}

std::function<Eigen::VectorXd(double)> make_initial_condition(
    const std::string& name, const ConservationLaw& model) {
    constexpr double kPi = 3.14159265358979323846;
    if (name == "burgers_sine") {
        if (model.n_vars() != 1)
            throw ConfigError("burgers_sine requires a scalar model");
        return [](double x) {
            Eigen::VectorXd u(1);
            u << std::sin(2.0 * kPi * x) + 1.0;
            return u;
        };
    }
    if (name == "sw_dambreak") {
        if (model.name() != "shallow_water")
            throw ConfigError("sw_dambreak requires the shallow water model");
        return [](double x) {
            Eigen::VectorXd u(2);
            u << (std::abs(x) < 0.2 ? 1.5 : 1.0), 0.0;
            return u;
        };
    }
    if (name == "sw_perturbation") {
        if (model.name() != "shallow_water")
            throw ConfigError("sw_perturbation requires the shallow water model");
        return [](double x) {
            Eigen::VectorXd u(2);
            u << 1.0 + 0.1 * std::exp(-100.0 * x * x), 0.0;
            return u;
        };
    }
    if (name == "euler_sod_periodic") {
        const auto* euler = dynamic_cast<const Euler*>(&model);
        if (!euler) throw ConfigError("euler_sod_periodic requires the Euler model");
        const double gamma = euler->gamma();
        return [gamma](double x) {
            const bool inner = x > 0.25 && x < 0.75;
            const double rho = inner ? 1.0 : 0.125;
            const double p = inner ? 1.0 : 0.1;
            Eigen::VectorXd u(3);
            u << rho, 0.0, p / (gamma - 1.0);
            return u;
        };
    }
    throw ConfigError("unknown initial condition: " + name);
}

} // namespace esrom
