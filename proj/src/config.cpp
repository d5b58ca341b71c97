#include "dira/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dira/matrix_io.hpp"

namespace dira {

namespace {

double to_double(const std::string& v, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error(ctx + ": cannot parse '" + v + "' as a number");
    }
}

long to_long(const std::string& v, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        const long l = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return l;
    } catch (const std::exception&) {
        throw std::runtime_error(ctx + ": cannot parse '" + v + "' as an integer");
    }
}

int to_int(const std::string& v, const std::string& ctx) {
    return static_cast<int>(to_long(v, ctx));
}

std::uint64_t to_u64(const std::string& v, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        const unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw std::runtime_error(ctx + ": cannot parse '" + v + "' as an unsigned integer");
    }
}

bool to_bool(const std::string& v, const std::string& ctx) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::runtime_error(ctx + ": cannot parse '" + v + "' as a boolean");
}

struct KeyDef {
    const char* section;
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

std::string fmt_d(double v) { return io::format_double(v); }
std::string fmt_l(long v) { return std::to_string(v); }
std::string fmt_u(std::uint64_t v) { return std::to_string(v); }
std::string fmt_b(bool v) { return v ? "true" : "false"; }

const std::vector<KeyDef>& key_table() {
    static const std::vector<KeyDef> table = {
        {"system", "subsystems",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.subsystems = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.subsystems); }},
        {"system", "channels",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.channels = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.channels); }},

        {"plant", "coupling_probability",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.coupling_probability = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.plant.coupling_probability); }},
        {"plant", "coupling_scale",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.coupling_scale = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.plant.coupling_scale); }},
        {"plant", "noise_std",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.noise_std = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.plant.noise_std); }},
        {"plant", "stable_radius_min",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.stable_radius_min = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.plant.stable_radius_min); }},
        {"plant", "stable_radius_max",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.stable_radius_max = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.plant.stable_radius_max); }},
        {"plant", "unstable_mode_min",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.unstable_mode_min = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.plant.unstable_mode_min); }},
        {"plant", "unstable_mode_max",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.unstable_mode_max = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.plant.unstable_mode_max); }},
        {"plant", "input_gain_min",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.input_gain_min = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.plant.input_gain_min); }},
        {"plant", "input_gain_max",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.input_gain_max = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.plant.input_gain_max); }},
        {"plant", "normalize_cost",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.normalize_cost = to_bool(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_b(c.plant.normalize_cost); }},
        {"plant", "max_retries",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant.max_retries = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.plant.max_retries); }},

        {"channels", "reliable_success",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.reliable_success = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.reliable_success); }},
        {"channels", "lossy_success",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.lossy_success = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.lossy_success); }},
        {"channels", "good_dropout",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.good_dropout = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.good_dropout); }},
        {"channels", "mean_good_sojourn",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.mean_good_sojourn = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.mean_good_sojourn); }},
        {"channels", "burstiness",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.burstiness = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.burstiness); }},

        {"dqn", "hidden_units",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.hidden_units = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.hidden_units); }},
        {"dqn", "learning_rate",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.learning_rate = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.learning_rate); }},
        {"dqn", "gamma",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.gamma = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.gamma); }},
        {"dqn", "batch_size",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.batch_size = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.batch_size); }},
        {"dqn", "replay_capacity",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.replay_capacity = to_long(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.replay_capacity); }},
        {"dqn", "tau",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.tau = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.tau); }},
        {"dqn", "warmup",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.warmup = to_long(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.warmup); }},
        {"dqn", "grad_clip",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.grad_clip = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.grad_clip); }},
        {"dqn", "parallel_kernels",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.parallel_kernels = to_bool(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_b(c.parallel_kernels); }},

        {"exploration", "epsilon_init",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.epsilon_init = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.epsilon_init); }},
        {"exploration", "epsilon_min",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.epsilon_min = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.epsilon_min); }},
        {"exploration", "epsilon_decay",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.epsilon_decay = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.epsilon_decay); }},
        {"exploration", "per_component",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.per_component = to_bool(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_b(c.per_component); }},

        {"scheduler", "chained_storage",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.chained_storage = to_bool(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_b(c.chained_storage); }},
        {"scheduler", "reward_scale",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.reward_scale = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.reward_scale); }},

        {"control", "k_refresh_period",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.k_refresh_period = to_long(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.k_refresh_period); }},
        {"control", "estimator_window",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.estimator_window = to_long(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.estimator_window); }},
        {"control", "estimator_window_final",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.estimator_window_final = to_long(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.estimator_window_final); }},
        {"control", "estimator_window_switch_step",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.estimator_window_switch_step = to_long(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.estimator_window_switch_step); }},
        {"control", "riccati_tolerance",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.riccati_tolerance = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.riccati_tolerance); }},
        {"control", "riccati_max_iterations",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.riccati_max_iterations = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.riccati_max_iterations); }},
        {"control", "riccati_blowup",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.riccati_blowup = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.riccati_blowup); }},
        {"control", "fallback_horizon",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.fallback_horizon = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.fallback_horizon); }},

        {"training", "epochs",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.epochs = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.epochs); }},
        {"training", "horizon",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.horizon = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.horizon); }},
        {"training", "runs",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.runs = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.runs); }},
        {"training", "x0_scale",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.x0_scale = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.x0_scale); }},
        {"training", "divergence_guard",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.divergence_guard = to_double(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_d(c.divergence_guard); }},

        {"evaluation", "episodes",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.eval_episodes = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.eval_episodes); }},
        {"evaluation", "horizon",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.eval_horizon = to_int(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_l(c.eval_horizon); }},

        {"seeds", "plant",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.plant_seed = to_u64(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_u(c.plant_seed); }},
        {"seeds", "channels",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.channel_seed = to_u64(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_u(c.channel_seed); }},
        {"seeds", "exploration",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.exploration_seed = to_u64(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_u(c.exploration_seed); }},
        {"seeds", "weights",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.weight_seed = to_u64(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_u(c.weight_seed); }},
        {"seeds", "noise",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.noise_seed = to_u64(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_u(c.noise_seed); }},
        {"seeds", "evaluation",
         [](ExperimentConfig& c, const std::string& v, const std::string& x) {
             c.eval_seed = to_u64(v, x);
         },
         [](const ExperimentConfig& c) { return fmt_u(c.eval_seed); }},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
    ExperimentConfig cfg;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);

        if (line.front() == '[') {
            if (line.back() != ']') throw std::runtime_error(where + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const auto& def : key_table()) {
                if (section == def.section) {
                    known = true;
                    break;
                }
            }
            if (!known) throw std::runtime_error(where + ": unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw std::runtime_error(where + ": key before any [section]");

        bool matched = false;
        for (const auto& def : key_table()) {
            if (section == def.section && key == def.key) {
                def.set(cfg, value, where);
                matched = true;
                break;
            }
        }
        if (!matched) {
            throw std::runtime_error(where + ": unknown key '" + key + "' in [" + section + "]");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file '" + path + "'");
    std::string section;
    for (const auto& def : key_table()) {
        if (section != def.section) {
            if (!section.empty()) out << '\n';
            section = def.section;
            out << '[' << section << "]\n";
        }
        out << def.key << " = " << def.get(cfg) << '\n';
    }
    if (!out) throw std::runtime_error("write failure on config file '" + path + "'");
}

void ExperimentConfig::resolve_defaults() {
    plant.num_subsystems = subsystems;
    if (k_refresh_period == 0) k_refresh_period = horizon;
    if (estimator_window == 0) estimator_window = 4L * horizon;
    if (reward_scale == 0.0) reward_scale = static_cast<double>(subsystems);
}

void ExperimentConfig::validate() const {
    auto expect = [](bool ok, const std::string& what) {
        if (!ok) throw std::runtime_error("config: " + what);
    };
    expect(subsystems >= 1, "subsystems must be >= 1");
    expect(channels >= 1, "channels must be >= 1");
    expect(reliable_success > 0 && reliable_success < 1, "reliable_success must lie in (0,1)");
    expect(lossy_success > 0 && lossy_success < 1, "lossy_success must lie in (0,1)");
    expect(good_dropout >= 0 && good_dropout <= 1, "good_dropout must lie in [0,1]");
    expect(hidden_units >= 1, "hidden_units must be >= 1");
    expect(learning_rate > 0, "learning_rate must be positive");
    expect(gamma > 0 && gamma <= 1, "gamma must lie in (0,1]");
    expect(batch_size >= 1, "batch_size must be >= 1");
    expect(replay_capacity >= 1, "replay_capacity must be >= 1");
    expect(tau > 0 && tau <= 1, "tau must lie in (0,1]");
    expect(warmup >= 1, "warmup must be >= 1");
    expect(grad_clip >= 0, "grad_clip must be >= 0");
    expect(epsilon_init >= 0 && epsilon_init <= 1, "epsilon_init must lie in [0,1]");
    expect(epsilon_min >= 0 && epsilon_min <= 1, "epsilon_min must lie in [0,1]");
    expect(epsilon_decay > 0 && epsilon_decay <= 1, "epsilon_decay must lie in (0,1]");
    expect(reward_scale >= 0, "reward_scale must be >= 0");
    expect(k_refresh_period >= 0, "k_refresh_period must be >= 0");
    expect(epochs >= 1 && horizon >= 1, "epochs and horizon must be >= 1");
    expect(k_refresh_period <= static_cast<long>(epochs) * horizon,
           "k_refresh_period exceeds the total number of steps");
    expect(estimator_window >= 0, "estimator_window must be >= 0");
    expect(estimator_window_final >= 0, "estimator_window_final must be >= 0");
    expect(riccati_tolerance > 0, "riccati_tolerance must be positive");
    expect(riccati_max_iterations >= 1, "riccati_max_iterations must be >= 1");
    expect(fallback_horizon >= 1, "fallback_horizon must be >= 1");
    expect(runs >= 1, "runs must be >= 1");
    expect(x0_scale >= 0, "x0_scale must be >= 0");
    expect(divergence_guard > 0, "divergence_guard must be positive");
    expect(eval_episodes >= 1 && eval_horizon >= 1, "evaluation shape must be positive");
}

ExperimentConfig desk_preset() {
    ExperimentConfig cfg;
    cfg.subsystems = 4;
    cfg.channels = 3;
    cfg.hidden_units = 384;
    cfg.learning_rate = 1e-4;
    cfg.gamma = 0.9;
    cfg.batch_size = 192;
    cfg.replay_capacity = 20000;
    cfg.grad_clip = 1.0;
    cfg.tau = 0.02;
    cfg.reward_scale = 100.0;
    cfg.epochs = 15;
    cfg.horizon = 500;
    cfg.epsilon_decay = 0.9996;
    cfg.epsilon_min = 0.2;
    cfg.per_component = true;
    cfg.runs = 5;
    // Plant draw with two hot unstable subsystems, so channel assignment
    // actually separates the scheduling policies at this small scale. The
    // exploration floor stays high: with per-channel coins the greedy chain
    // still surfaces often enough to learn, while pure-greedy rollouts during
    // training would park unstable subsystems and poison the replay buffer.
    cfg.plant_seed = 24;
    return cfg;
}

ExperimentConfig small_preset() {
    ExperimentConfig cfg;
    cfg.subsystems = 8;
    cfg.channels = 6;
    cfg.hidden_units = 2048;
    cfg.learning_rate = 1e-6;
    cfg.replay_capacity = 75000;
    cfg.epochs = 75;
    cfg.horizon = 500;
    cfg.epsilon_decay = 0.99995;
    return cfg;
}

ExperimentConfig medium_preset() {
    ExperimentConfig cfg;
    cfg.subsystems = 12;
    cfg.channels = 9;
    cfg.hidden_units = 4096;
    cfg.learning_rate = 1e-6;
    cfg.replay_capacity = 100000;
    cfg.epochs = 75;
    cfg.horizon = 500;
    cfg.epsilon_decay = 0.99997;
    return cfg;
}

ExperimentConfig large_preset() {
    ExperimentConfig cfg;
    cfg.subsystems = 16;
    cfg.channels = 12;
    cfg.hidden_units = 6144;
    cfg.learning_rate = 1e-6;
    cfg.replay_capacity = 125000;
    cfg.epochs = 75;
    cfg.horizon = 500;
    cfg.epsilon_decay = 0.99999;
    return cfg;
}

ExperimentConfig preset_by_name(const std::string& name) {
    if (name == "desk") return desk_preset();
    if (name == "small") return small_preset();
    if (name == "medium") return medium_preset();
    if (name == "large") return large_preset();
    throw std::runtime_error("unknown preset '" + name + "' (desk, small, medium, large)");
}

}  // namespace dira
