#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "dira/plant.hpp"

namespace dira {

// Everything a training or evaluation run needs, grouped the way the config
// file sections are. Zeros in the "derived" fields mean "use the documented
// default", resolved by resolve_defaults().
struct ExperimentConfig {
    // [system]
    int subsystems = 4;
    int channels = 3;

    // [plant]
    PlantGenConfig plant;

    // [channels]
    double reliable_success = 0.99;
    double lossy_success = 0.93;
    double good_dropout = 0.001;
    double mean_good_sojourn = 20.0;
    double burstiness = 4.0;

    // [dqn]
    int hidden_units = 128;
    double learning_rate = 1e-6;
    double gamma = 0.95;
    int batch_size = 40;
    long replay_capacity = 75000;
    double tau = 0.005;
    long warmup = 1000;
    double grad_clip = 0.0;
    bool parallel_kernels = true;

    // [exploration]
    double epsilon_init = 1.0;
    double epsilon_min = 0.001;
    double epsilon_decay = 0.99995;
    bool per_component = false;

    // [scheduler]
    bool chained_storage = false;
    double reward_scale = 0.0;  // 0: number of subsystems

    // [control]
    long k_refresh_period = 0;          // c; 0: horizon
    long estimator_window = 0;          // D; 0: 4 * horizon
    long estimator_window_final = 0;    // 0: never grow the window
    long estimator_window_switch_step = 0;
    double riccati_tolerance = 1e-9;
    int riccati_max_iterations = 10000;
    double riccati_blowup = 1e12;
    int fallback_horizon = 50;

    // [training]
    int epochs = 75;
    int horizon = 500;
    int runs = 1;
    double x0_scale = 1.0;
    double divergence_guard = 1e6;

    // [evaluation]
    int eval_episodes = 20;
    int eval_horizon = 500;

    // [seeds]
    std::uint64_t plant_seed = 1;
    std::uint64_t channel_seed = 2;
    std::uint64_t exploration_seed = 3;
    std::uint64_t weight_seed = 4;
    std::uint64_t noise_seed = 5;
    std::uint64_t eval_seed = 6;

    // Fill the zero-valued derived fields (c, D, reward scale) and propagate
    // the topology into the plant generator settings.
    void resolve_defaults();
    void validate() const;  // throws on out-of-range values
};

// Plain-text "[section]" / "key = value" format; '#' starts a comment.
// Unknown sections or keys are errors, so typos never pass silently.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in, const std::string& origin);

// Writes every key with its current value, loadable by load_config.
void save_config(const ExperimentConfig& cfg, const std::string& path);

// Shipped experiment scales.
ExperimentConfig desk_preset();    // N=4,  M=3, small net, minutes on one core
ExperimentConfig small_preset();   // N=8,  M=6
ExperimentConfig medium_preset();  // N=12, M=9
ExperimentConfig large_preset();   // N=16, M=12
ExperimentConfig preset_by_name(const std::string& name);

}  // namespace dira
