#include "dira/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "dira/baselines.hpp"
#include "dira/dqn.hpp"
#include "dira/encoding.hpp"
#include "dira/lqr.hpp"
#include "dira/matrix_io.hpp"
#include "dira/replay.hpp"
#include "dira/scheduler.hpp"

namespace dira {

namespace {

RiccatiOptions riccati_options(const ExperimentConfig& cfg) {
    RiccatiOptions opts;
    opts.tolerance = cfg.riccati_tolerance;
    opts.max_iterations = cfg.riccati_max_iterations;
    opts.blowup_norm = cfg.riccati_blowup;
    return opts;
}

// Steady-state solve with the finite-horizon fallback when the recursion does
// not settle for the given closure probabilities.
Eigen::MatrixXd refresh_k(const PlantModel& plant, const Eigen::VectorXd& q,
                          const ExperimentConfig& cfg, long* fallbacks) {
    const RiccatiSolution sol = solve_steady_state(plant, q, riccati_options(cfg));
    if (sol.status == RiccatiStatus::Converged) return sol.K;
    if (fallbacks) ++*fallbacks;
    return finite_horizon_k(plant, q, cfg.fallback_horizon);
}

Eigen::VectorXd random_initial_state(int dim, double scale, Rng& rng) {
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x[i] = scale * rng.normal();
    return x;
}

std::string csv_num(double v) { return io::format_double(v); }

}  // namespace

PlantModel build_plant(const ExperimentConfig& cfg) {
    PlantGenConfig gen = cfg.plant;
    gen.num_subsystems = cfg.subsystems;
    Rng rng(cfg.plant_seed);
    return generate_random_ncs(gen, rng);
}

std::vector<MarkovChannel> build_channels(const ExperimentConfig& cfg) {
    GilbertElliotConfig ge;
    ge.good_dropout = cfg.good_dropout;
    ge.mean_good_sojourn = cfg.mean_good_sojourn;
    ge.burstiness = cfg.burstiness;
    const int reliable = (cfg.channels + 2) / 3;
    std::vector<MarkovChannel> channels;
    channels.reserve(cfg.channels);
    for (int j = 0; j < cfg.channels; ++j) {
        const bool first_type = j < reliable;
        MarkovChannel ch = gilbert_elliot(first_type ? cfg.reliable_success : cfg.lossy_success, ge);
        ch.label = first_type ? "type-1" : "type-2";
        channels.push_back(std::move(ch));
    }
    return channels;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    io::Archive ar;
    ar.put_ints("topology", {ckpt.num_subsystems, ckpt.num_channels});
    ar.put_ints("net_dims", {ckpt.net.input_dim, ckpt.net.hidden_dim, ckpt.net.output_dim});
    ar.put_vector("net_params", ckpt.net.params);
    ar.put_vector("target_params", ckpt.target.params);
    ar.put_matrix("k_infinity", ckpt.k_infinity);
    ar.put_vector("channel_success", ckpt.channel_success);
    ar.put_vector("subsystem_closure", ckpt.subsystem_closure);
    ar.save(path);
}

Checkpoint load_checkpoint(const std::string& path) {
    const io::Archive ar = io::Archive::load_file(path);
    const auto topo = ar.get_ints("topology");
    const auto dims = ar.get_ints("net_dims");
    if (topo.size() != 2 || dims.size() != 3) {
        throw std::runtime_error("checkpoint '" + path + "': malformed dimension entries");
    }
    Checkpoint ckpt;
    ckpt.num_subsystems = static_cast<int>(topo[0]);
    ckpt.num_channels = static_cast<int>(topo[1]);
    ckpt.net = QNetwork::zeros(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                               static_cast<int>(dims[2]));
    ckpt.target = ckpt.net;
    ckpt.net.params = ar.get_vector("net_params");
    ckpt.target.params = ar.get_vector("target_params");
    if (ckpt.net.params.size() != ckpt.net.param_count() ||
        ckpt.target.params.size() != ckpt.net.param_count()) {
        throw std::runtime_error("checkpoint '" + path + "': parameter count mismatch");
    }
    ckpt.k_infinity = ar.get_matrix("k_infinity");
    ckpt.channel_success = ar.get_vector("channel_success");
    ckpt.subsystem_closure = ar.get_vector("subsystem_closure");
    return ckpt;
}

TrainResult run_training(const ExperimentConfig& cfg_in, int run_index) {
    ExperimentConfig cfg = cfg_in;
    cfg.resolve_defaults();
    cfg.validate();

    const PlantModel plant = build_plant(cfg);
    const std::vector<MarkovChannel> channels = build_channels(cfg);
    const int n_sub = cfg.subsystems;
    const int n_chan = cfg.channels;
    const int input_dim = plant.state_dim() + n_chan * code_width(n_sub);
    const kernels::Exec exec =
        cfg.parallel_kernels ? kernels::Exec::Parallel : kernels::Exec::Serial;

    Rng rng_channel(derive_seed(cfg.channel_seed, run_index));
    Rng rng_expl(derive_seed(cfg.exploration_seed, run_index));
    Rng rng_weights(derive_seed(cfg.weight_seed, run_index));
    Rng rng_noise(derive_seed(cfg.noise_seed, run_index));

    QNetwork net = QNetwork::create(input_dim, cfg.hidden_units, n_sub, rng_weights);
    QNetwork target = net;
    AdamState adam(net.param_count());
    AdamConfig acfg;
    acfg.learning_rate = cfg.learning_rate;
    acfg.grad_clip = cfg.grad_clip;

    ReplayBuffer replay(cfg.replay_capacity);
    SuccessRateEstimator chan_est(n_chan, static_cast<int>(cfg.estimator_window));
    SuccessRateEstimator sub_est(n_sub, static_cast<int>(cfg.estimator_window));

    // Before any acknowledgments arrive the estimators sit at their 1/2 prior,
    // which seeds the first cost-to-go matrix.
    Eigen::MatrixXd K = refresh_k(plant, sub_est.estimates(), cfg, nullptr);

    const Eigen::MatrixXd sqrt_sigma = matrix_sqrt_psd(plant.sigma_w);
    std::vector<int> chan_state(n_chan);
    for (int j = 0; j < n_chan; ++j) {
        chan_state[j] = sample_initial_state(channels[j], rng_channel);
    }

    EpsilonSchedule eps{cfg.epsilon_init, cfg.epsilon_min, cfg.epsilon_decay};
    SelectionOptions sel_opts;
    sel_opts.per_component_exploration = cfg.per_component;
    sel_opts.exec = exec;
    const StorageMode mode = cfg.chained_storage ? StorageMode::Chained : StorageMode::Literal;

    TrainResult result;
    RunLog& log = result.log;
    log.run = run_index;
    long global_step = 0;

    for (int epoch = 0; epoch < cfg.epochs && !log.aborted; ++epoch) {
        Eigen::VectorXd x = random_initial_state(plant.state_dim(), cfg.x0_scale, rng_noise);
        EpochRecord rec;
        rec.epoch = epoch + 1;
        double cost_sum = 0.0, cost_sq = 0.0, loss_sum = 0.0;

        for (int t = 0; t < cfg.horizon; ++t) {
            const SelectionResult sel =
                select_action(x, net, n_sub, n_chan, eps.value, rng_expl, sel_opts);
            const Eigen::VectorXd q_hat =
                closure_probs_for_action(n_sub, sel.action, chan_est.estimates());
            const Eigen::VectorXd u = candidate_controls(plant, K, q_hat, x);

            std::vector<bool> delivered(n_sub, false);
            std::vector<bool> chan_ok(n_chan, false);
            for (int j = 0; j < n_chan; ++j) {
                const int ok = sample_transmission(channels[j], chan_state[j], rng_channel);
                chan_state[j] = step_channel(channels[j], chan_state[j], rng_channel);
                chan_ok[j] = ok == 1;
                if (ok == 1) delivered[sel.action[j] - 1] = true;
            }
            const Eigen::VectorXd u_applied = apply_dropouts(plant, u, delivered);

            double raw_reward = 0.0;
            const double reward = compute_reward(plant, x, u_applied, cfg.reward_scale, &raw_reward);
            const double raw_cost = -raw_reward;
            for (int j = 0; j < n_chan; ++j) chan_est.record(j, chan_ok[j]);
            for (int i = 0; i < n_sub; ++i) sub_est.record(i, delivered[i]);

            const Eigen::VectorXd w = sample_noise(sqrt_sigma, rng_noise);
            const Eigen::VectorXd x_next = plant_step(plant, x, u_applied, w);
            store_selection_history(replay, sel, reward, x_next, mode, false);
            log.transitions_stored += n_chan;
            log.steps_executed += 1;
            rec.steps += 1;
            cost_sum += raw_cost;
            cost_sq += raw_cost * raw_cost;

            if (!x_next.allFinite()) {
                log.aborted = true;
                log.abort_reason = "non-finite plant state";
                rec.diverged = true;
                break;
            }

            if (replay.ready(cfg.warmup)) {
                try {
                    for (int j = 0; j < n_chan; ++j) {
                        const auto batch = replay.sample(cfg.batch_size, rng_expl);
                        const Eigen::VectorXd targets =
                            bellman_targets(batch, target, cfg.gamma, exec);
                        loss_sum += train_step(net, adam, acfg, batch, targets, exec);
                        rec.updates += 1;
                    }
                    soft_update(target, net, cfg.tau);
                } catch (const std::exception& ex) {
                    log.aborted = true;
                    log.abort_reason = ex.what();
                    rec.diverged = true;
                    break;
                }
            }

            x = x_next;
            ++global_step;
            eps.step();
            if (global_step % cfg.k_refresh_period == 0) {
                K = refresh_k(plant, sub_est.estimates(), cfg, &rec.k_fallbacks);
                rec.k_refreshes += 1;
            }
            if (cfg.estimator_window_switch_step > 0 && cfg.estimator_window_final > 0 &&
                global_step == cfg.estimator_window_switch_step) {
                chan_est.set_window(static_cast<int>(cfg.estimator_window_final));
                sub_est.set_window(static_cast<int>(cfg.estimator_window_final));
            }
            if (x.lpNorm<Eigen::Infinity>() > cfg.divergence_guard) {
                rec.diverged = true;
                break;
            }
        }

        if (rec.steps > 0) {
            rec.mean_cost = cost_sum / static_cast<double>(rec.steps);
            const double second = cost_sq / static_cast<double>(rec.steps);
            rec.std_cost = std::sqrt(std::max(0.0, second - rec.mean_cost * rec.mean_cost));
        }
        rec.mean_loss = rec.updates > 0 ? loss_sum / static_cast<double>(rec.updates) : 0.0;
        rec.epsilon_end = eps.value;
        log.epochs.push_back(rec);
    }

    Checkpoint& ckpt = result.checkpoint;
    ckpt.num_subsystems = n_sub;
    ckpt.num_channels = n_chan;
    ckpt.net = net;
    ckpt.target = target;
    ckpt.k_infinity = K;
    ckpt.channel_success = chan_est.estimates();
    ckpt.subsystem_closure = sub_est.estimates();
    return result;
}

std::vector<TrainResult> run_many(const ExperimentConfig& cfg) {
    std::vector<TrainResult> results;
    results.reserve(cfg.runs);
    for (int r = 0; r < cfg.runs; ++r) results.push_back(run_training(cfg, r));
    return results;
}

const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Learned: return "dira";
        case PolicyKind::UniformRandom: return "uniform-random";
        case PolicyKind::StabilityWeighted: return "stability-weighted";
        case PolicyKind::OracleGreedy: return "oracle-greedy";
        case PolicyKind::PerfectComm: return "perfect-comm-lqr";
    }
    return "unknown";
}

PolicyKind policy_by_name(const std::string& name) {
    if (name == "dira") return PolicyKind::Learned;
    if (name == "uniform-random") return PolicyKind::UniformRandom;
    if (name == "stability-weighted") return PolicyKind::StabilityWeighted;
    if (name == "oracle-greedy") return PolicyKind::OracleGreedy;
    if (name == "perfect-comm-lqr") return PolicyKind::PerfectComm;
    throw std::runtime_error("unknown policy '" + name +
                             "' (dira, uniform-random, stability-weighted, oracle-greedy, "
                             "perfect-comm-lqr)");
}

EvalPolicy make_baseline_policy(PolicyKind kind, const PlantModel& plant,
                                const std::vector<MarkovChannel>& channels,
                                const ExperimentConfig& cfg) {
    if (kind == PolicyKind::Learned) {
        throw std::invalid_argument("make_baseline_policy: learned policies need a checkpoint");
    }
    EvalPolicy policy;
    policy.kind = kind;
    policy.label = policy_name(kind);
    policy.channel_success.resize(static_cast<Eigen::Index>(channels.size()));
    for (std::size_t j = 0; j < channels.size(); ++j) {
        policy.channel_success[static_cast<Eigen::Index>(j)] = average_success(channels[j]);
    }
    if (kind == PolicyKind::PerfectComm) {
        policy.gain = perfect_comm_gain(plant);
        return policy;
    }

    // The look-ahead terminal cost comes from the policy's own stationary
    // closure probabilities under the true channel statistics.
    std::vector<double> pick;
    if (kind == PolicyKind::UniformRandom) {
        pick.assign(plant.num_subsystems(), 1.0 / plant.num_subsystems());
    } else {
        policy.weights = stability_weights(plant);
        pick = policy.weights;
    }
    const Eigen::VectorXd q = analytic_closure_probs(pick, policy.channel_success);
    policy.k_mat = refresh_k(plant, q, cfg, nullptr);
    return policy;
}

EvalPolicy make_learned_policy(const Checkpoint& ckpt) {
    EvalPolicy policy;
    policy.kind = PolicyKind::Learned;
    policy.label = policy_name(PolicyKind::Learned);
    policy.checkpoint = ckpt;
    return policy;
}

EvaluationResult evaluate_policy(const EvalPolicy& policy, const ExperimentConfig& cfg_in,
                                 const PlantModel& plant,
                                 const std::vector<MarkovChannel>& channels,
                                 bool exclude_diverged) {
    ExperimentConfig cfg = cfg_in;
    cfg.resolve_defaults();
    cfg.validate();
    const int n_sub = plant.num_subsystems();
    const int n_chan = static_cast<int>(channels.size());
    if (policy.kind == PolicyKind::Learned) {
        const int expected = plant.state_dim() + n_chan * code_width(n_sub);
        if (policy.checkpoint.net.input_dim != expected) {
            throw std::runtime_error("evaluate_policy: checkpoint does not match the plant");
        }
    }
    SelectionOptions sel_opts;
    sel_opts.exec = cfg.parallel_kernels ? kernels::Exec::Parallel : kernels::Exec::Serial;

    const Eigen::MatrixXd sqrt_sigma = matrix_sqrt_psd(plant.sigma_w);
    EvaluationResult result;
    result.policy = policy.label;
    result.exclude_diverged = exclude_diverged;

    for (int e = 0; e < cfg.eval_episodes; ++e) {
        Rng rng(derive_seed(cfg.eval_seed, static_cast<std::uint64_t>(e)));
        std::vector<int> chan_state(n_chan);
        for (int j = 0; j < n_chan; ++j) chan_state[j] = sample_initial_state(channels[j], rng);
        Eigen::VectorXd x = random_initial_state(plant.state_dim(), cfg.x0_scale, rng);

        EpisodeStats stats;
        stats.episode = e + 1;
        double cost_sum = 0.0;

        for (int t = 0; t < cfg.eval_horizon; ++t) {
            Eigen::VectorXd u_applied;
            if (policy.kind == PolicyKind::PerfectComm) {
                u_applied = -(policy.gain * x);
            } else {
                std::vector<int> action;
                const Eigen::MatrixXd* k_mat = &policy.k_mat;
                const Eigen::VectorXd* success = &policy.channel_success;
                switch (policy.kind) {
                    case PolicyKind::Learned:
                        action = select_action(x, policy.checkpoint.net, n_sub, n_chan, 0.0,
                                               rng, sel_opts)
                                     .action;
                        k_mat = &policy.checkpoint.k_infinity;
                        success = &policy.checkpoint.channel_success;
                        break;
                    case PolicyKind::UniformRandom:
                        action = uniform_random_action(n_sub, n_chan, rng);
                        break;
                    case PolicyKind::StabilityWeighted:
                        action = stability_weighted_action(policy.weights, n_chan, rng);
                        break;
                    case PolicyKind::OracleGreedy:
                        action = oracle_greedy_action(plant, x, policy.k_mat,
                                                      policy.channel_success);
                        break;
                    default:
                        throw std::logic_error("evaluate_policy: unhandled policy kind");
                }
                const Eigen::VectorXd q = closure_probs_for_action(n_sub, action, *success);
                const Eigen::VectorXd u = candidate_controls(plant, *k_mat, q, x);
                std::vector<bool> delivered(n_sub, false);
                for (int j = 0; j < n_chan; ++j) {
                    const int ok = sample_transmission(channels[j], chan_state[j], rng);
                    chan_state[j] = step_channel(channels[j], chan_state[j], rng);
                    if (ok == 1) delivered[action[j] - 1] = true;
                }
                u_applied = apply_dropouts(plant, u, delivered);
            }

            cost_sum += stage_cost(plant, x, u_applied);
            stats.steps += 1;
            const Eigen::VectorXd w = sample_noise(sqrt_sigma, rng);
            x = plant_step(plant, x, u_applied, w);
            if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > cfg.divergence_guard) {
                stats.diverged = true;
                break;
            }
        }
        stats.mean_cost = stats.steps > 0 ? cost_sum / static_cast<double>(stats.steps) : 0.0;
        result.episodes.push_back(stats);
        if (stats.diverged) result.diverged_count += 1;
    }

    double sum = 0.0, sum_sq = 0.0;
    int used = 0;
    for (const auto& ep : result.episodes) {
        if (exclude_diverged && ep.diverged) continue;
        sum += ep.mean_cost;
        sum_sq += ep.mean_cost * ep.mean_cost;
        ++used;
    }
    result.episodes_used = used;
    if (used > 0) {
        result.mean_cost = sum / used;
        const double second = sum_sq / used;
        result.std_cost =
            std::sqrt(std::max(0.0, second - result.mean_cost * result.mean_cost));
    } else {
        result.mean_cost = std::numeric_limits<double>::quiet_NaN();
        result.std_cost = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

void emit_learning_curve(const std::vector<RunLog>& logs, const std::string& path) {
    if (logs.empty()) throw std::runtime_error("emit_learning_curve: no runs to write");
    std::size_t max_epochs = 0;
    for (const auto& log : logs) max_epochs = std::max(max_epochs, log.epochs.size());

    // Across-run aggregate per epoch index; runs that aborted early simply
    // drop out of later epochs' aggregates.
    std::vector<double> agg_mean(max_epochs, 0.0), agg_lo(max_epochs, 0.0),
        agg_hi(max_epochs, 0.0);
    for (std::size_t e = 0; e < max_epochs; ++e) {
        double sum = 0.0, sum_sq = 0.0;
        int count = 0;
        for (const auto& log : logs) {
            if (e >= log.epochs.size()) continue;
            const double m = log.epochs[e].mean_cost;
            sum += m;
            sum_sq += m * m;
            ++count;
        }
        const double mean = sum / count;
        const double sd = std::sqrt(std::max(0.0, sum_sq / count - mean * mean));
        agg_mean[e] = mean;
        agg_lo[e] = mean - 2.0 * sd;
        agg_hi[e] = mean + 2.0 * sd;
    }

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "run,epoch,mean_cost,std_cost,mean_loss,epsilon,diverged,"
           "epoch_mean,epoch_lo,epoch_hi\n";
    for (const auto& log : logs) {
        for (std::size_t e = 0; e < log.epochs.size(); ++e) {
            const EpochRecord& rec = log.epochs[e];
            out << log.run << ',' << rec.epoch << ',' << csv_num(rec.mean_cost) << ','
                << csv_num(rec.std_cost) << ',' << csv_num(rec.mean_loss) << ','
                << csv_num(rec.epsilon_end) << ',' << (rec.diverged ? 1 : 0) << ','
                << csv_num(agg_mean[e]) << ',' << csv_num(agg_lo[e]) << ','
                << csv_num(agg_hi[e]) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

void emit_evaluation_csv(const std::vector<EvaluationResult>& results,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "policy,mean_cost,std_cost,episodes,diverged\n";
    for (const auto& res : results) {
        out << res.policy << ',' << csv_num(res.mean_cost) << ',' << csv_num(res.std_cost)
            << ',' << res.episodes_used << ',' << res.diverged_count << '\n';
    }
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

void emit_episode_csv(const std::vector<EvaluationResult>& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "policy,episode,mean_cost,steps,diverged\n";
    for (const auto& res : results) {
        for (const auto& ep : res.episodes) {
            out << res.policy << ',' << ep.episode << ',' << csv_num(ep.mean_cost) << ','
                << ep.steps << ',' << (ep.diverged ? 1 : 0) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

void emit_summary(const std::vector<RunLog>& logs,
                  const std::vector<EvaluationResult>& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "Training runs: " << logs.size() << '\n';
    int aborted = 0;
    for (const auto& log : logs) aborted += log.aborted ? 1 : 0;
    if (!logs.empty()) {
        double sum = 0.0;
        int count = 0;
        for (const auto& log : logs) {
            if (log.epochs.empty()) continue;
            sum += log.epochs.back().mean_cost;
            ++count;
        }
        if (count > 0) {
            out << "Final-epoch mean per-stage cost (across runs): " << csv_num(sum / count)
                << '\n';
        }
        out << "Aborted runs: " << aborted << '\n';
    }
    if (!results.empty()) {
        out << '\n' << "Evaluation (mean per-stage cost):" << '\n';
        for (const auto& res : results) {
            out << "  " << res.policy << ": mean " << csv_num(res.mean_cost) << ", std "
                << csv_num(res.std_cost) << ", episodes " << res.episodes_used
                << ", diverged " << res.diverged_count << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

void emit_results(const std::vector<RunLog>& logs,
                  const std::vector<EvaluationResult>& results, const std::string& out_dir) {
    if (logs.empty()) throw std::runtime_error("emit_results: no runs to write");
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    emit_learning_curve(logs, (dir / "learning_curve.csv").string());
    if (!results.empty()) {
        emit_evaluation_csv(results, (dir / "evaluation.csv").string());
        emit_episode_csv(results, (dir / "evaluation_episodes.csv").string());
    }
    emit_summary(logs, results, (dir / "summary.txt").string());
}

}  // namespace dira
