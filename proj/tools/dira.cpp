#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "dira/baselines.hpp"
#include "dira/harness.hpp"
#include "dira/lqr.hpp"
#include "dira/matrix_io.hpp"
#include "dira/scheduler.hpp"

using namespace dira;

namespace {

ExperimentConfig config_from_options(const std::string& config_path, const std::string& preset) {
    if (!config_path.empty() && !preset.empty()) {
        throw CLI::ValidationError("--config and --preset are mutually exclusive");
    }
    if (!config_path.empty()) return load_config(config_path);
    return preset_by_name(preset.empty() ? "desk" : preset);
}

void apply_base_seed(ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.channel_seed = derive_seed(seed, 1);
    cfg.exploration_seed = derive_seed(seed, 2);
    cfg.weight_seed = derive_seed(seed, 3);
    cfg.noise_seed = derive_seed(seed, 4);
    cfg.eval_seed = derive_seed(seed, 5);
}

const char* status_text(RiccatiStatus status) {
    switch (status) {
        case RiccatiStatus::Converged: return "converged";
        case RiccatiStatus::IterationLimit: return "iteration-limit";
        case RiccatiStatus::Diverged: return "diverged";
    }
    return "unknown";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learned channel scheduling for networked LQR control"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir = "results";
    std::uint64_t base_seed = 0;
    int runs_override = 0;

    auto* train = app.add_subcommand("train", "Run episodic training and write CSV results");
    train->add_option("--config", config_path, "Configuration file");
    train->add_option("--preset", preset, "Preset name: desk, small, medium, large");
    train->add_option("--out", out_dir, "Output directory");
    auto* train_seed = train->add_option("--seed", base_seed,
                                         "Base seed for the per-run stochastic streams");
    train->add_option("--runs", runs_override, "Override the number of training runs");

    std::string ckpt_path, eval_out;
    std::vector<std::string> baselines;
    int episodes_override = 0, horizon_override = 0;
    bool exclude_diverged = false;
    std::uint64_t eval_seed = 0;
    auto* evaluate = app.add_subcommand("evaluate", "Monte Carlo evaluation of a policy");
    evaluate->add_option("--config", config_path, "Configuration file");
    evaluate->add_option("--preset", preset, "Preset name: desk, small, medium, large");
    evaluate->add_option("--checkpoint", ckpt_path, "Trained checkpoint to evaluate");
    evaluate->add_option("--baseline", baselines,
                         "Baseline policy name (repeatable): uniform-random, "
                         "stability-weighted, oracle-greedy, perfect-comm-lqr");
    evaluate->add_option("--episodes", episodes_override, "Override evaluation episodes");
    evaluate->add_option("--horizon", horizon_override, "Override evaluation horizon");
    auto* eval_seed_opt = evaluate->add_option("--seed", eval_seed, "Evaluation seed");
    evaluate->add_flag("--exclude-diverged", exclude_diverged,
                       "Exclude diverged episodes from the aggregate statistics");
    evaluate->add_option("--out", eval_out, "Directory for evaluation CSV files");

    std::string plant_path, q_list, k_out;
    double q_uniform = -1.0;
    auto* riccati = app.add_subcommand("riccati-check",
                                       "Steady-state solve for given delivery probabilities");
    riccati->add_option("--plant", plant_path, "Plant file")->required();
    riccati->add_option("--q", q_list, "Comma-separated per-subsystem delivery probabilities");
    riccati->add_option("--q-uniform", q_uniform, "One delivery probability for every subsystem");
    riccati->add_option("--out", k_out, "Write the solution matrix to this file");

    std::string system_out = "system.txt";
    auto* generate = app.add_subcommand("generate-system", "Generate and store a random plant");
    generate->add_option("--config", config_path, "Configuration file");
    generate->add_option("--preset", preset, "Preset name: desk, small, medium, large");
    auto* plant_seed_opt = generate->add_option("--seed", base_seed, "Plant seed");
    generate->add_option("--out", system_out, "Output plant file");

    int samples = 20;
    auto* enumerate = app.add_subcommand(
        "enumerate-oracle", "Compare scheduling policies against the exhaustive oracle");
    enumerate->add_option("--config", config_path, "Configuration file");
    enumerate->add_option("--preset", preset, "Preset name: desk, small, medium, large");
    enumerate->add_option("--checkpoint", ckpt_path, "Optional checkpoint to compare");
    enumerate->add_option("--samples", samples, "Number of sampled states");
    auto* enum_seed = enumerate->add_option("--seed", base_seed, "Sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            ExperimentConfig cfg = config_from_options(config_path, preset);
            if (train_seed->count() > 0) apply_base_seed(cfg, base_seed);
            if (runs_override > 0) cfg.runs = runs_override;
            cfg.resolve_defaults();
            cfg.validate();

            const std::vector<TrainResult> results = run_many(cfg);
            std::vector<RunLog> logs;
            logs.reserve(results.size());
            for (const auto& result : results) logs.push_back(result.log);
            emit_results(logs, {}, out_dir);
            const std::filesystem::path dir(out_dir);
            save_config(cfg, (dir / "config.ini").string());
            for (std::size_t r = 0; r < results.size(); ++r) {
                save_checkpoint(results[r].checkpoint,
                                (dir / ("checkpoint_run" + std::to_string(r) + ".txt")).string());
            }
            for (const auto& result : results) {
                const auto& log = result.log;
                if (log.epochs.empty()) continue;
                std::printf("run %d: %zu epochs, final mean cost %.6g%s\n", log.run,
                            log.epochs.size(), log.epochs.back().mean_cost,
                            log.aborted ? " [aborted: " : "");
                if (log.aborted) std::printf("  %s]\n", log.abort_reason.c_str());
            }
            std::printf("results written to %s\n", out_dir.c_str());
        } else if (evaluate->parsed()) {
            ExperimentConfig cfg = config_from_options(config_path, preset);
            if (episodes_override > 0) cfg.eval_episodes = episodes_override;
            if (horizon_override > 0) cfg.eval_horizon = horizon_override;
            if (eval_seed_opt->count() > 0) cfg.eval_seed = eval_seed;
            cfg.resolve_defaults();
            cfg.validate();
            const PlantModel plant = build_plant(cfg);
            const auto channels = build_channels(cfg);

            std::vector<EvaluationResult> results;
            if (!ckpt_path.empty()) {
                const EvalPolicy learned = make_learned_policy(load_checkpoint(ckpt_path));
                results.push_back(
                    evaluate_policy(learned, cfg, plant, channels, exclude_diverged));
            }
            for (const auto& name : baselines) {
                const EvalPolicy policy =
                    make_baseline_policy(policy_by_name(name), plant, channels, cfg);
                results.push_back(
                    evaluate_policy(policy, cfg, plant, channels, exclude_diverged));
            }
            if (results.empty()) {
                throw CLI::ValidationError("evaluate needs --checkpoint and/or --baseline");
            }
            std::printf("%-20s %12s %12s %10s %9s\n", "policy", "mean", "std", "episodes",
                        "diverged");
            for (const auto& res : results) {
                std::printf("%-20s %12.6g %12.6g %10d %9d\n", res.policy.c_str(), res.mean_cost,
                            res.std_cost, res.episodes_used, res.diverged_count);
            }
            if (!eval_out.empty()) {
                std::filesystem::create_directories(eval_out);
                const std::filesystem::path dir(eval_out);
                emit_evaluation_csv(results, (dir / "evaluation.csv").string());
                emit_episode_csv(results, (dir / "evaluation_episodes.csv").string());
                std::printf("evaluation written to %s\n", eval_out.c_str());
            }
        } else if (riccati->parsed()) {
            const PlantModel plant = load_plant(plant_path);
            Eigen::VectorXd q(plant.num_subsystems());
            if (!q_list.empty() && q_uniform >= 0.0) {
                throw CLI::ValidationError("--q and --q-uniform are mutually exclusive");
            }
            if (q_uniform >= 0.0) {
                q.setConstant(q_uniform);
            } else if (!q_list.empty()) {
                std::stringstream ss(q_list);
                std::string item;
                int idx = 0;
                while (std::getline(ss, item, ',')) {
                    if (idx >= q.size()) throw CLI::ValidationError("--q has too many entries");
                    q[idx++] = std::stod(item);
                }
                if (idx != q.size()) throw CLI::ValidationError("--q has too few entries");
            } else {
                throw CLI::ValidationError("provide --q or --q-uniform");
            }
            const double margin = steady_state_margin(plant, q);
            const RiccatiSolution sol = solve_steady_state(plant, q);
            std::printf("subsystems: %d\n", plant.num_subsystems());
            std::printf("margin: %.6g%s\n", margin,
                        margin < 1.0 ? " (convergence guaranteed)" : "");
            std::printf("status: %s\n", status_text(sol.status));
            std::printf("iterations: %d\n", sol.iterations);
            std::printf("residual: %.6g\n", sol.residual);
            if (sol.status == RiccatiStatus::Converged) {
                std::printf("k_max: %.6g\n", sol.K.cwiseAbs().maxCoeff());
            }
            if (!k_out.empty() && sol.status == RiccatiStatus::Converged) {
                io::Archive ar;
                ar.put_matrix("k_infinity", sol.K);
                ar.save(k_out);
                std::printf("solution written to %s\n", k_out.c_str());
            }
        } else if (generate->parsed()) {
            ExperimentConfig cfg = config_from_options(config_path, preset);
            if (plant_seed_opt->count() > 0) cfg.plant_seed = base_seed;
            cfg.resolve_defaults();
            cfg.validate();
            const PlantModel plant = build_plant(cfg);
            save_plant(plant, system_out);
            std::printf("plant with %d subsystems written to %s\n", plant.num_subsystems(),
                        system_out.c_str());
            for (int i = 0; i < plant.num_subsystems(); ++i) {
                const double radius =
                    plant.state_block(i, i).eigenvalues().cwiseAbs().maxCoeff();
                std::printf("subsystem %d: spectral radius %.4f (%s)\n", i + 1, radius,
                            radius < 1.0 ? "stable" : "unstable");
            }
        } else if (enumerate->parsed()) {
            ExperimentConfig cfg = config_from_options(config_path, preset);
            cfg.resolve_defaults();
            cfg.validate();
            const PlantModel plant = build_plant(cfg);
            const auto channels = build_channels(cfg);
            const EvalPolicy oracle =
                make_baseline_policy(PolicyKind::OracleGreedy, plant, channels, cfg);
            const auto actions =
                enumerate_joint_actions(cfg.subsystems, cfg.channels);
            std::printf("joint actions: %zu\n", actions.size());

            Checkpoint ckpt;
            const bool with_ckpt = !ckpt_path.empty();
            if (with_ckpt) ckpt = load_checkpoint(ckpt_path);

            Rng rng(enum_seed->count() > 0 ? base_seed : 12345);
            int agree = 0;
            double oracle_sum = 0.0, greedy_sum = 0.0;
            for (int s = 0; s < samples; ++s) {
                Eigen::VectorXd x(plant.state_dim());
                for (int i = 0; i < x.size(); ++i) x[i] = cfg.x0_scale * rng.normal();
                const auto best =
                    oracle_greedy_action(plant, x, oracle.k_mat, oracle.channel_success);
                const Eigen::VectorXd q_best = closure_probs_for_action(
                    cfg.subsystems, best, oracle.channel_success);
                const double best_value =
                    schedule_objective(plant, oracle.k_mat, x, q_best);
                oracle_sum += best_value;
                if (with_ckpt) {
                    const auto sel = select_action(x, ckpt.net, cfg.subsystems, cfg.channels,
                                                   0.0, rng);
                    const Eigen::VectorXd q_sel = closure_probs_for_action(
                        cfg.subsystems, sel.action, oracle.channel_success);
                    greedy_sum += schedule_objective(plant, oracle.k_mat, x, q_sel);
                    if (sel.action == best) ++agree;
                }
            }
            std::printf("mean oracle objective: %.6g\n", oracle_sum / samples);
            if (with_ckpt) {
                std::printf("checkpoint agreement: %d/%d\n", agree, samples);
                std::printf("mean checkpoint objective: %.6g (ratio %.4f)\n",
                            greedy_sum / samples, greedy_sum / oracle_sum);
            }
        }
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
