#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dira/channel.hpp"
#include "dira/config.hpp"
#include "dira/plant.hpp"
#include "dira/qnet.hpp"

namespace dira {

struct EpochRecord {
    int epoch = 0;  // 1-based
    long steps = 0;
    double mean_cost = 0.0;  // raw per-stage cost, averaged over the epoch
    double std_cost = 0.0;
    double mean_loss = 0.0;  // over minibatch updates performed this epoch
    long updates = 0;
    double epsilon_end = 0.0;
    long k_refreshes = 0;
    long k_fallbacks = 0;  // refreshes that fell back to the finite-horizon solve
    bool diverged = false;
};

struct RunLog {
    int run = 0;
    std::vector<EpochRecord> epochs;
    long steps_executed = 0;
    long transitions_stored = 0;
    bool aborted = false;  // non-finite state or weights; log is partial
    std::string abort_reason;
};

struct Checkpoint {
    int num_subsystems = 0;
    int num_channels = 0;
    QNetwork net;
    QNetwork target;
    Eigen::MatrixXd k_infinity;
    Eigen::VectorXd channel_success;    // windowed per-channel estimates
    Eigen::VectorXd subsystem_closure;  // windowed per-subsystem estimates
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct TrainResult {
    RunLog log;
    Checkpoint checkpoint;
};

PlantModel build_plant(const ExperimentConfig& cfg);
std::vector<MarkovChannel> build_channels(const ExperimentConfig& cfg);

// One training run; run_index selects the per-run seed stream. The config must
// already be resolved and valid.
TrainResult run_training(const ExperimentConfig& cfg, int run_index = 0);

// cfg.runs independent training runs on the same plant.
std::vector<TrainResult> run_many(const ExperimentConfig& cfg);

enum class PolicyKind {
    Learned,
    UniformRandom,
    StabilityWeighted,
    OracleGreedy,
    PerfectComm,
};

const char* policy_name(PolicyKind kind);
PolicyKind policy_by_name(const std::string& name);

struct EvalPolicy {
    PolicyKind kind = PolicyKind::UniformRandom;
    std::string label;
    Checkpoint checkpoint;            // Learned
    std::vector<double> weights;      // StabilityWeighted
    Eigen::MatrixXd k_mat;            // look-ahead terminal cost for baselines
    Eigen::MatrixXd gain;             // PerfectComm feedback gain
    Eigen::VectorXd channel_success;  // true per-channel average success
};

EvalPolicy make_baseline_policy(PolicyKind kind, const PlantModel& plant,
                                const std::vector<MarkovChannel>& channels,
                                const ExperimentConfig& cfg);
EvalPolicy make_learned_policy(const Checkpoint& ckpt);

struct EpisodeStats {
    int episode = 0;
    double mean_cost = 0.0;
    long steps = 0;
    bool diverged = false;
};

struct EvaluationResult {
    std::string policy;
    std::vector<EpisodeStats> episodes;
    double mean_cost = 0.0;  // across per-episode means
    double std_cost = 0.0;
    int episodes_used = 0;
    int diverged_count = 0;
    bool exclude_diverged = false;
};

EvaluationResult evaluate_policy(const EvalPolicy& policy, const ExperimentConfig& cfg,
                                 const PlantModel& plant,
                                 const std::vector<MarkovChannel>& channels,
                                 bool exclude_diverged = false);

// learning_curve.csv: one row per (run, epoch) with per-run statistics plus
// across-run aggregate columns (mean and mean +/- 2 std) for that epoch.
void emit_learning_curve(const std::vector<RunLog>& logs, const std::string& path);
void emit_evaluation_csv(const std::vector<EvaluationResult>& results,
                         const std::string& path);
void emit_episode_csv(const std::vector<EvaluationResult>& results,
                      const std::string& path);
void emit_summary(const std::vector<RunLog>& logs,
                  const std::vector<EvaluationResult>& results,
                  const std::string& path);

// Writes learning_curve.csv, evaluation.csv, evaluation_episodes.csv and
// summary.txt under out_dir. Evaluation files are skipped when `results` is
// empty; an empty `logs` list is an error.
void emit_results(const std::vector<RunLog>& logs,
                  const std::vector<EvaluationResult>& results,
                  const std::string& out_dir);

}  // namespace dira
