#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "aoilab/instance.hpp"
#include "aoilab/optim.hpp"
#include "aoilab/policy.hpp"

namespace aoilab::training {

struct TrainConfig {
    std::size_t epochs = 20;
    std::size_t steps_per_epoch = 50;
    std::size_t batch_size = 64;
    double learning_rate = 1e-4;
    std::size_t m_train = 5;
    double ttest_alpha = 0.05;
    std::size_t eval_set_size = 512;
    std::uint64_t seed = 1;
    double omega = 1.2;
    double area_side = 3000.0;
    std::vector<int> node_count_choices{5, 10, 15, 20, 25, 30};
    EnvParams env;  // env.l_sub is replaced by the model's l_sub
    UavParams uav;
    policy::ModelConfig model = policy::desk_config();
    std::size_t checkpoint_every = 1;  // epochs; 0 keeps only the final checkpoint
};

TrainConfig desk_train_config();
TrainConfig full_train_config();
void validate(const TrainConfig& config);
std::string train_config_to_json(const TrainConfig& config);

// Training instances drawn from the config's distribution. Instance i uses
// seed mix_seed(seed, i).
std::vector<ProblemInstance> make_instances(const TrainConfig& config, std::uint64_t seed, std::size_t count);

enum class RolloutMode { Sample, Greedy };

struct Rollout {
    std::vector<std::vector<std::size_t>> orders;
    std::vector<double> log_probs;
    std::vector<double> costs;  // total AoI after weighted A* refinement
};

// Instance i in Sample mode draws with seed mix_seed(seed, i).
Rollout rollout_batch(const policy::Policy& policy, const std::vector<ProblemInstance>& instances,
                      RolloutMode mode, double omega, std::uint64_t seed = 0);

// Gradient of sum_i weights[i] * log P(orders[i] | instances[i]).
struct SurrogateGradient {
    std::vector<nn::Tensor> grads;
    double loss = 0.0;
};
SurrogateGradient surrogate_gradient(const policy::Policy& policy, const std::vector<ProblemInstance>& instances,
                                     const std::vector<std::vector<std::size_t>>& orders,
                                     const std::vector<double>& weights);

struct TTestResult {
    double mean_difference = 0.0;  // mean of current - baseline
    double t_statistic = 0.0;
    double p_value = 1.0;          // one-sided, H1: current < baseline
    bool significant = false;
};

TTestResult paired_t_test(const std::vector<double>& current, const std::vector<double>& baseline, double alpha);

struct StepMetrics {
    std::size_t epoch = 0;
    std::size_t step = 0;
    double mean_sample_cost = 0.0;
    double mean_greedy_cost = 0.0;
    double baseline_cost = 0.0;
    double grad_norm = 0.0;
    double loss = 0.0;
    double seconds = 0.0;
};

struct TrainerState {
    policy::Policy policy;
    policy::Policy baseline;
    nn::AdamState adam;
    std::size_t epoch = 0;
    std::size_t step = 0;  // global step counter
    std::size_t baseline_updates = 0;
    std::vector<StepMetrics> metrics;
};

TrainerState init_state(const TrainConfig& config);

// One REINFORCE update with the greedy-rollout baseline: for each instance,
// sample an order, cost it and the baseline's greedy order via weighted A*,
// and step Adam on sum_i (cost_i - baseline_i) * grad log P_i / B.
StepMetrics reinforce_step(TrainerState& state, const std::vector<ProblemInstance>& batch,
                           const TrainConfig& config, std::uint64_t sample_seed);

// Replaces the baseline with the current policy when the current policy's
// greedy costs are significantly lower on the evaluation set.
TTestResult maybe_update_baseline(TrainerState& state, const std::vector<ProblemInstance>& eval_set,
                                  const TrainConfig& config);

using ProgressFn = std::function<void(const StepMetrics&)>;

// Runs the full schedule. Writes metrics.csv, config.json, epoch_NNN.twa and
// final.twa into out_dir.
TrainerState train(const TrainConfig& config, const std::filesystem::path& out_dir,
                   const ProgressFn& progress = {});

void write_metrics_csv(const std::vector<StepMetrics>& metrics, const std::filesystem::path& path);

}  // namespace aoilab::training
