#include "aoilab/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "aoilab/errors.hpp"
#include "aoilab/parallel.hpp"
#include "aoilab/router.hpp"

namespace aoilab::training {

namespace {

constexpr std::uint64_t kTrainStream = 0x747261696e;
constexpr std::uint64_t kEvalStream = 0x6576616c;
constexpr std::uint64_t kSampleStream = 0x73616d70;

std::vector<nn::Tensor> zero_grads(const nn::ParamStore& params) {
    std::vector<nn::Tensor> g;
    for (const auto& p : params.values()) {
        g.emplace_back(p.shape(), 0.0);
    }
    return g;
}

void accumulate(std::vector<nn::Tensor>& into, const std::vector<nn::Tensor>& from) {
    for (std::size_t k = 0; k < into.size(); ++k) {
        for (std::size_t i = 0; i < into[k].size(); ++i) {
            into[k][i] += from[k][i];
        }
    }
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TrainConfig desk_train_config() { return {}; }

TrainConfig full_train_config() {
    TrainConfig c;
    c.epochs = 200;
    c.steps_per_epoch = 1000;
    c.batch_size = 512;
    c.m_train = 10;
    c.model = policy::full_config();
    return c;
}

void validate(const TrainConfig& c) {
    std::vector<std::string> bad;
    if (c.epochs == 0) bad.push_back("epochs");
    if (c.steps_per_epoch == 0) bad.push_back("steps_per_epoch");
    if (c.batch_size == 0) bad.push_back("batch_size");
    if (!(c.learning_rate > 0.0)) bad.push_back("learning_rate");
    if (c.m_train == 0) bad.push_back("m_train");
    if (!(c.ttest_alpha > 0.0 && c.ttest_alpha < 1.0)) bad.push_back("ttest_alpha");
    if (c.eval_set_size < 2) bad.push_back("eval_set_size");
    if (!(c.omega >= 1.0)) bad.push_back("omega");
    if (!(c.area_side > 0.0)) bad.push_back("area_side");
    if (c.node_count_choices.empty()) bad.push_back("node_count_choices");
    for (int n : c.node_count_choices) {
        if (n < 1) {
            bad.push_back("node_count_choices");
            break;
        }
    }
    if (!bad.empty()) {
        std::string msg = "invalid training config:";
        for (const auto& b : bad) {
            msg += " " + b;
        }
        throw ParameterError(msg);
    }
    policy::validate(c.model);
    EnvParams env = c.env;
    env.l_sub = c.model.l_sub;
    aoilab::validate(env);
    aoilab::validate(c.uav);
}

std::string train_config_to_json(const TrainConfig& c) {
    nlohmann::json j = {{"epochs", c.epochs},
                        {"steps_per_epoch", c.steps_per_epoch},
                        {"batch_size", c.batch_size},
                        {"learning_rate", c.learning_rate},
                        {"m_train", c.m_train},
                        {"ttest_alpha", c.ttest_alpha},
                        {"eval_set_size", c.eval_set_size},
                        {"seed", c.seed},
                        {"omega", c.omega},
                        {"area_side", c.area_side},
                        {"node_count_choices", c.node_count_choices},
                        {"gamma_th_db", linear_to_db(c.env.snr_threshold)},
                        {"model", nlohmann::json::parse(policy::config_to_json(c.model))}};
    return j.dump(2);
}

std::vector<ProblemInstance> make_instances(const TrainConfig& config, std::uint64_t seed, std::size_t count) {
    EnvParams env = config.env;
    env.l_sub = config.model.l_sub;
    std::vector<ProblemInstance> out(count);
    parallel_for(count, [&](std::size_t i) {
        out[i] = generate_instance(mix_seed(seed, i), config.m_train, config.area_side, config.node_count_choices,
                                   env, config.uav);
    });
    return out;
}

Rollout rollout_batch(const policy::Policy& pol, const std::vector<ProblemInstance>& instances, RolloutMode mode,
                      double omega, std::uint64_t seed) {
    if (instances.empty()) {
        throw ParameterError("rollout needs at least one instance");
    }
    const std::size_t n = instances.size();
    Rollout r;
    r.orders.resize(n);
    r.log_probs.resize(n);
    r.costs.resize(n);
    parallel_for(n, [&](std::size_t i) {
        policy::DecodeResult d;
        if (mode == RolloutMode::Greedy) {
            d = policy::decode_greedy(pol, instances[i]);
        } else {
            nn::Tape tape(false);
            policy::Network net(pol, tape);
            Rng rng(mix_seed(seed, i), kSampleStream);
            policy::TapedSample s = policy::sample_order(net, instances[i], rng);
            d = {s.order, s.log_prob.value().item()};
        }
        r.costs[i] = router::refine_order(instances[i], d.order, omega).total_aoi;
        r.orders[i] = std::move(d.order);
        r.log_probs[i] = d.log_prob;
    });
    return r;
}

SurrogateGradient surrogate_gradient(const policy::Policy& pol, const std::vector<ProblemInstance>& instances,
                                     const std::vector<std::vector<std::size_t>>& orders,
                                     const std::vector<double>& weights) {
    const std::size_t n = instances.size();
    if (orders.size() != n || weights.size() != n) {
        throw DimensionError("surrogate gradient: " + std::to_string(n) + " instances, " +
                             std::to_string(orders.size()) + " orders, " + std::to_string(weights.size()) +
                             " weights");
    }
    std::vector<std::vector<nn::Tensor>> per(n);
    std::vector<double> losses(n);
    parallel_for(n, [&](std::size_t i) {
        nn::Tape tape(true);
        policy::Network net(pol, tape);
        nn::Var loss = nn::scale(policy::log_prob(net, instances[i], orders[i]), weights[i]);
        losses[i] = loss.value().item();
        tape.backward(loss);
        for (const auto& v : net.param_vars()) {
            per[i].push_back(tape.grad(v));
        }
    });
    SurrogateGradient out{zero_grads(pol.params()), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        accumulate(out.grads, per[i]);
        out.loss += losses[i];
    }
    return out;
}

TTestResult paired_t_test(const std::vector<double>& current, const std::vector<double>& baseline, double alpha) {
    if (current.size() != baseline.size()) {
        throw DimensionError("paired t-test: " + std::to_string(current.size()) + " vs " +
                             std::to_string(baseline.size()) + " samples");
    }
    if (current.size() < 2) {
        throw ParameterError("paired t-test needs at least two pairs");
    }
    const std::size_t n = current.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = current[i] - baseline[i];
    }
    TTestResult r;
    r.mean_difference = mean(d);
    double ss = 0.0;
    for (double x : d) {
        ss += (x - r.mean_difference) * (x - r.mean_difference);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) {
        r.significant = r.mean_difference < 0.0;
        r.t_statistic = r.mean_difference < 0.0   ? -std::numeric_limits<double>::infinity()
                        : r.mean_difference > 0.0 ? std::numeric_limits<double>::infinity()
                                                  : 0.0;
        r.p_value = r.significant ? 0.0 : 1.0;
        return r;
    }
    r.t_statistic = r.mean_difference / (sd / std::sqrt(static_cast<double>(n)));
    boost::math::students_t dist(static_cast<double>(n - 1));
    r.p_value = boost::math::cdf(dist, r.t_statistic);
    r.significant = r.p_value < alpha;
    return r;
}

TrainerState init_state(const TrainConfig& config) {
    validate(config);
    policy::Policy p(config.model, mix_seed(config.seed, 0x696e6974));
    nn::AdamConfig adam;
    adam.learning_rate = config.learning_rate;
    return TrainerState{p, p, nn::AdamState(p.params().values(), adam), 0, 0, 0, {}};
}

StepMetrics reinforce_step(TrainerState& state, const std::vector<ProblemInstance>& batch, const TrainConfig& config,
                           std::uint64_t sample_seed) {
    if (batch.empty()) {
        throw ParameterError("training batch is empty");
    }
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = batch.size();
    const double inv_b = 1.0 / static_cast<double>(n);
    std::vector<double> sample_cost(n), greedy_cost(n), baseline_cost(n), loss(n);
    std::vector<std::vector<nn::Tensor>> per(n);
    const policy::Policy& current = state.policy;
    const policy::Policy& baseline = state.baseline;

    // Gradients are kept per instance and summed in index order, so the update
    // does not depend on how instances were spread over threads.
    parallel_for(n, [&](std::size_t i) {
        const ProblemInstance& inst = batch[i];
        const policy::DecodeResult bl = policy::decode_greedy(baseline, inst);
        baseline_cost[i] = router::refine_order(inst, bl.order, config.omega).total_aoi;
        const policy::DecodeResult gr = policy::decode_greedy(current, inst);
        greedy_cost[i] = router::refine_order(inst, gr.order, config.omega).total_aoi;

        nn::Tape tape(true);
        policy::Network net(current, tape);
        Rng rng(mix_seed(sample_seed, i), kSampleStream);
        policy::TapedSample s = policy::sample_order(net, inst, rng);
        sample_cost[i] = router::refine_order(inst, s.order, config.omega).total_aoi;
        const double advantage = sample_cost[i] - baseline_cost[i];
        nn::Var l = nn::scale(s.log_prob, advantage * inv_b);
        loss[i] = l.value().item();
        tape.backward(l);
        for (const auto& v : net.param_vars()) {
            per[i].push_back(tape.grad(v));
        }
    });

    std::vector<nn::Tensor> grads = zero_grads(current.params());
    double total_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        accumulate(grads, per[i]);
        total_loss += loss[i];
    }
    const double norm = nn::global_norm(grads);
    if (!std::isfinite(total_loss) || !std::isfinite(norm)) {
        throw ContractError("non-finite loss or gradient at epoch " + std::to_string(state.epoch) + ", step " +
                            std::to_string(state.step) + " (loss " + fmt(total_loss) + ", grad norm " +
                            fmt(norm) + ")");
    }
    nn::adam_step(state.policy.params().values(), grads, state.adam);

    StepMetrics m;
    m.epoch = state.epoch;
    m.step = state.step;
    m.mean_sample_cost = mean(sample_cost);
    m.mean_greedy_cost = mean(greedy_cost);
    m.baseline_cost = mean(baseline_cost);
    m.grad_norm = norm;
    m.loss = total_loss;
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ++state.step;
    state.metrics.push_back(m);
    return m;
}

TTestResult maybe_update_baseline(TrainerState& state, const std::vector<ProblemInstance>& eval_set,
                                  const TrainConfig& config) {
    const Rollout cur = rollout_batch(state.policy, eval_set, RolloutMode::Greedy, config.omega);
    const Rollout bl = rollout_batch(state.baseline, eval_set, RolloutMode::Greedy, config.omega);
    const TTestResult t = paired_t_test(cur.costs, bl.costs, config.ttest_alpha);
    if (t.significant) {
        state.baseline = state.policy;
        ++state.baseline_updates;
    }
    return t;
}

void write_metrics_csv(const std::vector<StepMetrics>& metrics, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw IoError("cannot write " + path.string());
    }
    f << "epoch,step,mean_sample_cost,mean_greedy_cost,baseline_cost,grad_norm,seconds\n";
    for (const auto& m : metrics) {
        f << m.epoch << ',' << m.step << ',' << fmt(m.mean_sample_cost) << ',' << fmt(m.mean_greedy_cost) << ','
          << fmt(m.baseline_cost) << ',' << fmt(m.grad_norm) << ',' << fmt(m.seconds) << '\n';
    }
    if (!f) {
        throw IoError("failed writing " + path.string());
    }
}

TrainerState train(const TrainConfig& config, const std::filesystem::path& out_dir, const ProgressFn& progress) {
    TrainerState state = init_state(config);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }
    {
        std::ofstream f(out_dir / "config.json", std::ios::trunc);
        if (!f) {
            throw IoError("cannot write " + (out_dir / "config.json").string());
        }
        f << train_config_to_json(config) << '\n';
    }
    const std::uint64_t train_seed = mix_seed(config.seed, kTrainStream);
    for (std::size_t e = 0; e < config.epochs; ++e) {
        state.epoch = e;
        for (std::size_t s = 0; s < config.steps_per_epoch; ++s) {
            const std::uint64_t step_seed = mix_seed(train_seed, state.step);
            const auto batch = make_instances(config, step_seed, config.batch_size);
            const StepMetrics m = reinforce_step(state, batch, config, mix_seed(step_seed, kSampleStream));
            if (progress) {
                progress(m);
            }
        }
        const auto eval_set = make_instances(config, mix_seed(mix_seed(config.seed, kEvalStream), e),
                                             config.eval_set_size);
        maybe_update_baseline(state, eval_set, config);
        if (config.checkpoint_every != 0 && (e + 1) % config.checkpoint_every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "epoch_%03zu.twa", e + 1);
            policy::save_policy(state.policy, out_dir / name);
        }
        write_metrics_csv(state.metrics, out_dir / "metrics.csv");
    }
    policy::save_policy(state.policy, out_dir / "final.twa");
    write_metrics_csv(state.metrics, out_dir / "metrics.csv");
    return state;
}

}  // namespace aoilab::training
