#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "aoilab/autodiff.hpp"
#include "aoilab/instance.hpp"
#include "aoilab/optim.hpp"
#include "aoilab/rng.hpp"
#include "aoilab/router.hpp"

namespace aoilab::policy {

struct ModelConfig {
    std::size_t d_em = 512;
    std::size_t d_v = 64;
    std::size_t heads = 8;
    std::size_t encoder_layers = 6;
    std::size_t decoder_layers = 2;
    std::size_t ffn_hidden = 0;  // 0 means 4 * d_em
    double clip_c = 10.0;
    int l_sub = 5;
    double coord_scale = 3000.0;
    double count_scale = 30.0;

    std::size_t ffn_width() const { return ffn_hidden == 0 ? 4 * d_em : ffn_hidden; }
    // Width of one cluster's input row: L_sub^2 grid points and the CH as
    // (x, y, z), then the node count.
    std::size_t feature_width() const { return 3 * (static_cast<std::size_t>(l_sub * l_sub) + 1) + 1; }

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

ModelConfig full_config();
ModelConfig desk_config();
void validate(const ModelConfig& config);
std::string config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const std::string& text);

// Learnable weights. Matrices are stored input-major (rows = input width) so a
// layer is x * W for row vectors x.
class Policy {
public:
    Policy(ModelConfig config, std::uint64_t seed);
    Policy(ModelConfig config, nn::ParamStore params);

    const ModelConfig& config() const { return config_; }
    nn::ParamStore& params() { return params_; }
    const nn::ParamStore& params() const { return params_; }

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    ModelConfig config_;
    nn::ParamStore params_;
};

void save_policy(const Policy& policy, const std::filesystem::path& path);
Policy load_policy(const std::filesystem::path& path);
nn::NamedTensors policy_entries(const Policy& policy);

// Input rows: the start point (1 x 3) and one row per cluster (M x feature_width).
nn::Tensor start_features(const ProblemInstance& inst, const ModelConfig& config);
nn::Tensor cluster_features(const ProblemInstance& inst, const ModelConfig& config);

// Sinusoidal position code, 1 x d.
nn::Tensor positional_encoding(std::size_t position, std::size_t d);

// The policy's weights placed on a tape: as gradient-carrying parameters when
// the tape records, as constants otherwise.
class Network {
public:
    Network(const Policy& policy, nn::Tape& tape);

    const ModelConfig& config() const { return *config_; }
    nn::Tape& tape() const { return *tape_; }
    nn::Var param(const std::string& name) const;
    const std::vector<nn::Var>& param_vars() const { return vars_; }

    nn::Var embed(const nn::Tensor& start_row, const nn::Tensor& cluster_rows) const;
    nn::Var embed(const ProblemInstance& inst) const;
    nn::Var encode(nn::Var embeddings) const;
    // Multi-head attention; masked key columns get no weight. When `weights`
    // is given, each head's attention matrix is appended to it.
    nn::Var attention(const std::string& prefix, nn::Var queries, nn::Var keys, nn::Var values,
                      const std::vector<bool>* key_mask = nullptr,
                      std::vector<nn::Var>* weights = nullptr) const;
    // Same, with keys and values already multiplied by the block's wk / wv.
    nn::Var attention_projected(const std::string& prefix, nn::Var queries, nn::Var key_proj,
                                nn::Var value_proj, const std::vector<bool>* key_mask = nullptr,
                                std::vector<nn::Var>* weights = nullptr) const;

private:
    const ModelConfig* config_;
    const nn::ParamStore* store_;
    nn::Tape* tape_;
    std::vector<nn::Var> vars_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Incremental decoder over one encoded instance. Element 0 is the start point,
// element m the m-th cluster. Copies share the tape and branch independently.
class DecoderSession {
public:
    DecoderSession(const Network& net, nn::Var encoded);

    // Appends `element` to the decoded prefix and returns the distribution
    // (1 x (M+1)) over the next element. The first call must pass 0.
    nn::Var advance(std::size_t element);

    const std::vector<bool>& visited() const { return visited_; }
    const std::vector<std::size_t>& prefix() const { return prefix_; }
    std::size_t element_count() const { return visited_.size(); }
    bool done() const { return prefix_.size() == visited_.size(); }

private:
    const Network* net_;
    nn::Var encoded_;
    nn::Var head_keys_;
    std::vector<nn::Var> cross_keys_;
    std::vector<nn::Var> cross_values_;
    std::vector<std::vector<nn::Var>> layer_inputs_;  // [layer][position], 1 x d_em
    std::vector<bool> visited_;
    std::vector<std::size_t> prefix_;
};

struct DecodeResult {
    std::vector<std::size_t> order;  // 0-based cluster indices
    double log_prob = 0.0;
};

DecodeResult decode_greedy(const Policy& policy, const ProblemInstance& inst);

struct SampleOptions {
    std::size_t width = 1;
    std::uint64_t seed = 0;
    double omega = 1.2;
    bool max_probability = false;  // pick the most likely sample instead of the cheapest
};

struct SampleResult {
    DecodeResult best;
    router::Solution solution;
    std::vector<DecodeResult> samples;
};

SampleResult decode_sample(const Policy& policy, const ProblemInstance& inst, const SampleOptions& options);

// Draws one order on the network's tape, returning the differentiable
// log-probability alongside it.
struct TapedSample {
    std::vector<std::size_t> order;
    nn::Var log_prob;
};
TapedSample sample_order(const Network& net, const ProblemInstance& inst, Rng& rng);

DecodeResult decode_beam(const Policy& policy, const ProblemInstance& inst, std::size_t width);

// Chain-rule log-probability of a complete order. Throws ParameterError if the
// order is not a permutation of the clusters.
nn::Var log_prob(const Network& net, const ProblemInstance& inst, const std::vector<std::size_t>& order);
double log_prob(const Policy& policy, const ProblemInstance& inst, const std::vector<std::size_t>& order);

// Next-element distribution after the given prefix of cluster indices.
std::vector<double> next_distribution(const Policy& policy, const ProblemInstance& inst,
                                      const std::vector<std::size_t>& prefix);

}  // namespace aoilab::policy
