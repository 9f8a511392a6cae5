#include "aoilab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "aoilab/errors.hpp"
#include "aoilab/tour.hpp"

namespace aoilab::policy {

using nn::Tensor;
using nn::Var;
using json = nlohmann::json;

ModelConfig full_config() { return {}; }

ModelConfig desk_config() {
    ModelConfig c;
    c.d_em = 64;
    c.d_v = 8;
    c.heads = 8;
    c.encoder_layers = 2;
    c.decoder_layers = 1;
    c.l_sub = 2;
    return c;
}

void validate(const ModelConfig& c) {
    std::vector<std::string> bad;
    if (c.d_em == 0) bad.push_back("d_em");
    if (c.d_v == 0) bad.push_back("d_v");
    if (c.heads == 0) bad.push_back("heads");
    if (c.encoder_layers == 0) bad.push_back("encoder_layers");
    if (c.decoder_layers == 0) bad.push_back("decoder_layers");
    if (!(c.clip_c > 0.0)) bad.push_back("clip_c");
    if (c.l_sub < 1) bad.push_back("l_sub");
    if (!(c.coord_scale > 0.0)) bad.push_back("coord_scale");
    if (!(c.count_scale > 0.0)) bad.push_back("count_scale");
    if (!bad.empty()) {
        std::string msg = "invalid model config:";
        for (const auto& b : bad) {
            msg += " " + b;
        }
        throw ParameterError(msg);
    }
}

std::string config_to_json(const ModelConfig& c) {
    json j = {{"d_em", c.d_em},
              {"d_v", c.d_v},
              {"heads", c.heads},
              {"encoder_layers", c.encoder_layers},
              {"decoder_layers", c.decoder_layers},
              {"ffn_hidden", c.ffn_hidden},
              {"clip_c", c.clip_c},
              {"l_sub", c.l_sub},
              {"coord_scale", c.coord_scale},
              {"count_scale", c.count_scale}};
    return j.dump();
}

ModelConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError("config", std::string("model config is not JSON: ") + e.what());
    }
    ModelConfig c;
    auto read = [&](const char* key, auto& field) {
        if (!j.contains(key)) {
            throw SchemaError(key, std::string("model config lacks '") + key + "'");
        }
        try {
            j.at(key).get_to(field);
        } catch (const json::exception&) {
            throw SchemaError(key, std::string("model config field '") + key + "' has the wrong type");
        }
    };
    read("d_em", c.d_em);
    read("d_v", c.d_v);
    read("heads", c.heads);
    read("encoder_layers", c.encoder_layers);
    read("decoder_layers", c.decoder_layers);
    read("ffn_hidden", c.ffn_hidden);
    read("clip_c", c.clip_c);
    read("l_sub", c.l_sub);
    read("coord_scale", c.coord_scale);
    read("count_scale", c.count_scale);
    validate(c);
    return c;
}

namespace {

struct Shape {
    std::string name;
    std::size_t rows;
    std::size_t cols;
    enum Kind { Weight, Gain, Bias } kind;
    std::size_t fan_in;
};

void attention_shapes(std::vector<Shape>& out, const std::string& p, const ModelConfig& c) {
    const std::size_t hv = c.heads * c.d_v;
    out.push_back({p + ".wq", c.d_em, hv, Shape::Weight, c.d_em});
    out.push_back({p + ".wk", c.d_em, hv, Shape::Weight, c.d_em});
    out.push_back({p + ".wv", c.d_em, hv, Shape::Weight, c.d_em});
    out.push_back({p + ".wo", hv, c.d_em, Shape::Weight, hv});
}

void norm_shapes(std::vector<Shape>& out, const std::string& p, const ModelConfig& c) {
    out.push_back({p + ".g", 1, c.d_em, Shape::Gain, 0});
    out.push_back({p + ".b", 1, c.d_em, Shape::Bias, 0});
}

std::vector<Shape> layout(const ModelConfig& c) {
    std::vector<Shape> s;
    const std::size_t f = c.feature_width();
    s.push_back({"embed.start.w", 3, c.d_em, Shape::Weight, 3});
    s.push_back({"embed.start.b", 1, c.d_em, Shape::Weight, 3});
    s.push_back({"embed.cluster.w", f, c.d_em, Shape::Weight, f});
    s.push_back({"embed.cluster.b", 1, c.d_em, Shape::Weight, f});
    for (std::size_t l = 0; l < c.encoder_layers; ++l) {
        const std::string p = "enc" + std::to_string(l);
        attention_shapes(s, p + ".attn", c);
        norm_shapes(s, p + ".norm1", c);
        s.push_back({p + ".ffn.w1", c.d_em, c.ffn_width(), Shape::Weight, c.d_em});
        s.push_back({p + ".ffn.b1", 1, c.ffn_width(), Shape::Weight, c.d_em});
        s.push_back({p + ".ffn.w2", c.ffn_width(), c.d_em, Shape::Weight, c.ffn_width()});
        s.push_back({p + ".ffn.b2", 1, c.d_em, Shape::Weight, c.ffn_width()});
        norm_shapes(s, p + ".norm2", c);
    }
    for (std::size_t l = 0; l < c.decoder_layers; ++l) {
        const std::string p = "dec" + std::to_string(l);
        attention_shapes(s, p + ".self", c);
        norm_shapes(s, p + ".norm1", c);
        attention_shapes(s, p + ".cross", c);
        norm_shapes(s, p + ".norm2", c);
    }
    s.push_back({"head.wq", c.d_em, c.d_em, Shape::Weight, c.d_em});
    s.push_back({"head.wk", c.d_em, c.d_em, Shape::Weight, c.d_em});
    return s;
}

nn::ParamStore initial_params(const ModelConfig& c, std::uint64_t seed) {
    nn::ParamStore store;
    Rng rng(seed, 0x706f6c);
    for (const auto& sh : layout(c)) {
        Tensor t = Tensor::matrix(sh.rows, sh.cols, sh.kind == Shape::Gain ? 1.0 : 0.0);
        if (sh.kind == Shape::Weight) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(sh.fan_in));
            for (auto& v : t.values()) {
                v = rng.uniform(-bound, bound);
            }
        }
        store.add(sh.name, std::move(t));
    }
    return store;
}

}  // namespace

Policy::Policy(ModelConfig config, std::uint64_t seed) : config_(config) {
    validate(config_);
    params_ = initial_params(config_, seed);
}

Policy::Policy(ModelConfig config, nn::ParamStore params) : config_(config) {
    validate(config_);
    const auto shapes = layout(config_);
    if (params.size() != shapes.size()) {
        throw ParameterError("policy expects " + std::to_string(shapes.size()) + " parameter tensors, got " +
                             std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const Tensor& t = params[i];
        if (params.name(i) != shapes[i].name || t.rows() != shapes[i].rows || t.cols() != shapes[i].cols) {
            throw ParameterError("parameter '" + params.name(i) + "' " + t.shape_string() +
                                 " does not match the expected '" + shapes[i].name + "'");
        }
    }
    params_ = std::move(params);
}

nn::NamedTensors policy_entries(const Policy& policy) {
    nn::NamedTensors entries;
    entries.emplace_back("config", nn::text_tensor(config_to_json(policy.config())));
    const auto& store = policy.params();
    for (std::size_t i = 0; i < store.size(); ++i) {
        if (!store[i].all_finite()) {
            throw ContractError("parameter '" + store.name(i) + "' holds non-finite values");
        }
        entries.emplace_back(store.name(i), store[i]);
    }
    return entries;
}

void save_policy(const Policy& policy, const std::filesystem::path& path) {
    nn::save_checkpoint(path, policy_entries(policy));
}

Policy load_policy(const std::filesystem::path& path) {
    const auto entries = nn::load_checkpoint(path);
    auto cfg = std::find_if(entries.begin(), entries.end(), [](const auto& e) { return e.first == "config"; });
    if (cfg == entries.end()) {
        throw IoError("checkpoint " + path.string() + " has no model config");
    }
    const ModelConfig config = config_from_json(nn::tensor_text(cfg->second));
    nn::ParamStore store;
    for (const auto& [name, t] : entries) {
        if (name == "config") {
            continue;
        }
        if (!t.all_finite()) {
            throw IoError("checkpoint parameter '" + name + "' holds non-finite values");
        }
        store.add(name, t);
    }
    try {
        return Policy(config, std::move(store));
    } catch (const ParameterError& e) {
        throw IoError("checkpoint " + path.string() + ": " + e.what());
    }
}

Tensor start_features(const ProblemInstance& inst, const ModelConfig& c) {
    const Vec3& s = inst.scenario.start;
    return Tensor({1, 3}, {s.x / c.coord_scale, s.y / c.coord_scale, s.z / c.coord_scale});
}

Tensor cluster_features(const ProblemInstance& inst, const ModelConfig& c) {
    const std::size_t m = inst.size();
    const std::size_t f = c.feature_width();
    const std::size_t slots = static_cast<std::size_t>(c.l_sub * c.l_sub);
    if (inst.grids.size() != m) {
        throw DimensionError("instance has " + std::to_string(inst.grids.size()) + " grids for " +
                             std::to_string(m) + " clusters");
    }
    Tensor out = Tensor::matrix(m, f);
    for (std::size_t i = 0; i < m; ++i) {
        const CandidateGrid& g = inst.grids[i];
        const GroundCluster& cl = inst.scenario.clusters[i];
        for (std::size_t k = 0; k < slots; ++k) {
            const Vec3& p = k < g.points.size() ? g.points[k] : g.center;
            out(i, 3 * k) = p.x / c.coord_scale;
            out(i, 3 * k + 1) = p.y / c.coord_scale;
            out(i, 3 * k + 2) = p.z / c.coord_scale;
        }
        out(i, 3 * slots) = cl.ch_position.x / c.coord_scale;
        out(i, 3 * slots + 1) = cl.ch_position.y / c.coord_scale;
        out(i, 3 * slots + 2) = 0.0;
        out(i, f - 1) = static_cast<double>(cl.node_count) / c.count_scale;
    }
    return out;
}

Tensor positional_encoding(std::size_t position, std::size_t d) {
    Tensor pe = Tensor::matrix(1, d);
    for (std::size_t i = 0; i < d; ++i) {
        const double freq = 1.0 / std::pow(10000.0, static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
        const double angle = static_cast<double>(position) * freq;
        pe[i] = i % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
    return pe;
}

Network::Network(const Policy& policy, nn::Tape& tape)
    : config_(&policy.config()), store_(&policy.params()), tape_(&tape) {
    const auto& store = policy.params();
    for (std::size_t i = 0; i < store.size(); ++i) {
        vars_.push_back(tape.recording() ? tape.parameter(store[i]) : tape.constant(store[i]));
        index_.emplace(store.name(i), i);
    }
}

Var Network::param(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
        throw IndexError("no parameter named '" + name + "'");
    }
    return vars_[it->second];
}

Var Network::embed(const Tensor& start_row, const Tensor& cluster_rows) const {
    const std::size_t f = config_->feature_width();
    if (start_row.cols() != 3 || start_row.rows() != 1) {
        throw DimensionError("start features must be 1x3, got " + start_row.shape_string());
    }
    if (cluster_rows.cols() != f) {
        throw DimensionError("cluster features " + cluster_rows.shape_string() + " do not match width " +
                             std::to_string(f));
    }
    Var s = nn::add_row(nn::matmul(tape_->constant(start_row), param("embed.start.w")), param("embed.start.b"));
    Var c = nn::add_row(nn::matmul(tape_->constant(cluster_rows), param("embed.cluster.w")),
                        param("embed.cluster.b"));
    return nn::concat_rows({s, c});
}

Var Network::embed(const ProblemInstance& inst) const {
    return embed(start_features(inst, *config_), cluster_features(inst, *config_));
}

Var Network::attention_projected(const std::string& prefix, Var queries, Var key_proj, Var value_proj,
                                 const std::vector<bool>* key_mask, std::vector<Var>* weights) const {
    const std::size_t dv = config_->d_v;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dv));
    Var q = nn::matmul(queries, param(prefix + ".wq"));
    std::vector<Var> heads;
    heads.reserve(config_->heads);
    for (std::size_t h = 0; h < config_->heads; ++h) {
        Var qh = nn::slice_cols(q, h * dv, dv);
        Var kh = nn::slice_cols(key_proj, h * dv, dv);
        Var vh = nn::slice_cols(value_proj, h * dv, dv);
        Var scores = nn::scale(nn::matmul_nt(qh, kh), inv_sqrt);
        if (key_mask != nullptr) {
            scores = nn::masked_fill(scores, *key_mask, -std::numeric_limits<double>::infinity());
        }
        Var w = nn::softmax_rows(scores);
        if (weights != nullptr) {
            weights->push_back(w);
        }
        heads.push_back(nn::matmul(w, vh));
    }
    return nn::matmul(nn::concat_cols(heads), param(prefix + ".wo"));
}

Var Network::attention(const std::string& prefix, Var queries, Var keys, Var values,
                       const std::vector<bool>* key_mask, std::vector<Var>* weights) const {
    return attention_projected(prefix, queries, nn::matmul(keys, param(prefix + ".wk")),
                               nn::matmul(values, param(prefix + ".wv")), key_mask, weights);
}

Var Network::encode(Var x) const {
    if (x.value().cols() != config_->d_em) {
        throw DimensionError("encoder input " + x.value().shape_string() + " does not have width d_em = " +
                             std::to_string(config_->d_em));
    }
    for (std::size_t l = 0; l < config_->encoder_layers; ++l) {
        const std::string p = "enc" + std::to_string(l);
        Var a = attention(p + ".attn", x, x, x);
        x = nn::batch_norm_tokens(nn::add(x, a), param(p + ".norm1.g"), param(p + ".norm1.b"));
        Var hidden = nn::relu(nn::add_row(nn::matmul(x, param(p + ".ffn.w1")), param(p + ".ffn.b1")));
        Var f = nn::add_row(nn::matmul(hidden, param(p + ".ffn.w2")), param(p + ".ffn.b2"));
        x = nn::batch_norm_tokens(nn::add(x, f), param(p + ".norm2.g"), param(p + ".norm2.b"));
    }
    return x;
}

DecoderSession::DecoderSession(const Network& net, Var encoded)
    : net_(&net), encoded_(encoded), visited_(encoded.value().rows(), false) {
    const ModelConfig& c = net.config();
    head_keys_ = nn::matmul(encoded, net.param("head.wk"));
    for (std::size_t l = 0; l < c.decoder_layers; ++l) {
        const std::string p = "dec" + std::to_string(l) + ".cross";
        cross_keys_.push_back(nn::matmul(encoded, net.param(p + ".wk")));
        cross_values_.push_back(nn::matmul(encoded, net.param(p + ".wv")));
    }
    layer_inputs_.resize(c.decoder_layers);
}

Var DecoderSession::advance(std::size_t element) {
    if (element >= visited_.size()) {
        throw IndexError("element " + std::to_string(element) + " outside 0.." +
                         std::to_string(visited_.size() - 1));
    }
    if (prefix_.empty() ? element != 0 : visited_[element]) {
        throw ContractError(prefix_.empty() ? "decoding must begin at the start element"
                                            : "element " + std::to_string(element) + " already visited");
    }
    if (prefix_.size() + 1 >= visited_.size()) {
        throw ContractError("no unvisited element left to score");
    }
    const ModelConfig& c = net_->config();
    nn::Tape& tape = net_->tape();
    const std::size_t position = prefix_.size();
    prefix_.push_back(element);
    visited_[element] = true;

    Var x = nn::add(nn::slice_rows(encoded_, element, 1), tape.constant(positional_encoding(position, c.d_em)));
    for (std::size_t l = 0; l < c.decoder_layers; ++l) {
        const std::string p = "dec" + std::to_string(l);
        layer_inputs_[l].push_back(x);
        Var context = nn::concat_rows(layer_inputs_[l]);
        Var s = net_->attention(p + ".self", x, context, context);
        x = nn::layer_norm(nn::add(x, s), net_->param(p + ".norm1.g"), net_->param(p + ".norm1.b"));
        Var a = net_->attention_projected(p + ".cross", x, cross_keys_[l], cross_values_[l], &visited_);
        x = nn::layer_norm(nn::add(x, a), net_->param(p + ".norm2.g"), net_->param(p + ".norm2.b"));
    }
    Var q = nn::matmul(x, net_->param("head.wq"));
    Var u = nn::scale(nn::tanh(nn::scale(nn::matmul_nt(q, head_keys_), 1.0 / std::sqrt(double(c.d_em)))), c.clip_c);
    return nn::softmax_rows(nn::masked_fill(u, visited_, -std::numeric_limits<double>::infinity()));
}

namespace {

Var encode_instance(const Network& net, const ProblemInstance& inst) { return net.encode(net.embed(inst)); }

std::vector<std::size_t> to_clusters(const std::vector<std::size_t>& elements) {
    std::vector<std::size_t> order;
    for (std::size_t e : elements) {
        if (e != 0) {
            order.push_back(e - 1);
        }
    }
    return order;
}

std::size_t last_unvisited(const std::vector<bool>& visited) {
    for (std::size_t j = visited.size(); j-- > 0;) {
        if (!visited[j]) {
            return j;
        }
    }
    throw ContractError("no unvisited element left");
}

std::size_t draw(const Tensor& probs, const std::vector<bool>& visited, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (visited[j]) {
            continue;
        }
        acc += probs[j];
        if (u < acc) {
            return j;
        }
    }
    return last_unvisited(visited);
}

std::size_t argmax(const Tensor& probs, const std::vector<bool>& visited) {
    std::size_t best = probs.size();
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (!visited[j] && (best == probs.size() || probs[j] > probs[best])) {
            best = j;
        }
    }
    return best;
}

// Runs a session to completion, choosing each element with `pick`. Returns the
// element sequence (without the start) and fills the per-step chosen
// probabilities on the tape.
template <typename Pick>
std::vector<std::size_t> roll(DecoderSession session, Pick pick, std::vector<Var>& chosen) {
    std::size_t next = 0;
    std::vector<std::size_t> elements;
    while (true) {
        Var probs = session.advance(next);
        next = pick(probs.value(), session.visited());
        chosen.push_back(nn::pick(probs, 0, next));
        elements.push_back(next);
        if (session.prefix().size() + 1 == session.element_count()) {
            break;
        }
    }
    return elements;
}

double sum_logs(const std::vector<Var>& chosen) {
    double s = 0.0;
    for (const Var& p : chosen) {
        s += std::log(p.value().item());
    }
    return s;
}

}  // namespace

DecodeResult decode_greedy(const Policy& policy, const ProblemInstance& inst) {
    nn::Tape tape(false);
    Network net(policy, tape);
    DecoderSession session(net, encode_instance(net, inst));
    std::vector<Var> chosen;
    auto elements = roll(session, argmax, chosen);
    return {to_clusters(elements), sum_logs(chosen)};
}

TapedSample sample_order(const Network& net, const ProblemInstance& inst, Rng& rng) {
    DecoderSession session(net, encode_instance(net, inst));
    std::vector<Var> chosen;
    auto elements = roll(session, [&](const Tensor& p, const std::vector<bool>& v) { return draw(p, v, rng); },
                         chosen);
    Var total = nn::log(chosen[0]);
    for (std::size_t i = 1; i < chosen.size(); ++i) {
        total = nn::add(total, nn::log(chosen[i]));
    }
    return {to_clusters(elements), total};
}

SampleResult decode_sample(const Policy& policy, const ProblemInstance& inst, const SampleOptions& options) {
    if (options.width == 0) {
        throw ParameterError("sampling width must be at least 1");
    }
    nn::Tape tape(false);
    Network net(policy, tape);
    DecoderSession root(net, encode_instance(net, inst));
    const std::size_t mark = tape.mark();
    SampleResult result;
    for (std::size_t w = 0; w < options.width; ++w) {
        Rng rng(mix_seed(options.seed, w), 0x73616d);
        std::vector<Var> chosen;
        auto elements =
            roll(root, [&](const Tensor& p, const std::vector<bool>& v) { return draw(p, v, rng); }, chosen);
        result.samples.push_back({to_clusters(elements), sum_logs(chosen)});
        tape.rewind(mark);
    }
    if (options.max_probability) {
        std::size_t best = 0;
        for (std::size_t w = 1; w < result.samples.size(); ++w) {
            if (result.samples[w].log_prob > result.samples[best].log_prob) {
                best = w;
            }
        }
        result.best = result.samples[best];
        result.solution = router::refine_order(inst, result.best.order, options.omega);
        return result;
    }
    std::map<std::vector<std::size_t>, double> refined;
    bool have = false;
    for (const auto& s : result.samples) {
        auto it = refined.find(s.order);
        if (it != refined.end()) {
            continue;
        }
        router::Solution sol = router::refine_order(inst, s.order, options.omega);
        refined.emplace(s.order, sol.total_aoi);
        if (!have || sol.total_aoi < result.solution.total_aoi) {
            result.best = s;
            result.solution = std::move(sol);
            have = true;
        }
    }
    return result;
}

DecodeResult decode_beam(const Policy& policy, const ProblemInstance& inst, std::size_t width) {
    if (width == 0) {
        throw ParameterError("beam width must be at least 1");
    }
    nn::Tape tape(false);
    Network net(policy, tape);
    struct Beam {
        DecoderSession session;
        Tensor probs;
        std::vector<std::size_t> elements;
        double log_prob;
    };
    struct Candidate {
        std::size_t beam;
        std::size_t element;
        double score;
    };
    DecoderSession root(net, encode_instance(net, inst));
    Tensor first = root.advance(0).value();
    std::vector<Beam> beams{{root, std::move(first), {}, 0.0}};
    const std::size_t m = inst.size();
    for (std::size_t step = 0; step < m; ++step) {
        std::vector<Candidate> candidates;
        for (std::size_t b = 0; b < beams.size(); ++b) {
            const auto& visited = beams[b].session.visited();
            for (std::size_t j = 0; j < visited.size(); ++j) {
                if (!visited[j]) {
                    candidates.push_back({b, j, beams[b].log_prob + std::log(beams[b].probs[j])});
                }
            }
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
        if (candidates.size() > width) {
            candidates.resize(width);
        }
        std::vector<Beam> next;
        next.reserve(candidates.size());
        for (const auto& cand : candidates) {
            Beam child{beams[cand.beam].session, Tensor(), beams[cand.beam].elements, cand.score};
            child.elements.push_back(cand.element);
            if (step + 1 < m) {
                child.probs = child.session.advance(cand.element).value();
            }
            next.push_back(std::move(child));
        }
        beams = std::move(next);
    }
    return {to_clusters(beams.front().elements), beams.front().log_prob};
}

Var log_prob(const Network& net, const ProblemInstance& inst, const std::vector<std::size_t>& order) {
    if (order.size() != inst.size() || !is_permutation_of(order, inst.size())) {
        throw ParameterError("order is not a permutation of the " + std::to_string(inst.size()) + " clusters");
    }
    DecoderSession session(net, encode_instance(net, inst));
    std::size_t t = 0;
    std::vector<Var> chosen;
    roll(session, [&](const Tensor&, const std::vector<bool>&) { return order[t++] + 1; }, chosen);
    Var total = nn::log(chosen[0]);
    for (std::size_t i = 1; i < chosen.size(); ++i) {
        total = nn::add(total, nn::log(chosen[i]));
    }
    return total;
}

double log_prob(const Policy& policy, const ProblemInstance& inst, const std::vector<std::size_t>& order) {
    nn::Tape tape(false);
    Network net(policy, tape);
    return log_prob(net, inst, order).value().item();
}

std::vector<double> next_distribution(const Policy& policy, const ProblemInstance& inst,
                                      const std::vector<std::size_t>& prefix) {
    nn::Tape tape(false);
    Network net(policy, tape);
    DecoderSession session(net, encode_instance(net, inst));
    Var probs = session.advance(0);
    for (std::size_t c : prefix) {
        probs = session.advance(c + 1);
    }
    const auto v = probs.value().values();
    return {v.begin(), v.end()};
}

}  // namespace aoilab::policy
