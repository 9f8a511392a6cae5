#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "aoilab/tensor.hpp"

namespace aoilab::nn {

// Named learnable tensors, in registration order.
class ParamStore {
public:
    std::size_t add(std::string name, Tensor value);
    std::size_t size() const { return values_.size(); }
    Tensor& operator[](std::size_t i) { return values_[i]; }
    const Tensor& operator[](std::size_t i) const { return values_[i]; }
    const std::string& name(std::size_t i) const { return names_[i]; }
    std::vector<Tensor>& values() { return values_; }
    const std::vector<Tensor>& values() const { return values_; }
    std::size_t find(const std::string& name) const;  // throws IndexError
    std::size_t parameter_count() const;

    friend bool operator==(const ParamStore&, const ParamStore&) = default;

private:
    std::vector<std::string> names_;
    std::vector<Tensor> values_;
};

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;
    std::size_t step = 0;

    AdamState() = default;
    AdamState(const std::vector<Tensor>& params, AdamConfig cfg);
};

// Bias-corrected Adam update, in place.
void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state);

double global_norm(const std::vector<Tensor>& tensors);

// Checkpoint container: "TWA1", then per entry the name length (u64), UTF-8
// name, rank (u64), dims (u64 each) and raw doubles, all little-endian, then a
// CRC32 of everything before it.
using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

std::string encode_checkpoint(const NamedTensors& entries);
NamedTensors decode_checkpoint(const std::string& bytes);
void save_checkpoint(const std::filesystem::path& path, const NamedTensors& entries);
NamedTensors load_checkpoint(const std::filesystem::path& path);

// Text payloads (e.g. a JSON config) stored as a rank-1 tensor of byte values.
Tensor text_tensor(const std::string& text);
std::string tensor_text(const Tensor& t);

}  // namespace aoilab::nn
