#include "aoilab/optim.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "aoilab/errors.hpp"

namespace aoilab::nn {

std::size_t ParamStore::add(std::string name, Tensor value) {
    for (const auto& n : names_) {
        if (n == name) {
            throw ContractError("parameter '" + name + "' registered twice");
        }
    }
    names_.push_back(std::move(name));
    values_.push_back(std::move(value));
    return values_.size() - 1;
}

std::size_t ParamStore::find(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) {
            return i;
        }
    }
    throw IndexError("no parameter named '" + name + "'");
}

std::size_t ParamStore::parameter_count() const {
    std::size_t total = 0;
    for (const auto& v : values_) {
        total += v.size();
    }
    return total;
}

AdamState::AdamState(const std::vector<Tensor>& params, AdamConfig cfg) : config(cfg) {
    if (!(cfg.learning_rate > 0.0) || !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) ||
        !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) || !(cfg.eps > 0.0)) {
        throw ParameterError("adam: learning rate and eps must be positive, betas in [0, 1)");
    }
    for (const auto& p : params) {
        first_moment.emplace_back(p.shape(), 0.0);
        second_moment.emplace_back(p.shape(), 0.0);
    }
}

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
        throw DimensionError("adam: " + std::to_string(params.size()) + " parameters, " +
                             std::to_string(grads.size()) + " gradients, " +
                             std::to_string(state.first_moment.size()) + " moment slots");
    }
    const AdamConfig& c = state.config;
    ++state.step;
    const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor& p = params[k];
        const Tensor& g = grads[k];
        if (p.size() != g.size()) {
            throw DimensionError("adam: parameter " + p.shape_string() + " vs gradient " + g.shape_string());
        }
        Tensor& m = state.first_moment[k];
        Tensor& v = state.second_moment[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
            v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
            const double mhat = m[i] / correction1;
            const double vhat = v[i] / correction2;
            p[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.eps);
        }
    }
}

double global_norm(const std::vector<Tensor>& tensors) {
    double s = 0.0;
    for (const auto& t : tensors) {
        for (double v : t.values()) {
            s += v * v;
        }
    }
    return std::sqrt(s);
}

namespace {

constexpr char kMagic[4] = {'T', 'W', 'A', '1'};

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
}

class Reader {
public:
    Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        }
        pos_ += 8;
        return v;
    }

    std::string text(std::uint64_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == end_; }
    void skip(std::size_t n) {
        need(n);
        pos_ += n;
    }

private:
    void need(std::uint64_t n) const {
        if (n > end_ - pos_) {
            throw IoError("checkpoint truncated at byte " + std::to_string(pos_));
        }
    }

    const std::string& bytes_;
    std::size_t end_;
    std::size_t pos_ = 0;
};

std::uint32_t checksum(const std::string& bytes, std::size_t n) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(n)));
}

}  // namespace

std::string encode_checkpoint(const NamedTensors& entries) {
    std::string out(kMagic, 4);
    for (const auto& [name, t] : entries) {
        put_u64(out, name.size());
        out += name;
        put_u64(out, t.rank());
        for (std::size_t d : t.shape()) {
            put_u64(out, d);
        }
        for (double v : t.values()) {
            put_u64(out, std::bit_cast<std::uint64_t>(v));
        }
    }
    put_u32(out, checksum(out, out.size()));
    return out;
}

NamedTensors decode_checkpoint(const std::string& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw IoError("not a checkpoint (bad magic)");
    }
    const std::size_t body = bytes.size() - 4;
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i) {
        stored |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[body + i])) << (8 * i);
    }
    if (stored != checksum(bytes, body)) {
        throw IoError("checkpoint checksum mismatch");
    }
    Reader r(bytes, body);
    r.skip(4);
    NamedTensors entries;
    while (!r.done()) {
        std::string name = r.text(r.u64());
        const std::uint64_t rank = r.u64();
        if (rank > 8) {
            throw IoError("checkpoint entry '" + name + "' has rank " + std::to_string(rank));
        }
        std::vector<std::size_t> shape;
        std::size_t count = 1;
        for (std::uint64_t i = 0; i < rank; ++i) {
            shape.push_back(r.u64());
            count *= shape.back();
        }
        std::vector<double> values(count);
        for (auto& v : values) {
            v = std::bit_cast<double>(r.u64());
        }
        entries.emplace_back(std::move(name), Tensor(std::move(shape), std::move(values)));
    }
    return entries;
}

void save_checkpoint(const std::filesystem::path& path, const NamedTensors& entries) {
    const std::string bytes = encode_checkpoint(entries);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot write checkpoint " + path.string());
    }
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        throw IoError("failed writing checkpoint " + path.string());
    }
}

NamedTensors load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot read checkpoint " + path.string());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return decode_checkpoint(ss.str());
}

Tensor text_tensor(const std::string& text) {
    std::vector<double> v;
    v.reserve(text.size());
    for (unsigned char c : text) {
        v.push_back(static_cast<double>(c));
    }
    return Tensor({text.size()}, std::move(v));
}

std::string tensor_text(const Tensor& t) {
    std::string s;
    for (double v : t.values()) {
        if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v)) {
            throw IoError("tensor does not hold byte values");
        }
        s.push_back(static_cast<char>(static_cast<unsigned char>(v)));
    }
    return s;
}

}  // namespace aoilab::nn
