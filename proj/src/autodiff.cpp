#include "aoilab/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "aoilab/errors.hpp"

namespace aoilab::nn {
namespace {

void require_same_tape(Var a, Var b) {
    if (a.tape != b.tape || a.tape == nullptr) {
        throw ContractError("operands recorded on different tapes");
    }
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
    throw DimensionError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " + b.shape_string());
}

Tensor zeros_like(const Tensor& t) { return Tensor::matrix(t.rows(), t.cols()); }

// c (n x m) += a (n x k) * b (k x m)
void gemm_nn(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        double* ci = c + i * m;
        const double* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            const double* bp = b + p * m;
            for (std::size_t j = 0; j < m; ++j) {
                ci[j] += av * bp[j];
            }
        }
    }
}

// c (n x m) += a (n x k) * b^T, b (m x k)
void gemm_nt(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a + i * k;
        for (std::size_t j = 0; j < m; ++j) {
            const double* bj = b + j * k;
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                s += ai[p] * bj[p];
            }
            c[i * m + j] += s;
        }
    }
}

// c (k x m) += a^T * b, a (n x k), b (n x m)
void gemm_tn(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a + i * k;
        const double* bi = b + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            double* cp = c + p * m;
            for (std::size_t j = 0; j < m; ++j) {
                cp[j] += av * bi[j];
            }
        }
    }
}

// Shared by layer_norm (axis = columns within a row) and batch_norm_tokens
// (axis = rows within a column).
Var normalize(Var x, Var gamma, Var beta, double eps, bool over_rows) {
    require_same_tape(x, gamma);
    require_same_tape(x, beta);
    const Tensor& xv = x.value();
    const std::size_t n = xv.rows();
    const std::size_t d = xv.cols();
    if (gamma.value().size() != d || beta.value().size() != d) {
        shape_error(over_rows ? "batch_norm_tokens" : "layer_norm", xv, gamma.value());
    }
    const std::size_t groups = over_rows ? d : n;
    const std::size_t len = over_rows ? n : d;
    auto at = [d, over_rows](std::size_t g, std::size_t k) { return over_rows ? k * d + g : g * d + k; };
    Tensor xhat = Tensor::matrix(n, d);
    std::vector<double> inv_std(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        double mean = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            mean += xv[at(g, k)];
        }
        mean /= static_cast<double>(len);
        double var = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            const double c = xv[at(g, k)] - mean;
            var += c * c;
        }
        var /= static_cast<double>(len);
        inv_std[g] = 1.0 / std::sqrt(var + eps);
        for (std::size_t k = 0; k < len; ++k) {
            xhat[at(g, k)] = (xv[at(g, k)] - mean) * inv_std[g];
        }
    }
    Tensor out = Tensor::matrix(n, d);
    const Tensor& gv = gamma.value();
    const Tensor& bv = beta.value();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            out(i, j) = gv[j] * xhat(i, j) + bv[j];
        }
    }
    const std::size_t xid = x.id, gid = gamma.id, bid = beta.id;
    return x.tape->push(std::move(out), {x, gamma, beta},
                        [=, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t, const Tensor& go) {
                            const Tensor& gv = t.value(gid);
                            if (t.needs_grad(gid) || t.needs_grad(bid)) {
                                Tensor& dg = t.grad_buffer(gid);
                                Tensor& db = t.grad_buffer(bid);
                                for (std::size_t i = 0; i < n; ++i) {
                                    for (std::size_t j = 0; j < d; ++j) {
                                        dg[j] += go(i, j) * xhat(i, j);
                                        db[j] += go(i, j);
                                    }
                                }
                            }
                            if (!t.needs_grad(xid)) {
                                return;
                            }
                            Tensor& dx = t.grad_buffer(xid);
                            for (std::size_t g = 0; g < groups; ++g) {
                                double mean_dh = 0.0;
                                double mean_dh_xh = 0.0;
                                for (std::size_t k = 0; k < len; ++k) {
                                    const std::size_t idx = at(g, k);
                                    const double dh = go[idx] * gv[idx % d];
                                    mean_dh += dh;
                                    mean_dh_xh += dh * xhat[idx];
                                }
                                mean_dh /= static_cast<double>(len);
                                mean_dh_xh /= static_cast<double>(len);
                                for (std::size_t k = 0; k < len; ++k) {
                                    const std::size_t idx = at(g, k);
                                    const double dh = go[idx] * gv[idx % d];
                                    dx[idx] += inv_std[g] * (dh - mean_dh - xhat[idx] * mean_dh_xh);
                                }
                            }
                        });
}

}  // namespace

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::constant(Tensor value) {
    nodes_.push_back({std::move(value), {}, false, {}});
    return {this, nodes_.size() - 1};
}

Var Tape::parameter(Tensor value) {
    nodes_.push_back({std::move(value), {}, record_, {}});
    return {this, nodes_.size() - 1};
}

Tensor Tape::grad(Var v) const {
    const Node& n = nodes_[v.id];
    if (n.grad.empty()) {
        return Tensor(n.value.shape(), 0.0);
    }
    return Tensor(n.value.shape(), std::vector<double>(n.grad.values().begin(), n.grad.values().end()));
}

Tensor& Tape::grad_buffer(std::size_t id) {
    Node& n = nodes_[id];
    if (n.grad.empty()) {
        n.grad = zeros_like(n.value);
    }
    return n.grad;
}

Var Tape::push(Tensor value, std::initializer_list<Var> parents, BackwardFn backward) {
    return push(std::move(value), std::vector<Var>(parents), std::move(backward));
}

Var Tape::push(Tensor value, const std::vector<Var>& parents, BackwardFn backward) {
    bool needs = false;
    if (record_) {
        for (const Var& p : parents) {
            if (p.tape != this) {
                throw ContractError("operand recorded on a different tape");
            }
            needs = needs || nodes_[p.id].requires_grad;
        }
    }
    nodes_.push_back({std::move(value), {}, needs, needs ? std::move(backward) : BackwardFn{}});
    return {this, nodes_.size() - 1};
}

void Tape::backward(Var loss) {
    if (loss.tape != this) {
        throw ContractError("loss recorded on a different tape");
    }
    if (!record_) {
        throw ContractError("backward() on a tape that does not record gradients");
    }
    if (consumed_) {
        throw ContractError("backward() already ran on this tape");
    }
    if (nodes_[loss.id].value.size() != 1) {
        throw ContractError("backward() needs a scalar loss, got " + nodes_[loss.id].value.shape_string());
    }
    consumed_ = true;
    grad_buffer(loss.id)[0] = 1.0;
    for (std::size_t id = loss.id + 1; id-- > 0;) {
        Node& n = nodes_[id];
        if (n.backward && !n.grad.empty()) {
            n.backward(*this, n.grad);
        }
    }
}

void Tape::rewind(std::size_t mark) {
    if (mark > nodes_.size()) {
        throw ContractError("rewind past the end of the tape");
    }
    nodes_.resize(mark);
}

Var matmul(Var a, Var b) {
    require_same_tape(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (av.cols() != bv.rows()) {
        shape_error("matmul", av, bv);
    }
    const std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
    Tensor out = Tensor::matrix(n, m);
    gemm_nn(av.data(), bv.data(), out.data(), n, k, m);
    const std::size_t aid = a.id, bid = b.id;
    return a.tape->push(std::move(out), {a, b}, [=](Tape& t, const Tensor& g) {
        if (t.needs_grad(aid)) {
            gemm_nt(g.data(), t.value(bid).data(), t.grad_buffer(aid).data(), n, m, k);
        }
        if (t.needs_grad(bid)) {
            gemm_tn(t.value(aid).data(), g.data(), t.grad_buffer(bid).data(), n, k, m);
        }
    });
}

Var matmul_nt(Var a, Var b) {
    require_same_tape(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (av.cols() != bv.cols()) {
        shape_error("matmul_nt", av, bv);
    }
    const std::size_t n = av.rows(), k = av.cols(), m = bv.rows();
    Tensor out = Tensor::matrix(n, m);
    gemm_nt(av.data(), bv.data(), out.data(), n, k, m);
    const std::size_t aid = a.id, bid = b.id;
    return a.tape->push(std::move(out), {a, b}, [=](Tape& t, const Tensor& g) {
        if (t.needs_grad(aid)) {
            // dA (n x k) += G (n x m) * B (m x k)
            gemm_nn(g.data(), t.value(bid).data(), t.grad_buffer(aid).data(), n, m, k);
        }
        if (t.needs_grad(bid)) {
            // dB (m x k) += G^T (m x n) * A (n x k)
            gemm_tn(g.data(), t.value(aid).data(), t.grad_buffer(bid).data(), n, m, k);
        }
    });
}

Var transpose(Var a) {
    const Tensor& av = a.value();
    const std::size_t n = av.rows(), m = av.cols();
    Tensor out = Tensor::matrix(m, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out(j, i) = av(i, j);
        }
    }
    const std::size_t aid = a.id;
    return a.tape->push(std::move(out), {a}, [=](Tape& t, const Tensor& g) {
        Tensor& da = t.grad_buffer(aid);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                da(i, j) += g(j, i);
            }
        }
    });
}

namespace {
template <typename Fwd>
Var elementwise2(const char* name, Var a, Var b, Fwd fwd, double sign_b, bool product) {
    require_same_tape(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (!av.same_shape(bv)) {
        shape_error(name, av, bv);
    }
    Tensor out = Tensor::matrix(av.rows(), av.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = fwd(av[i], bv[i]);
    }
    const std::size_t aid = a.id, bid = b.id;
    return a.tape->push(std::move(out), {a, b}, [=](Tape& t, const Tensor& g) {
        if (t.needs_grad(aid)) {
            Tensor& da = t.grad_buffer(aid);
            const Tensor& bv = t.value(bid);
            for (std::size_t i = 0; i < g.size(); ++i) {
                da[i] += product ? g[i] * bv[i] : g[i];
            }
        }
        if (t.needs_grad(bid)) {
            Tensor& db = t.grad_buffer(bid);
            const Tensor& av = t.value(aid);
            for (std::size_t i = 0; i < g.size(); ++i) {
                db[i] += product ? g[i] * av[i] : sign_b * g[i];
            }
        }
    });
}
}  // namespace

Var add(Var a, Var b) {
    return elementwise2("add", a, b, [](double x, double y) { return x + y; }, 1.0, false);
}

Var sub(Var a, Var b) {
    return elementwise2("sub", a, b, [](double x, double y) { return x - y; }, -1.0, false);
}

Var mul(Var a, Var b) {
    return elementwise2("mul", a, b, [](double x, double y) { return x * y; }, 1.0, true);
}

Var add_row(Var a, Var row) {
    require_same_tape(a, row);
    const Tensor& av = a.value();
    const Tensor& rv = row.value();
    if (rv.size() != av.cols()) {
        shape_error("add_row", av, rv);
    }
    const std::size_t n = av.rows(), m = av.cols();
    Tensor out = Tensor::matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out(i, j) = av(i, j) + rv[j];
        }
    }
    const std::size_t aid = a.id, rid = row.id;
    return a.tape->push(std::move(out), {a, row}, [=](Tape& t, const Tensor& g) {
        if (t.needs_grad(aid)) {
            Tensor& da = t.grad_buffer(aid);
            for (std::size_t i = 0; i < g.size(); ++i) {
                da[i] += g[i];
            }
        }
        if (t.needs_grad(rid)) {
            Tensor& dr = t.grad_buffer(rid);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    dr[j] += g(i, j);
                }
            }
        }
    });
}

Var scale(Var a, double s) {
    const Tensor& av = a.value();
    Tensor out = Tensor::matrix(av.rows(), av.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = av[i] * s;
    }
    const std::size_t aid = a.id;
    return a.tape->push(std::move(out), {a}, [=](Tape& t, const Tensor& g) {
        Tensor& da = t.grad_buffer(aid);
        for (std::size_t i = 0; i < g.size(); ++i) {
            da[i] += g[i] * s;
        }
    });
}

Var tanh(Var a) {
    const Tensor& av = a.value();
    Tensor out = Tensor::matrix(av.rows(), av.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::tanh(av[i]);
    }
    const std::size_t aid = a.id;
    const std::size_t oid = a.tape->node_count();
    return a.tape->push(std::move(out), {a}, [=](Tape& t, const Tensor& g) {
        Tensor& da = t.grad_buffer(aid);
        const Tensor& y = t.value(oid);
        for (std::size_t i = 0; i < g.size(); ++i) {
            da[i] += g[i] * (1.0 - y[i] * y[i]);
        }
    });
}

Var relu(Var a) {
    const Tensor& av = a.value();
    Tensor out = Tensor::matrix(av.rows(), av.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = av[i] > 0.0 ? av[i] : 0.0;
    }
    const std::size_t aid = a.id;
    return a.tape->push(std::move(out), {a}, [=](Tape& t, const Tensor& g) {
        Tensor& da = t.grad_buffer(aid);
        const Tensor& x = t.value(aid);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (x[i] > 0.0) {
                da[i] += g[i];
            }
        }
    });
}

Var log(Var a) {
    const Tensor& av = a.value();
    Tensor out = Tensor::matrix(av.rows(), av.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::log(av[i]);
    }
    const std::size_t aid = a.id;
    return a.tape->push(std::move(out), {a}, [=](Tape& t, const Tensor& g) {
        Tensor& da = t.grad_buffer(aid);
        const Tensor& x = t.value(aid);
        for (std::size_t i = 0; i < g.size(); ++i) {
            da[i] += g[i] / x[i];
        }
    });
}

Var softmax_rows(Var a) {
    const Tensor& av = a.value();
    const std::size_t n = av.rows(), m = av.cols();
    Tensor out = Tensor::matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            mx = std::max(mx, av(i, j));
        }
        if (!std::isfinite(mx)) {
            throw ContractError("softmax_rows: row " + std::to_string(i) + " has no finite entry");
        }
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            out(i, j) = std::exp(av(i, j) - mx);
            total += out(i, j);
        }
        for (std::size_t j = 0; j < m; ++j) {
            out(i, j) /= total;
        }
    }
    const std::size_t aid = a.id;
    const std::size_t oid = a.tape->node_count();
    return a.tape->push(std::move(out), {a}, [=](Tape& t, const Tensor& g) {
        Tensor& da = t.grad_buffer(aid);
        const Tensor& y = t.value(oid);
        for (std::size_t i = 0; i < n; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                dot += g(i, j) * y(i, j);
            }
            for (std::size_t j = 0; j < m; ++j) {
                da(i, j) += y(i, j) * (g(i, j) - dot);
            }
        }
    });
}

Var masked_fill(Var a, const std::vector<bool>& column_mask, double fill) {
    const Tensor& av = a.value();
    const std::size_t n = av.rows(), m = av.cols();
    if (column_mask.size() != m) {
        throw DimensionError("masked_fill: mask length " + std::to_string(column_mask.size()) +
                             " does not match " + av.shape_string());
    }
    Tensor out = Tensor::matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out(i, j) = column_mask[j] ? fill : av(i, j);
        }
    }
    const std::size_t aid = a.id;
    return a.tape->push(std::move(out), {a}, [=](Tape& t, const Tensor& g) {
        Tensor& da = t.grad_buffer(aid);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (!column_mask[j]) {
                    da(i, j) += g(i, j);
                }
            }
        }
    });
}

Var layer_norm(Var x, Var gamma, Var beta, double eps) { return normalize(x, gamma, beta, eps, false); }

Var batch_norm_tokens(Var x, Var gamma, Var beta, double eps) { return normalize(x, gamma, beta, eps, true); }

Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) {
        throw DimensionError("concat_cols: no operands");
    }
    const std::size_t n = parts[0].value().rows();
    std::size_t total = 0;
    std::vector<std::size_t> offsets;
    for (const Var& p : parts) {
        require_same_tape(parts[0], p);
        if (p.value().rows() != n) {
            shape_error("concat_cols", parts[0].value(), p.value());
        }
        offsets.push_back(total);
        total += p.value().cols();
    }
    Tensor out = Tensor::matrix(n, total);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const Tensor& pv = parts[k].value();
        for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(pv.data() + i * pv.cols(), pv.cols(), out.data() + i * total + offsets[k]);
        }
    }
    std::vector<std::size_t> ids;
    std::vector<std::size_t> widths;
    for (const Var& p : parts) {
        ids.push_back(p.id);
        widths.push_back(p.value().cols());
    }
    return parts[0].tape->push(std::move(out), parts, [=](Tape& t, const Tensor& g) {
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (!t.needs_grad(ids[k])) {
                continue;
            }
            Tensor& d = t.grad_buffer(ids[k]);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < widths[k]; ++j) {
                    d[i * widths[k] + j] += g[i * total + offsets[k] + j];
                }
            }
        }
    });
}

Var concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) {
        throw DimensionError("concat_rows: no operands");
    }
    const std::size_t m = parts[0].value().cols();
    std::size_t total = 0;
    std::vector<std::size_t> offsets;
    for (const Var& p : parts) {
        require_same_tape(parts[0], p);
        if (p.value().cols() != m) {
            shape_error("concat_rows", parts[0].value(), p.value());
        }
        offsets.push_back(total);
        total += p.value().rows();
    }
    Tensor out = Tensor::matrix(total, m);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const Tensor& pv = parts[k].value();
        std::copy_n(pv.data(), pv.size(), out.data() + offsets[k] * m);
    }
    std::vector<std::size_t> ids;
    std::vector<std::size_t> sizes;
    for (const Var& p : parts) {
        ids.push_back(p.id);
        sizes.push_back(p.value().size());
    }
    return parts[0].tape->push(std::move(out), parts, [=](Tape& t, const Tensor& g) {
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (!t.needs_grad(ids[k])) {
                continue;
            }
            Tensor& d = t.grad_buffer(ids[k]);
            for (std::size_t i = 0; i < sizes[k]; ++i) {
                d[i] += g[offsets[k] * m + i];
            }
        }
    });
}

Var slice_cols(Var a, std::size_t begin, std::size_t count) {
    const Tensor& av = a.value();
    const std::size_t n = av.rows(), m = av.cols();
    if (begin + count > m || count == 0) {
        throw DimensionError("slice_cols: [" + std::to_string(begin) + ", +" + std::to_string(count) +
                             ") outside " + av.shape_string());
    }
    Tensor out = Tensor::matrix(n, count);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy_n(av.data() + i * m + begin, count, out.data() + i * count);
    }
    const std::size_t aid = a.id;
    return a.tape->push(std::move(out), {a}, [=](Tape& t, const Tensor& g) {
        Tensor& da = t.grad_buffer(aid);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < count; ++j) {
                da[i * m + begin + j] += g[i * count + j];
            }
        }
    });
}

Var slice_rows(Var a, std::size_t begin, std::size_t count) {
    const Tensor& av = a.value();
    const std::size_t n = av.rows(), m = av.cols();
    if (begin + count > n || count == 0) {
        throw DimensionError("slice_rows: [" + std::to_string(begin) + ", +" + std::to_string(count) +
                             ") outside " + av.shape_string());
    }
    Tensor out = Tensor::matrix(count, m);
    std::copy_n(av.data() + begin * m, count * m, out.data());
    const std::size_t aid = a.id;
    return a.tape->push(std::move(out), {a}, [=](Tape& t, const Tensor& g) {
        Tensor& da = t.grad_buffer(aid);
        for (std::size_t i = 0; i < count * m; ++i) {
            da[begin * m + i] += g[i];
        }
    });
}

Var sum(Var a) {
    const Tensor& av = a.value();
    double s = 0.0;
    for (double v : av.values()) {
        s += v;
    }
    const std::size_t aid = a.id;
    return a.tape->push(Tensor::scalar(s), {a}, [=](Tape& t, const Tensor& g) {
        Tensor& da = t.grad_buffer(aid);
        for (std::size_t i = 0; i < da.size(); ++i) {
            da[i] += g[0];
        }
    });
}

Var pick(Var a, std::size_t r, std::size_t c) {
    const Tensor& av = a.value();
    if (r >= av.rows() || c >= av.cols()) {
        throw DimensionError("pick: (" + std::to_string(r) + ", " + std::to_string(c) + ") outside " +
                             av.shape_string());
    }
    const std::size_t aid = a.id;
    const std::size_t idx = r * av.cols() + c;
    return a.tape->push(Tensor::scalar(av[idx]), {a}, [=](Tape& t, const Tensor& g) {
        t.grad_buffer(aid)[idx] += g[0];
    });
}

}  // namespace aoilab::nn
