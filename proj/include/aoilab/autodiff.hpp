#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <limits>
#include <vector>

#include "aoilab/tensor.hpp"

namespace aoilab::nn {

class Tape;

// Handle to a value recorded on a tape.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = std::numeric_limits<std::size_t>::max();

    const Tensor& value() const;
    bool valid() const { return tape != nullptr; }
};

// Append-only record of a forward computation. Node order is topological, so
// backward() is a single reverse sweep. A tape built with record = false keeps
// values only (inference); mark()/rewind() drop nodes after a point so one
// tape can serve many decodes.
class Tape {
public:
    using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

    explicit Tape(bool record = true) : record_(record) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Tensor value);
    Var parameter(Tensor value);

    bool recording() const { return record_; }
    bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
    const Tensor& value(Var v) const { return nodes_[v.id].value; }
    const Tensor& value(std::size_t id) const { return nodes_[id].value; }

    // Gradient after backward(); all zeros for nodes the loss does not reach.
    Tensor grad(Var v) const;

    // Seeds d(loss)/d(loss) = 1 and runs every recorded backward rule once.
    void backward(Var loss);

    std::size_t mark() const { return nodes_.size(); }
    void rewind(std::size_t mark);
    std::size_t node_count() const { return nodes_.size(); }

    // Op authoring: records a node whose gradient flows to `parents`.
    Var push(Tensor value, std::initializer_list<Var> parents, BackwardFn backward);
    Var push(Tensor value, const std::vector<Var>& parents, BackwardFn backward);
    // Gradient accumulator for a node, allocated (zero) on first use.
    Tensor& grad_buffer(std::size_t id);
    bool needs_grad(std::size_t id) const { return nodes_[id].requires_grad; }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
        BackwardFn backward;
    };
    std::deque<Node> nodes_;
    bool record_ = true;
    bool consumed_ = false;
};

// Differentiable primitives. All throw DimensionError (naming both shapes) on
// incompatible operands.
Var matmul(Var a, Var b);     // a (n x k) * b (k x m)
Var matmul_nt(Var a, Var b);  // a (n x k) * b^T, b (m x k)
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);        // elementwise
Var add_row(Var a, Var row);  // broadcasts a 1 x m row over every row of a
Var scale(Var a, double s);
Var tanh(Var a);
Var relu(Var a);
Var log(Var a);
Var softmax_rows(Var a);
// Entries in masked columns are replaced by `fill` in every row; no gradient
// flows to them.
Var masked_fill(Var a, const std::vector<bool>& column_mask, double fill);
// Normalizes each row over its features.
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);
// Normalizes each feature column over the rows (tokens) of one instance.
Var batch_norm_tokens(Var x, Var gamma, Var beta, double eps = 1e-10);
Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var slice_cols(Var a, std::size_t begin, std::size_t count);
Var slice_rows(Var a, std::size_t begin, std::size_t count);
Var sum(Var a);
Var pick(Var a, std::size_t r, std::size_t c);

}  // namespace aoilab::nn
