#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "aoilab/autodiff.hpp"

namespace testsupport {

using Builder = std::function<aoilab::nn::Var(aoilab::nn::Tape&, const std::vector<aoilab::nn::Var>&)>;

// Largest deviation between the tape gradient and central differences,
// relative to the largest gradient magnitude of the same input.
inline double gradient_error(const std::vector<aoilab::nn::Tensor>& inputs, const Builder& build,
                             double step = 1e-5) {
    using namespace aoilab::nn;
    Tape tape(true);
    std::vector<Var> vars;
    for (const auto& t : inputs) {
        vars.push_back(tape.parameter(t));
    }
    Var loss = build(tape, vars);
    tape.backward(loss);

    auto eval = [&](const std::vector<Tensor>& xs) {
        Tape t(false);
        std::vector<Var> vs;
        for (const auto& x : xs) {
            vs.push_back(t.constant(x));
        }
        return build(t, vs).value().item();
    };

    std::vector<double> scales;
    std::vector<double> errors;
    std::vector<Tensor> probe = inputs;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const Tensor analytic = tape.grad(vars[k]);
        double scale = 0.0;
        double err = 0.0;
        for (std::size_t i = 0; i < inputs[k].size(); ++i) {
            const double x = inputs[k][i];
            probe[k][i] = x + step;
            const double up = eval(probe);
            probe[k][i] = x - step;
            const double down = eval(probe);
            probe[k][i] = x;
            const double numeric = (up - down) / (2.0 * step);
            scale = std::max({scale, std::abs(numeric), std::abs(analytic[i])});
            err = std::max(err, std::abs(numeric - analytic[i]));
        }
        scales.push_back(scale);
        errors.push_back(err);
    }
    // Tensors whose exact gradient vanishes are judged against the largest
    // gradient anywhere, since their differences are pure rounding noise.
    const double global = *std::max_element(scales.begin(), scales.end());
    double worst = 0.0;
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const double denom = std::max(scales[k], 1e-4 * global);
        if (denom > 0.0) {
            worst = std::max(worst, errors[k] / denom);
        }
    }
    return worst;
}

}  // namespace testsupport
