#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "aoilab/instance.hpp"
#include "aoilab/rng.hpp"

namespace testsupport {

inline const std::vector<int>& node_choices() {
    static const std::vector<int> c{5, 10, 15, 20, 25, 30};
    return c;
}

inline aoilab::ProblemInstance random_instance(std::uint64_t seed, std::size_t m, int l_sub = 5,
                                               double gamma_db = 20.0) {
    aoilab::EnvParams env;
    env.l_sub = l_sub;
    env.snr_threshold = aoilab::db_to_linear(gamma_db);
    return aoilab::generate_instance(seed, m, 3000.0, node_choices(), env);
}

inline std::vector<std::size_t> random_order(std::size_t m, aoilab::Rng& rng) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    return order;
}

// Uniformly random point choice per step.
inline std::vector<std::size_t> random_choice(const aoilab::ProblemInstance& inst,
                                              const std::vector<std::size_t>& order, aoilab::Rng& rng) {
    std::vector<std::size_t> choice;
    for (std::size_t c : order) {
        choice.push_back(rng.index(inst.grids[c].points.size()));
    }
    return choice;
}

}  // namespace testsupport
