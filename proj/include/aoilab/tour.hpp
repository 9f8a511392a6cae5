#pragma once

#include <cstddef>
#include <vector>

#include "aoilab/geometry.hpp"
#include "aoilab/scenario.hpp"

namespace aoilab {

// Visiting order over cluster indices (the start point is implicit at both
// ends) and the hovering point used at each visit step: points[t] serves
// cluster order[t].
struct Tour {
    std::vector<std::size_t> order;
    std::vector<Vec3> points;

    std::size_t size() const { return order.size(); }

    friend bool operator==(const Tour&, const Tour&) = default;
};

// Throws ParameterError unless the order is a permutation of the scenario's
// clusters with one point per step.
void validate_tour(const Tour& tour, const Scenario& scenario);

// True when the tour is valid and every point is a member of its cluster's grid.
bool is_feasible(const Tour& tour, const Scenario& scenario, const std::vector<CandidateGrid>& grids);

// Builds a tour from per-step grid indices (choice[t] indexes grids[order[t]]).
Tour make_tour(const std::vector<std::size_t>& order, const std::vector<std::size_t>& choice,
               const std::vector<CandidateGrid>& grids);

bool is_permutation_of(const std::vector<std::size_t>& order, std::size_t m);

}  // namespace aoilab
