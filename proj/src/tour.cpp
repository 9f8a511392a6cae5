#include "aoilab/tour.hpp"

#include <algorithm>

#include "aoilab/errors.hpp"

namespace aoilab {

bool is_permutation_of(const std::vector<std::size_t>& order, std::size_t m) {
    if (order.size() != m) {
        return false;
    }
    std::vector<bool> seen(m, false);
    for (std::size_t c : order) {
        if (c >= m || seen[c]) {
            return false;
        }
        seen[c] = true;
    }
    return true;
}

void validate_tour(const Tour& tour, const Scenario& scenario) {
    if (!is_permutation_of(tour.order, scenario.size())) {
        throw ParameterError("tour order is not a permutation of the scenario's clusters");
    }
    if (tour.points.size() != tour.order.size()) {
        throw ParameterError("tour needs exactly one hovering point per visit step");
    }
}

bool is_feasible(const Tour& tour, const Scenario& scenario, const std::vector<CandidateGrid>& grids) {
    if (!is_permutation_of(tour.order, scenario.size()) || tour.points.size() != tour.order.size() ||
        grids.size() != scenario.size()) {
        return false;
    }
    for (std::size_t t = 0; t < tour.order.size(); ++t) {
        const auto& pts = grids[tour.order[t]].points;
        if (std::find(pts.begin(), pts.end(), tour.points[t]) == pts.end()) {
            return false;
        }
    }
    return true;
}

Tour make_tour(const std::vector<std::size_t>& order, const std::vector<std::size_t>& choice,
               const std::vector<CandidateGrid>& grids) {
    if (order.size() != choice.size()) {
        throw ParameterError("order and point choice lengths differ");
    }
    Tour tour;
    tour.order = order;
    tour.points.reserve(order.size());
    for (std::size_t t = 0; t < order.size(); ++t) {
        const auto& g = grids.at(order[t]);
        if (choice[t] >= g.points.size()) {
            throw IndexError("point index out of range for cluster " + std::to_string(order[t]));
        }
        tour.points.push_back(g.points[choice[t]]);
    }
    return tour;
}

}  // namespace aoilab
