#pragma once

#include <cstdint>
#include <vector>

#include "aoilab/scenario.hpp"

namespace aoilab {

// A scenario together with its service radius and sampled hovering points.
struct ProblemInstance {
    Scenario scenario;
    double service_radius = 0.0;
    std::vector<CandidateGrid> grids;

    std::size_t size() const { return scenario.size(); }
};

ProblemInstance make_instance(Scenario scenario);

// generate_scenario followed by make_instance.
ProblemInstance generate_instance(std::uint64_t seed, std::size_t m, double area_side,
                                  const std::vector<int>& node_count_choices, const EnvParams& env = {},
                                  const UavParams& uav = {});

}  // namespace aoilab
