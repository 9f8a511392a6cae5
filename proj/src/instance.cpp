#include "aoilab/instance.hpp"

#include "aoilab/channel.hpp"

namespace aoilab {

ProblemInstance make_instance(Scenario scenario) {
    validate(scenario);
    ProblemInstance inst;
    inst.service_radius = channel::service_radius(scenario.env);
    inst.grids.reserve(scenario.size());
    for (std::size_t m = 0; m < scenario.size(); ++m) {
        inst.grids.push_back(build_candidate_grid(scenario.clusters[m], m, inst.service_radius, scenario.env.l_sub,
                                                  scenario.env.altitude));
    }
    inst.scenario = std::move(scenario);
    return inst;
}

ProblemInstance generate_instance(std::uint64_t seed, std::size_t m, double area_side,
                                  const std::vector<int>& node_count_choices, const EnvParams& env,
                                  const UavParams& uav) {
    return make_instance(generate_scenario(seed, m, area_side, node_count_choices, env, uav));
}

}  // namespace aoilab
