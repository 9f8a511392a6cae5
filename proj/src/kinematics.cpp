#include "aoilab/kinematics.hpp"

#include <cmath>

#include "aoilab/errors.hpp"

namespace aoilab::kinematics {

double fly_time(const Vec3& a, const Vec3& b, const UavParams& uav) {
    return distance(a, b) / uav.speed;
}

double propulsion_power(double v, const UavParams& uav) {
    if (v < 0.0) {
        throw ParameterError("speed must be non-negative");
    }
    const double v2 = v * v;
    const double blade = uav.p0 * (1.0 + 3.0 * v2 / (uav.u_tip * uav.u_tip));
    // sqrt(1 + x^2) - x == 1 / (sqrt(1 + x^2) + x), x = v^2 / (2 v0^2)
    const double x = v2 / (2.0 * uav.v0 * uav.v0);
    const double inner = 1.0 / (std::hypot(1.0, x) + x);
    const double induced = uav.p1 * std::sqrt(inner);
    const double parasite = 0.5 * uav.d0 * uav.rho * uav.s0 * uav.delta * v2 * v;
    return blade + induced + parasite;
}

double upload_time(long n_nodes, double rate, const EnvParams& env) {
    if (!(rate > 0.0)) {
        throw ParameterError("rate must be positive");
    }
    return static_cast<double>(n_nodes) * env.packet_bits / rate;
}

double hover_time(long n_nodes, double rate, const EnvParams& env) {
    return static_cast<double>(n_nodes) * env.slot_seconds + upload_time(n_nodes, rate, env);
}

double hover_energy(long n_nodes, double rate, const EnvParams& env, const UavParams& uav) {
    return uav.hover_power() * hover_time(n_nodes, rate, env) + uav.p_com * upload_time(n_nodes, rate, env);
}

double fly_energy(const Vec3& a, const Vec3& b, const UavParams& uav) {
    return propulsion_power(uav.speed, uav) * fly_time(a, b, uav);
}

}  // namespace aoilab::kinematics

#include "aoilab/channel.hpp"

namespace aoilab::kinematics {

double effective_energy(const Tour& tour, const Scenario& scenario) {
    validate_tour(tour, scenario);
    double total = 0.0;
    const std::size_t m = tour.size();
    for (std::size_t t = 0; t < m; ++t) {
        const auto& cluster = scenario.clusters[tour.order[t]];
        const double r = channel::rate_at(tour.points[t], cluster.ch_position, scenario.env);
        total += hover_energy(cluster.node_count, r, scenario.env, scenario.uav);
        const Vec3& next = t + 1 < m ? tour.points[t + 1] : scenario.start;
        total += fly_energy(tour.points[t], next, scenario.uav);
    }
    return total;
}

double mission_energy(const Tour& tour, const Scenario& scenario) {
    validate_tour(tour, scenario);
    return fly_energy(scenario.start, tour.points.front(), scenario.uav) + effective_energy(tour, scenario);
}

}  // namespace aoilab::kinematics
