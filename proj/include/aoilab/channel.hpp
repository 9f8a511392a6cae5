#pragma once

#include "aoilab/scenario.hpp"

namespace aoilab::channel {

// Horizontal CH-to-UAV distance and flight altitude. R = 0 means the UAV is
// directly overhead (elevation 90 degrees).
struct LinkGeometry {
    double horizontal_dist = 0.0;
    double altitude = 0.0;
};

struct LinkBudget {
    double p_los = 0.0;
    double avg_loss_db = 0.0;
    double snr_linear = 0.0;
    double rate_bps = 0.0;
};

// Elevation angle in degrees.
double elevation_deg(const LinkGeometry& geom);

double los_probability(const LinkGeometry& geom, const EnvParams& env);
double free_space_loss_db(const LinkGeometry& geom, const EnvParams& env);
double avg_path_loss(const LinkGeometry& geom, const EnvParams& env);
double snr(const LinkGeometry& geom, const EnvParams& env);
double rate(const LinkGeometry& geom, const EnvParams& env);
LinkBudget link_budget(const LinkGeometry& geom, const EnvParams& env);

// Rate from a hovering point to its cluster head at env.altitude.
double rate_at(const Vec3& hover, const Vec2& ch, const EnvParams& env);

// Radius of the horizontal disk in which snr >= env.snr_threshold at
// env.altitude. SNR decreases strictly with R, so bisection on a doubling
// bracket converges. Throws InfeasibleError if the threshold is not met even
// directly overhead.
double service_radius(const EnvParams& env);

}  // namespace aoilab::channel
