#pragma once

#include "aoilab/geometry.hpp"
#include "aoilab/scenario.hpp"

namespace aoilab::kinematics {

double fly_time(const Vec3& a, const Vec3& b, const UavParams& uav);

// Rotary-wing propulsion power at horizontal speed v: blade profile, induced
// and parasite terms. The induced term is evaluated in a cancellation-free form.
double propulsion_power(double v, const UavParams& uav);

// Slot-by-slot collection from N nodes plus the CH-to-UAV upload of N packets.
double hover_time(long n_nodes, double rate, const EnvParams& env);
double upload_time(long n_nodes, double rate, const EnvParams& env);
double hover_energy(long n_nodes, double rate, const EnvParams& env, const UavParams& uav);
double fly_energy(const Vec3& a, const Vec3& b, const UavParams& uav);

}  // namespace aoilab::kinematics

#include "aoilab/tour.hpp"

namespace aoilab::kinematics {

// Hover energy at every stop plus flight energy of every leg after the first
// hovering point (the outbound leg from the start is excluded).
double effective_energy(const Tour& tour, const Scenario& scenario);

// Effective energy plus the outbound leg.
double mission_energy(const Tour& tour, const Scenario& scenario);

}  // namespace aoilab::kinematics
