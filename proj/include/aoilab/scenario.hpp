#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aoilab/geometry.hpp"

namespace aoilab {

// Radio environment and data-collection constants. Defaults are the reference
// simulation values; noise power is stored in watts (-110 dBm = 1e-14 W) and the
// SNR threshold as a linear ratio (20 dB = 100).
struct EnvParams {
    double beta = 12.08;
    double beta_tilde = 0.11;   // per degree
    double xi_los = 1.0;        // dB
    double xi_nlos = 20.0;      // dB
    double carrier_freq = 2e9;  // Hz
    double light_speed = 3e8;   // m/s
    double noise_power = 1e-14; // W
    double ch_tx_power = 0.1;   // W
    double snr_threshold = 100.0;
    double bandwidth = 1e6;     // Hz
    double packet_bits = 5e6;   // bits
    double slot_seconds = 0.1;  // s
    double altitude = 100.0;    // m
    int l_sub = 5;

    friend bool operator==(const EnvParams&, const EnvParams&) = default;
};

// Rotary-wing propulsion model constants.
struct UavParams {
    double speed = 15.0;  // m/s
    double p0 = 99.66;    // blade profile power, W
    double p1 = 120.16;   // induced power, W
    double u_tip = 120.0; // m/s
    double v0 = 0.002;    // mean rotor induced velocity, m/s
    double d0 = 0.48;
    double rho = 1.225;   // kg/m^3
    double s0 = 0.0001;
    double delta = 0.5;   // m^2
    double p_com = 0.1;   // W

    double hover_power() const { return p0 + p1; }

    friend bool operator==(const UavParams&, const UavParams&) = default;
};

struct GroundCluster {
    Vec2 ch_position;
    int node_count = 1;

    friend bool operator==(const GroundCluster&, const GroundCluster&) = default;
};

struct Scenario {
    Vec3 start;
    std::vector<GroundCluster> clusters;
    EnvParams env;
    UavParams uav;
    std::uint64_t seed = 0;

    std::size_t size() const { return clusters.size(); }
    long total_nodes() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Sampled hovering points of one cluster's service disk, at altitude H.
struct CandidateGrid {
    std::size_t cluster_index = 0;
    std::vector<Vec3> points;
    double radius = 0.0;
    Vec3 center;  // point directly above the cluster head
};

double db_to_linear(double db);
double linear_to_db(double ratio);
double dbm_to_watts(double dbm);

// Throws ParameterError on invariant violations (non-positive constants,
// xi_los >= xi_nlos, snr_threshold <= 1, empty clusters, ...).
void validate(const EnvParams& env);
void validate(const UavParams& uav);
void validate(const Scenario& scenario);

// Random instance: CH coordinates uniform on [0, area_side]^2, node counts drawn
// uniformly from node_count_choices, start at (0, 0, H).
Scenario generate_scenario(std::uint64_t seed, std::size_t m, double area_side,
                           const std::vector<int>& node_count_choices,
                           const EnvParams& env = {}, const UavParams& uav = {});

// Splits [-R, R]^2 around the disk center into l_sub^2 cells. Cells inside the
// disk contribute their center; cells cut by the boundary contribute the
// centroid of cell-intersect-disk (64x64 sub-cell quadrature); empty cells are dropped.
CandidateGrid build_candidate_grid(const GroundCluster& cluster, std::size_t cluster_index,
                                   double service_radius, int l_sub, double altitude);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& s, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace aoilab
