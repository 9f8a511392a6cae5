#pragma once

#include <cstddef>
#include <vector>

#include "aoilab/scenario.hpp"
#include "aoilab/tour.hpp"

namespace aoilab::aoi {

// Legs are indexed 0..M: leg 0 is start -> first stop, leg t (1 <= t < M) is
// stop t-1 -> stop t, leg M is the last stop -> start. Stops are indexed 0..M-1
// in visiting order.
struct TimeEnergyLedger {
    std::vector<double> fly_time;
    std::vector<double> hover_time;
    std::vector<double> fly_energy;
    std::vector<double> hover_energy;
    double effective_energy = 0.0;
    double total_energy = 0.0;

    double fly_time_after_first_stop() const;
    double total_hover_time() const;
};

struct AoIReport {
    std::vector<std::vector<double>> per_node_aoi;  // [visit step][node], 0-based
    double total_aoi = 0.0;
    double oldest_aoi = 0.0;
    TimeEnergyLedger ledger;
};

double instantaneous_aoi(double now, double generated_at);

TimeEnergyLedger build_ledger(const Tour& tour, const Scenario& scenario);

// AoI at return of the n-th packet (1-based) collected at visit step t (1-based).
double node_aoi(const Tour& tour, std::size_t t, std::size_t n, const Scenario& scenario);

// W_g = sum of node counts of the first g visited clusters, g = 1..M.
std::vector<long> cumulative_weights(const std::vector<std::size_t>& order, const Scenario& scenario);

// tau * sum_m N_m (N_m - 1) / 2: the slot offsets subtracted from every cluster.
double slot_offset_constant(const Scenario& scenario);

// Total AoI via the regrouped form sum_g W_g (T_hov,g + T_fly,g->g+1) - C.
double total_aoi(const Tour& tour, const Scenario& scenario);

// Total AoI as the literal double sum over visit steps and nodes.
double total_aoi_direct(const Tour& tour, const Scenario& scenario);

double oldest_packet_aoi(const Tour& tour, const Scenario& scenario);

AoIReport evaluate(const Tour& tour, const Scenario& scenario);

}  // namespace aoilab::aoi
