#include "aoilab/aoi.hpp"

#include <algorithm>

#include "aoilab/channel.hpp"
#include "aoilab/errors.hpp"
#include "aoilab/kinematics.hpp"

namespace aoilab::aoi {
namespace {

const Vec3& leg_end(const Tour& tour, const Scenario& s, std::size_t t) {
    return t + 1 < tour.size() ? tour.points[t + 1] : s.start;
}

double stop_hover_time(const Tour& tour, const Scenario& s, std::size_t t) {
    const auto& c = s.clusters[tour.order[t]];
    return kinematics::hover_time(c.node_count, channel::rate_at(tour.points[t], c.ch_position, s.env), s.env);
}

}  // namespace

double TimeEnergyLedger::fly_time_after_first_stop() const {
    double sum = 0.0;
    for (std::size_t i = 1; i < fly_time.size(); ++i) {
        sum += fly_time[i];
    }
    return sum;
}

double TimeEnergyLedger::total_hover_time() const {
    double sum = 0.0;
    for (double h : hover_time) {
        sum += h;
    }
    return sum;
}

double instantaneous_aoi(double now, double generated_at) { return std::max(0.0, now - generated_at); }

TimeEnergyLedger build_ledger(const Tour& tour, const Scenario& s) {
    validate_tour(tour, s);
    const std::size_t m = tour.size();
    TimeEnergyLedger ledger;
    ledger.fly_time.reserve(m + 1);
    ledger.fly_energy.reserve(m + 1);
    ledger.fly_time.push_back(kinematics::fly_time(s.start, tour.points[0], s.uav));
    ledger.fly_energy.push_back(kinematics::fly_energy(s.start, tour.points[0], s.uav));
    for (std::size_t t = 0; t < m; ++t) {
        const auto& c = s.clusters[tour.order[t]];
        const double r = channel::rate_at(tour.points[t], c.ch_position, s.env);
        ledger.hover_time.push_back(kinematics::hover_time(c.node_count, r, s.env));
        ledger.hover_energy.push_back(kinematics::hover_energy(c.node_count, r, s.env, s.uav));
        ledger.fly_time.push_back(kinematics::fly_time(tour.points[t], leg_end(tour, s, t), s.uav));
        ledger.fly_energy.push_back(kinematics::fly_energy(tour.points[t], leg_end(tour, s, t), s.uav));
    }
    // Visiting order: hover at stop t, then the leg leaving it.
    double effective = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        effective += ledger.hover_energy[t];
        effective += ledger.fly_energy[t + 1];
    }
    ledger.effective_energy = effective;
    ledger.total_energy = ledger.fly_energy[0] + effective;
    return ledger;
}

double node_aoi(const Tour& tour, std::size_t t, std::size_t n, const Scenario& s) {
    validate_tour(tour, s);
    const std::size_t m = tour.size();
    if (t < 1 || t > m) {
        throw IndexError("visit step out of range: " + std::to_string(t));
    }
    const auto count = static_cast<std::size_t>(s.clusters[tour.order[t - 1]].node_count);
    if (n < 1 || n > count) {
        throw IndexError("node index out of range: " + std::to_string(n));
    }
    double sum = 0.0;
    for (std::size_t g = t - 1; g < m; ++g) {
        sum += stop_hover_time(tour, s, g) + kinematics::fly_time(tour.points[g], leg_end(tour, s, g), s.uav);
    }
    return sum - static_cast<double>(n - 1) * s.env.slot_seconds;
}

std::vector<long> cumulative_weights(const std::vector<std::size_t>& order, const Scenario& s) {
    if (!is_permutation_of(order, s.size())) {
        throw ParameterError("order is not a permutation of the scenario's clusters");
    }
    std::vector<long> w;
    w.reserve(order.size());
    long acc = 0;
    for (std::size_t c : order) {
        acc += s.clusters[c].node_count;
        w.push_back(acc);
    }
    return w;
}

double slot_offset_constant(const Scenario& s) {
    double c = 0.0;
    for (const auto& cl : s.clusters) {
        const double n = cl.node_count;
        c += n * (n - 1.0) / 2.0;
    }
    return s.env.slot_seconds * c;
}

double total_aoi(const Tour& tour, const Scenario& s) {
    const auto w = cumulative_weights(tour.order, s);
    if (tour.points.size() != tour.order.size()) {
        throw ParameterError("tour needs exactly one hovering point per visit step");
    }
    double sum = 0.0;
    for (std::size_t g = 0; g < tour.size(); ++g) {
        const double stage = stop_hover_time(tour, s, g) + kinematics::fly_time(tour.points[g], leg_end(tour, s, g), s.uav);
        sum += static_cast<double>(w[g]) * stage;
    }
    return sum - slot_offset_constant(s);
}

double total_aoi_direct(const Tour& tour, const Scenario& s) {
    validate_tour(tour, s);
    const std::size_t m = tour.size();
    double total = 0.0;
    for (std::size_t t = 1; t <= m; ++t) {
        const int count = s.clusters[tour.order[t - 1]].node_count;
        for (int n = 1; n <= count; ++n) {
            total += node_aoi(tour, t, static_cast<std::size_t>(n), s);
        }
    }
    return total;
}

double oldest_packet_aoi(const Tour& tour, const Scenario& s) { return node_aoi(tour, 1, 1, s); }

AoIReport evaluate(const Tour& tour, const Scenario& s) {
    AoIReport report;
    report.ledger = build_ledger(tour, s);
    const std::size_t m = tour.size();
    // Remaining time from the start of stop t until return, accumulated backwards.
    std::vector<double> remaining(m + 1, 0.0);
    for (std::size_t t = m; t-- > 0;) {
        remaining[t] = remaining[t + 1] + report.ledger.hover_time[t] + report.ledger.fly_time[t + 1];
    }
    report.per_node_aoi.resize(m);
    for (std::size_t t = 0; t < m; ++t) {
        const int count = s.clusters[tour.order[t]].node_count;
        auto& row = report.per_node_aoi[t];
        row.reserve(static_cast<std::size_t>(count));
        for (int n = 0; n < count; ++n) {
            row.push_back(remaining[t] - n * s.env.slot_seconds);
        }
    }
    report.total_aoi = total_aoi(tour, s);
    report.oldest_aoi = remaining[0];
    return report;
}

}  // namespace aoilab::aoi
