#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "aoilab/aoi.hpp"
#include "aoilab/channel.hpp"
#include "aoilab/errors.hpp"
#include "aoilab/kinematics.hpp"
#include "support/instances.hpp"

using namespace aoilab;
using namespace testsupport;

namespace {

// One cluster of two nodes, 1500 m from the start, with the packet size tuned so
// that hovering takes 22 s and the return leg 100 s.
struct SingleCluster {
    Scenario scenario;
    Tour tour;
};

SingleCluster single_cluster(int nodes = 2) {
    Scenario s;
    s.start = {0.0, 0.0, 100.0};
    s.clusters = {{{1500.0, 0.0}, nodes}};
    const Vec3 hover{1500.0, 0.0, 100.0};
    s.env.packet_bits = 10.9 * channel::rate_at(hover, s.clusters[0].ch_position, s.env);
    return {s, Tour{{0}, {hover}}};
}

// AoI of the n-th packet at visit step t as the sum of the in-cluster
// collection time and the carrying time to the end point.
double two_component_aoi(const Tour& tour, const Scenario& sc, std::size_t t, std::size_t n) {
    const std::size_t m = tour.size();
    auto hover = [&](std::size_t step) {
        const auto& cl = sc.clusters[tour.order[step - 1]];
        const double r = channel::rate_at(tour.points[step - 1], cl.ch_position, sc.env);
        return cl.node_count * sc.env.slot_seconds + cl.node_count * sc.env.packet_bits / r;
    };
    auto fly = [&](const Vec3& a, const Vec3& b) { return distance(a, b) / sc.uav.speed; };
    const auto& cl = sc.clusters[tour.order[t - 1]];
    const double r = channel::rate_at(tour.points[t - 1], cl.ch_position, sc.env);
    double a = (cl.node_count - (static_cast<double>(n) - 1.0)) * sc.env.slot_seconds +
               cl.node_count * sc.env.packet_bits / r;
    for (std::size_t g = t; g <= m - 1; ++g) {
        a += fly(tour.points[g - 1], tour.points[g]) + hover(g + 1);
    }
    return a + fly(tour.points[m - 1], sc.start);
}

Tour random_tour(const ProblemInstance& inst, Rng& rng) {
    const auto order = random_order(inst.size(), rng);
    return make_tour(order, random_choice(inst, order, rng), inst.grids);
}

}  // namespace

TEST_CASE("instantaneous age") {
    CHECK(aoi::instantaneous_aoi(5.0, 3.0) == 2.0);
    CHECK(aoi::instantaneous_aoi(3.0, 5.0) == 0.0);
    CHECK(aoi::instantaneous_aoi(4.5, 4.5) == 0.0);
}

TEST_CASE("single-cluster arithmetic") {
    const auto [sc, tour] = single_cluster();
    CHECK(aoi::node_aoi(tour, 1, 1, sc) == doctest::Approx(122.0).epsilon(1e-12));
    CHECK(aoi::node_aoi(tour, 1, 2, sc) == doctest::Approx(121.9).epsilon(1e-12));
    CHECK(aoi::total_aoi(tour, sc) == doctest::Approx(243.9).epsilon(1e-12));
    CHECK(aoi::total_aoi_direct(tour, sc) == doctest::Approx(243.9).epsilon(1e-12));
    CHECK(aoi::oldest_packet_aoi(tour, sc) == doctest::Approx(122.0).epsilon(1e-12));
    CHECK_THROWS_AS(aoi::node_aoi(tour, 0, 1, sc), IndexError);
    CHECK_THROWS_AS(aoi::node_aoi(tour, 2, 1, sc), IndexError);
    CHECK_THROWS_AS(aoi::node_aoi(tour, 1, 3, sc), IndexError);
    CHECK_THROWS_AS(aoi::node_aoi(tour, 1, 0, sc), IndexError);

    const aoi::AoIReport rep = aoi::evaluate(tour, sc);
    CHECK(rep.ledger.fly_time.size() == 2);
    CHECK(rep.ledger.fly_time[0] == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(rep.ledger.fly_time_after_first_stop() == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(rep.ledger.total_hover_time() == doctest::Approx(22.0).epsilon(1e-12));
}

TEST_CASE("cumulative weights") {
    Scenario s;
    s.start = {0.0, 0.0, 100.0};
    s.clusters = {{{0.0, 10.0}, 10}, {{10.0, 0.0}, 5}, {{10.0, 10.0}, 20}};
    CHECK(aoi::cumulative_weights({1, 0}, Scenario{s.start, {s.clusters[0], s.clusters[1]}, {}, {}, 0}) ==
          std::vector<long>{5, 15});
    CHECK(aoi::cumulative_weights({0}, Scenario{s.start, {s.clusters[2]}, {}, {}, 0}) == std::vector<long>{20});
    const auto a = aoi::cumulative_weights({1, 0, 2}, s);
    const auto b = aoi::cumulative_weights({1, 2, 0}, s);
    CHECK(a.front() == b.front());
    CHECK(a.back() == 35);
    CHECK(aoi::slot_offset_constant(s) == doctest::Approx(0.1 * (45 + 10 + 190)).epsilon(1e-15));
}

TEST_CASE("per-node age matches the two-component decomposition") {
    Rng rng(77);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const ProblemInstance inst = random_instance(seed, 1 + seed % 9);
        const Tour tour = random_tour(inst, rng);
        for (std::size_t t = 1; t <= tour.size(); ++t) {
            const int n_max = inst.scenario.clusters[tour.order[t - 1]].node_count;
            for (int n = 1; n <= n_max; ++n) {
                const double oracle = two_component_aoi(tour, inst.scenario, t, static_cast<std::size_t>(n));
                CHECK(std::abs(aoi::node_aoi(tour, t, n, inst.scenario) - oracle) <= 1e-12 * oracle);
            }
        }
    }
}

TEST_CASE("orderings, positivity and objective identity") {
    Rng rng(5);
    for (std::uint64_t seed = 100; seed < 300; ++seed) {
        const ProblemInstance inst = random_instance(seed, 1 + seed % 15);
        const Tour tour = random_tour(inst, rng);
        const aoi::AoIReport rep = aoi::evaluate(tour, inst.scenario);
        const double tau = inst.scenario.env.slot_seconds;
        double max_age = 0.0;
        double min_age = 1e300;
        for (std::size_t t = 0; t < rep.per_node_aoi.size(); ++t) {
            const auto& row = rep.per_node_aoi[t];
            for (std::size_t n = 0; n < row.size(); ++n) {
                CHECK(row[n] > 0.0);
                max_age = std::max(max_age, row[n]);
                min_age = std::min(min_age, row[n]);
                if (n + 1 < row.size()) {
                    CHECK(row[n] > row[n + 1]);
                    CHECK(row[n] - row[n + 1] == doctest::Approx(tau).epsilon(1e-9));
                }
                if (t + 1 < rep.per_node_aoi.size() && n < rep.per_node_aoi[t + 1].size()) {
                    CHECK(row[n] > rep.per_node_aoi[t + 1][n]);
                }
            }
        }
        CHECK(rep.oldest_aoi == max_age);
        CHECK(min_age == rep.per_node_aoi.back().back());
        CHECK(rep.oldest_aoi == doctest::Approx(rep.ledger.fly_time_after_first_stop() +
                                                rep.ledger.total_hover_time())
                                    .epsilon(1e-12));
        const double direct = aoi::total_aoi_direct(tour, inst.scenario);
        CHECK(std::abs(rep.total_aoi - direct) <= 1e-10 * direct);
    }
}

TEST_CASE("adding a node to the last cluster raises the total") {
    Rng rng(9);
    const ProblemInstance inst = random_instance(12, 6);
    const Tour tour = random_tour(inst, rng);
    Scenario more = inst.scenario;
    more.clusters[tour.order.back()].node_count += 1;
    CHECK(aoi::total_aoi(tour, more) > aoi::total_aoi(tour, inst.scenario));
}

TEST_CASE("ledger entries") {
    Rng rng(10);
    const ProblemInstance inst = random_instance(13, 8);
    const Tour tour = random_tour(inst, rng);
    const aoi::TimeEnergyLedger l = aoi::build_ledger(tour, inst.scenario);
    CHECK(l.fly_time.size() == 9);
    CHECK(l.hover_time.size() == 8);
    double total = 0.0;
    for (double e : l.hover_energy) {
        CHECK(e >= 0.0);
        total += e;
    }
    for (double e : l.fly_energy) {
        CHECK(e >= 0.0);
        total += e;
    }
    CHECK(l.total_energy == doctest::Approx(total).epsilon(1e-14));
    CHECK(l.total_energy == doctest::Approx(kinematics::mission_energy(tour, inst.scenario)).epsilon(1e-14));
    CHECK(l.effective_energy == doctest::Approx(l.total_energy - l.fly_energy[0]).epsilon(1e-12));
}

TEST_CASE("invalid tours are rejected") {
    const ProblemInstance inst = random_instance(3, 3);
    Tour bad{{0, 0, 1}, {inst.grids[0].center, inst.grids[0].center, inst.grids[1].center}};
    CHECK_THROWS_AS(aoi::total_aoi(bad, inst.scenario), ParameterError);
    Tour short_points{{0, 1, 2}, {inst.grids[0].center}};
    CHECK_THROWS_AS(aoi::evaluate(short_points, inst.scenario), ParameterError);
}
