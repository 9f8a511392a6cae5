#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "aoilab/aoi.hpp"
#include "aoilab/baselines.hpp"
#include "aoilab/errors.hpp"
#include "aoilab/router.hpp"
#include "support/instances.hpp"

using namespace aoilab;
using namespace aoilab::baselines;
using namespace testsupport;

namespace {

void check_result(const ProblemInstance& inst, const SolverResult& r) {
    CHECK(is_feasible(r.tour, inst.scenario, inst.grids));
    const double again = aoi::total_aoi(r.tour, inst.scenario);
    CHECK(std::abs(r.total_aoi - again) <= 1e-9 * again);
    for (std::size_t k = 1; k < r.best_history.size(); ++k) {
        CHECK(r.best_history[k] <= r.best_history[k - 1]);
    }
}

Chromosome to_chromosome(const ProblemInstance& inst, const Tour& tour) {
    Chromosome c{tour.order, std::vector<std::size_t>(inst.size(), 0)};
    for (std::size_t k = 0; k < tour.size(); ++k) {
        const auto& pts = inst.grids[tour.order[k]].points;
        c.choice[tour.order[k]] =
            static_cast<std::size_t>(std::find(pts.begin(), pts.end(), tour.points[k]) - pts.begin());
    }
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    SaConfig sa;
    sa.cooling = 1.0;
    CHECK_THROWS_AS(validate(sa), ParameterError);
    sa.cooling = 0.99;
    sa.t0 = 0.0;
    CHECK_THROWS_AS(validate(sa), ParameterError);
    GaConfig ga;
    ga.crossover_rate = 1.5;
    CHECK_THROWS_AS(validate(ga), ParameterError);
    ga.crossover_rate = 0.1;
    ga.mutation_rate = -0.1;
    CHECK_THROWS_AS(validate(ga), ParameterError);
    CHECK_NOTHROW(validate(SaConfig{}));
    CHECK_NOTHROW(validate(GaConfig{}));
}

TEST_CASE("chromosome decoding") {
    const ProblemInstance inst = random_instance(1, 3, 2);
    const Chromosome c{{2, 0, 1}, {1, 0, 2}};
    const Tour t = chromosome_tour(inst, c);
    CHECK(t.order == c.order);
    CHECK(t.points[0] == inst.grids[2].points[2]);
    CHECK(t.points[1] == inst.grids[0].points[1]);
    CHECK(chromosome_cost(inst, c) == aoi::total_aoi(t, inst.scenario));
}

TEST_CASE("one cluster: every solver finds the optimum") {
    const ProblemInstance inst = random_instance(3, 1, 3);
    const double opt = router::exact_global(inst).total_aoi;
    GaConfig ga;
    ga.max_iter = 50;
    for (const SolverResult& r : {solve_sa(inst, {}), solve_ga(inst, ga), solve_nearest_neighbor(inst),
                                  solve_random(inst, 4)}) {
        CHECK(r.total_aoi == doctest::Approx(opt).epsilon(1e-12));
    }
}

TEST_CASE("seeded solvers are reproducible") {
    const ProblemInstance inst = random_instance(9, 8);
    CHECK(solve_random(inst, 5).tour == solve_random(inst, 5).tour);
    SaConfig sa;
    sa.seed = 3;
    CHECK(solve_sa(inst, sa).tour == solve_sa(inst, sa).tour);
    GaConfig ga;
    ga.seed = 3;
    ga.max_iter = 30;
    CHECK(solve_ga(inst, ga).best_history == solve_ga(inst, ga).best_history);
}

TEST_CASE("simulated annealing with no iterations keeps its start") {
    const ProblemInstance inst = random_instance(10, 6, 3);
    SaConfig sa;
    sa.max_iter = 0;
    const SolverResult r = solve_sa(inst, sa);
    check_result(inst, r);
    for (std::size_t k = 0; k < r.tour.size(); ++k) {
        const auto& g = inst.grids[r.tour.order[k]];
        for (const Vec3& p : g.points) {
            CHECK(distance(r.tour.points[k], g.center) <= distance(p, g.center));
        }
    }
}

TEST_CASE("elitism keeps a seeded optimum") {
    const ProblemInstance inst = random_instance(11, 4, 2);
    const router::Solution opt = router::exact_global(inst);
    GaConfig ga;
    ga.max_iter = 40;
    ga.population_size = 12;
    ga.initial.assign(12, to_chromosome(inst, opt.tour));
    const SolverResult r = solve_ga(inst, ga);
    check_result(inst, r);
    CHECK(r.total_aoi == doctest::Approx(opt.total_aoi).epsilon(1e-12));
}

TEST_CASE("exact optimum bounds every baseline; metaheuristic gaps stay small") {
    // Development-time gaps on these 50 instances: SA mean 2.7 %, GA 0 %.
    double sa_gap = 0.0;
    double ga_gap = 0.0;
    const int count = 50;
    for (int i = 0; i < count; ++i) {
        const ProblemInstance inst = random_instance(5000 + i, 5, 2);
        const double opt = router::exact_global(inst).total_aoi;
        SaConfig sa;
        sa.seed = i;
        GaConfig ga;
        ga.seed = i;
        const SolverResult rs = solve_sa(inst, sa);
        const SolverResult rg = solve_ga(inst, ga);
        const SolverResult rn = solve_nearest_neighbor(inst);
        const SolverResult rr = solve_random(inst, i);
        for (const SolverResult* r : {&rs, &rg, &rn, &rr}) {
            check_result(inst, *r);
            CHECK(r->total_aoi >= opt * (1.0 - 1e-12));
        }
        sa_gap += rs.total_aoi / opt - 1.0;
        ga_gap += rg.total_aoi / opt - 1.0;
    }
    CHECK(sa_gap / count < 0.05);
    CHECK(ga_gap / count < 0.01);
}

TEST_CASE("nearest neighbour beats a random order on average") {
    // Development-time comparison on these instances: nearest neighbour is at
    // or below the 100-seed random mean on 29 of 30.
    int wins = 0;
    double nn_total = 0.0;
    double random_total = 0.0;
    for (int i = 0; i < 30; ++i) {
        const ProblemInstance inst = random_instance(7000 + i, 10);
        const double nn = solve_nearest_neighbor(inst).total_aoi;
        double mean = 0.0;
        for (int s = 0; s < 100; ++s) {
            mean += solve_random(inst, s).total_aoi;
        }
        mean /= 100.0;
        wins += nn <= mean;
        nn_total += nn;
        random_total += mean;
    }
    CHECK(wins >= 27);
    CHECK(nn_total < random_total);
}
