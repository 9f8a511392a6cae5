#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aoilab/instance.hpp"
#include "aoilab/tour.hpp"

namespace aoilab::baselines {

// Joint encoding of a solution: a visiting order plus one grid index per
// cluster (choice[c] indexes grids[c], independent of when c is visited).
struct Chromosome {
    std::vector<std::size_t> order;
    std::vector<std::size_t> choice;

    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

Tour chromosome_tour(const ProblemInstance& inst, const Chromosome& c);
double chromosome_cost(const ProblemInstance& inst, const Chromosome& c);

struct SolverResult {
    Tour tour;
    double total_aoi = 0.0;
    std::vector<double> best_history;  // best cost after each iteration / generation
};

struct SaConfig {
    double t0 = 100.0;
    double cooling = 0.99;
    std::size_t max_iter = 1000;
    std::uint64_t seed = 0;
};

struct GaConfig {
    std::size_t population_size = 0;  // 0 means the total number of candidate points
    std::size_t max_iter = 10000;
    double crossover_rate = 0.1;
    double mutation_rate = 0.8;
    std::uint64_t seed = 0;
    std::vector<Chromosome> initial;  // placed first in the initial population
};

void validate(const SaConfig& config);
void validate(const GaConfig& config);

// Starts from a seeded random order with each cluster's point nearest its CH.
// A move either reverses a random order segment or re-draws one cluster's
// point (even odds); acceptance is Metropolis with geometric cooling.
SolverResult solve_sa(const ProblemInstance& inst, const SaConfig& config);

// Generational GA with tournament selection and one elite. Orders recombine
// by order crossover and mutate by swapping two positions; point choices
// recombine uniformly and mutate by re-drawing one cluster's point.
SolverResult solve_ga(const ProblemInstance& inst, const GaConfig& config);

// Repeatedly appends the cluster with the smallest weighted increment of
// flight plus hover cost at its disk center, then picks points exactly.
SolverResult solve_nearest_neighbor(const ProblemInstance& inst);

// Uniform random order with exact point selection.
SolverResult solve_random(const ProblemInstance& inst, std::uint64_t seed);

}  // namespace aoilab::baselines
