#include "aoilab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aoilab/aoi.hpp"
#include "aoilab/channel.hpp"
#include "aoilab/errors.hpp"
#include "aoilab/kinematics.hpp"
#include "aoilab/rng.hpp"
#include "aoilab/router.hpp"

namespace aoilab::baselines {

namespace {

std::size_t nearest_to_center(const CandidateGrid& g) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.points.size(); ++i) {
        const double d = distance(g.points[i], g.center);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<std::size_t> random_order(std::size_t m, Rng& rng) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    return order;
}

Chromosome random_chromosome(const ProblemInstance& inst, Rng& rng) {
    Chromosome c{random_order(inst.size(), rng), {}};
    for (const auto& g : inst.grids) {
        c.choice.push_back(rng.index(g.points.size()));
    }
    return c;
}

// Order crossover: a slice of parent a is kept in place, the remaining
// positions are filled with b's elements in b's order.
std::vector<std::size_t> order_crossover(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                                         Rng& rng) {
    const std::size_t m = a.size();
    std::size_t i = rng.index(m);
    std::size_t j = rng.index(m);
    if (i > j) {
        std::swap(i, j);
    }
    std::vector<std::size_t> child(m, m);
    std::vector<bool> used(m, false);
    for (std::size_t k = i; k <= j; ++k) {
        child[k] = a[k];
        used[a[k]] = true;
    }
    std::size_t pos = (j + 1) % m;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t gene = b[(j + 1 + k) % m];
        if (used[gene]) {
            continue;
        }
        while (child[pos] != m) {
            pos = (pos + 1) % m;
        }
        child[pos] = gene;
        used[gene] = true;
    }
    return child;
}

SolverResult finish(const ProblemInstance& inst, const Chromosome& best, std::vector<double> history) {
    SolverResult r;
    r.tour = chromosome_tour(inst, best);
    r.total_aoi = aoi::total_aoi(r.tour, inst.scenario);
    r.best_history = std::move(history);
    return r;
}

}  // namespace

Tour chromosome_tour(const ProblemInstance& inst, const Chromosome& c) {
    std::vector<std::size_t> per_step;
    per_step.reserve(c.order.size());
    for (std::size_t cl : c.order) {
        per_step.push_back(c.choice.at(cl));
    }
    return make_tour(c.order, per_step, inst.grids);
}

double chromosome_cost(const ProblemInstance& inst, const Chromosome& c) {
    return aoi::total_aoi(chromosome_tour(inst, c), inst.scenario);
}

void validate(const SaConfig& c) {
    if (!(c.t0 > 0.0) || !(c.cooling > 0.0 && c.cooling < 1.0)) {
        throw ParameterError("annealing needs t0 > 0 and cooling in (0, 1)");
    }
}

void validate(const GaConfig& c) {
    if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0) ||
        !(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0)) {
        throw ParameterError("genetic algorithm rates must lie in [0, 1]");
    }
}

SolverResult solve_sa(const ProblemInstance& inst, const SaConfig& config) {
    validate(config);
    const std::size_t m = inst.size();
    Rng rng(config.seed, 0x5341);
    Chromosome cur{random_order(m, rng), {}};
    for (const auto& g : inst.grids) {
        cur.choice.push_back(nearest_to_center(g));
    }
    double cur_cost = chromosome_cost(inst, cur);
    Chromosome best = cur;
    double best_cost = cur_cost;
    std::vector<double> history;
    history.reserve(config.max_iter);
    double temperature = config.t0;
    for (std::size_t it = 0; it < config.max_iter; ++it) {
        Chromosome cand = cur;
        if (m >= 2 && rng.uniform() < 0.5) {
            std::size_t i = rng.index(m);
            std::size_t j = rng.index(m);
            if (i > j) {
                std::swap(i, j);
            }
            std::reverse(cand.order.begin() + static_cast<long>(i), cand.order.begin() + static_cast<long>(j) + 1);
        } else {
            const std::size_t c = rng.index(m);
            cand.choice[c] = rng.index(inst.grids[c].points.size());
        }
        const double cost = chromosome_cost(inst, cand);
        const double delta = cost - cur_cost;
        if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temperature)) {
            cur = std::move(cand);
            cur_cost = cost;
            if (cur_cost < best_cost) {
                best = cur;
                best_cost = cur_cost;
            }
        }
        history.push_back(best_cost);
        temperature *= config.cooling;
    }
    return finish(inst, best, std::move(history));
}

SolverResult solve_ga(const ProblemInstance& inst, const GaConfig& config) {
    validate(config);
    std::size_t pop_size = config.population_size;
    if (pop_size == 0) {
        for (const auto& g : inst.grids) {
            pop_size += g.points.size();
        }
    }
    pop_size = std::max<std::size_t>(pop_size, 2);
    Rng rng(config.seed, 0x4741);
    std::vector<Chromosome> pop;
    for (const auto& c : config.initial) {
        if (pop.size() == pop_size) {
            break;
        }
        if (!is_permutation_of(c.order, inst.size()) || c.choice.size() != inst.size()) {
            throw ParameterError("initial chromosome does not match the instance");
        }
        pop.push_back(c);
    }
    while (pop.size() < pop_size) {
        pop.push_back(random_chromosome(inst, rng));
    }
    std::vector<double> cost(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) {
        cost[i] = chromosome_cost(inst, pop[i]);
    }
    auto best_index = [&] {
        return static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin());
    };
    auto tournament = [&]() -> const Chromosome& {
        const std::size_t a = rng.index(pop_size);
        const std::size_t b = rng.index(pop_size);
        return cost[b] < cost[a] ? pop[b] : pop[a];
    };
    const std::size_t m = inst.size();
    std::vector<double> history;
    history.reserve(config.max_iter);
    for (std::size_t gen = 0; gen < config.max_iter; ++gen) {
        std::vector<Chromosome> next;
        next.reserve(pop_size);
        next.push_back(pop[best_index()]);
        while (next.size() < pop_size) {
            const Chromosome& p1 = tournament();
            const Chromosome& p2 = tournament();
            Chromosome child = p1;
            if (rng.uniform() < config.crossover_rate) {
                child.order = order_crossover(p1.order, p2.order, rng);
                for (std::size_t c = 0; c < m; ++c) {
                    if (rng.uniform() < 0.5) {
                        child.choice[c] = p2.choice[c];
                    }
                }
            }
            if (rng.uniform() < config.mutation_rate) {
                if (m >= 2) {
                    std::swap(child.order[rng.index(m)], child.order[rng.index(m)]);
                }
                const std::size_t c = rng.index(m);
                child.choice[c] = rng.index(inst.grids[c].points.size());
            }
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        for (std::size_t i = 0; i < pop_size; ++i) {
            cost[i] = chromosome_cost(inst, pop[i]);
        }
        history.push_back(cost[best_index()]);
    }
    return finish(inst, pop[best_index()], std::move(history));
}

SolverResult solve_nearest_neighbor(const ProblemInstance& inst) {
    const Scenario& sc = inst.scenario;
    const std::size_t m = inst.size();
    std::vector<bool> used(m, false);
    std::vector<std::size_t> order;
    Vec3 at = sc.start;
    long weight = 0;
    for (std::size_t step = 0; step < m; ++step) {
        std::size_t pick = m;
        double pick_cost = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m; ++c) {
            if (used[c]) {
                continue;
            }
            const Vec3& ctr = inst.grids[c].center;
            const long n = sc.clusters[c].node_count;
            const double hover =
                kinematics::hover_time(n, channel::rate_at(ctr, sc.clusters[c].ch_position, sc.env), sc.env);
            const double inc = static_cast<double>(weight) * kinematics::fly_time(at, ctr, sc.uav) +
                               static_cast<double>(weight + n) * hover;
            if (inc < pick_cost) {
                pick_cost = inc;
                pick = c;
            }
        }
        used[pick] = true;
        order.push_back(pick);
        weight += sc.clusters[pick].node_count;
        at = inst.grids[pick].center;
    }
    router::Solution s = router::refine_order_exact(inst, order);
    return {s.tour, s.total_aoi, {s.total_aoi}};
}

SolverResult solve_random(const ProblemInstance& inst, std::uint64_t seed) {
    Rng rng(seed, 0x524e44);
    router::Solution s = router::refine_order_exact(inst, random_order(inst.size(), rng));
    return {s.tour, s.total_aoi, {s.total_aoi}};
}

}  // namespace aoilab::baselines
