#pragma once

#include <cstddef>
#include <vector>

#include "aoilab/instance.hpp"
#include "aoilab/tour.hpp"

namespace aoilab::router {

// Layers 0..M+1: {start}, G_pi(1), ..., G_pi(M), {start clone}. Entering node
// (g, i) costs node_cost[g][i] = W_g * T_hov; the edge (g, i) -> (g+1, j) costs
// W_g * T_fly with W_0 = 0, which makes the total AoI edge-additive:
// total_aoi = path cost + constant_offset.
struct LayeredGraph {
    std::vector<std::size_t> order;
    std::vector<std::vector<Vec3>> points;
    std::vector<std::vector<double>> node_cost;
    std::vector<double> weight;  // W_g per layer, zero on both terminal layers
    std::vector<Vec3> centers;   // disk center per layer (the start point on terminals)
    std::vector<double> slack;   // max distance of a layer's points from its center
    double speed = 1.0;
    double constant_offset = 0.0;

    std::size_t layer_count() const { return points.size(); }
    std::size_t goal_layer() const { return points.size() - 1; }
    double edge_cost(std::size_t g, std::size_t i, std::size_t j) const;
};

LayeredGraph build_layered_graph(const ProblemInstance& inst, const std::vector<std::size_t>& order);

// Admissible and consistent lower bound on the cost from (g, p) to the goal:
// the next leg is bounded by the distance to the next disk minus its spread,
// later legs by center distances minus both spreads, and every remaining
// layer contributes its cheapest hover cost.
class Heuristic {
public:
    explicit Heuristic(const LayeredGraph& graph);
    double operator()(std::size_t layer, std::size_t index) const;

private:
    const LayeredGraph* graph_;
    std::vector<double> tail_;  // bound on cost beyond layer g+1's arrival, per g
};

struct Expansion {
    std::size_t layer = 0;
    std::size_t index = 0;
    double g = 0.0;
    double h = 0.0;
    double f = 0.0;
};

struct SearchResult {
    std::vector<std::size_t> chosen;  // point index per layer (0 on terminal layers)
    double path_cost = 0.0;
    double total_aoi = 0.0;
    std::size_t expanded_nodes = 0;
    std::vector<std::vector<long>> came_from;  // predecessor index in layer g-1, -1 if unreached
    std::vector<Expansion> trace;               // filled when requested
};

struct SearchOptions {
    double omega = 1.2;
    bool record_trace = false;
};

// Best-first search on f = g + omega * h over a binary min-heap with lazy
// deletion; nodes are re-opened when a cheaper g is found. Ties on f go to the
// lower layer, then to the earlier insertion.
SearchResult weighted_astar(const LayeredGraph& graph, const SearchOptions& options = {});

// Layered shortest path by forward value iteration (exact for the order).
SearchResult exact_dp(const LayeredGraph& graph);

// Exact cost-to-goal for every node, by backward value iteration.
std::vector<std::vector<double>> cost_to_go(const LayeredGraph& graph);

// Tour for the graph's order using the search's chosen points.
Tour to_tour(const LayeredGraph& graph, const SearchResult& result);

struct Solution {
    Tour tour;
    double total_aoi = 0.0;
};

// Hovering points for a fixed order, chosen by weighted A*.
Solution refine_order(const ProblemInstance& inst, const std::vector<std::size_t>& order, double omega);

// Hovering points for a fixed order, chosen by exact_dp.
Solution refine_order_exact(const ProblemInstance& inst, const std::vector<std::size_t>& order);

constexpr std::size_t kDefaultGlobalCap = 7;

// All M! orders, each solved by exact_dp. Refuses M above `max_clusters`.
Solution exact_global(const ProblemInstance& inst, std::size_t max_clusters = kDefaultGlobalCap);

}  // namespace aoilab::router
