#include "aoilab/router.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

#include "aoilab/aoi.hpp"
#include "aoilab/channel.hpp"
#include "aoilab/errors.hpp"
#include "aoilab/kinematics.hpp"

namespace aoilab::router {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FrontierEntry {
    double f;
    std::size_t layer;
    std::uint64_t seq;
    std::size_t index;
    double g;
};

struct FrontierOrder {
    bool operator()(const FrontierEntry& a, const FrontierEntry& b) const {
        if (a.f != b.f) {
            return a.f > b.f;
        }
        if (a.layer != b.layer) {
            return a.layer > b.layer;
        }
        return a.seq > b.seq;
    }
};

SearchResult reconstruct(const LayeredGraph& graph, std::vector<std::vector<long>> came_from, double path_cost) {
    SearchResult r;
    const std::size_t layers = graph.layer_count();
    r.chosen.assign(layers, 0);
    std::size_t idx = 0;
    for (std::size_t g = layers - 1; g > 0; --g) {
        r.chosen[g] = idx;
        const long prev = came_from[g][idx];
        if (prev < 0) {
            throw ContractError("search finished without a predecessor chain");
        }
        idx = static_cast<std::size_t>(prev);
    }
    r.chosen[0] = 0;
    r.path_cost = path_cost;
    r.total_aoi = path_cost + graph.constant_offset;
    r.came_from = std::move(came_from);
    return r;
}

}  // namespace

double LayeredGraph::edge_cost(std::size_t g, std::size_t i, std::size_t j) const {
    return weight[g] * distance(points[g][i], points[g + 1][j]) / speed;
}

LayeredGraph build_layered_graph(const ProblemInstance& inst, const std::vector<std::size_t>& order) {
    const Scenario& s = inst.scenario;
    if (!is_permutation_of(order, s.size())) {
        throw ParameterError("order is not a permutation of the scenario's clusters");
    }
    if (inst.grids.size() != s.size()) {
        throw InfeasibleError("candidate grids do not cover every cluster");
    }
    LayeredGraph graph;
    graph.order = order;
    graph.speed = s.uav.speed;
    graph.constant_offset = -aoi::slot_offset_constant(s);
    const std::size_t m = order.size();
    graph.points.reserve(m + 2);
    graph.points.push_back({s.start});
    graph.node_cost.push_back({0.0});
    graph.weight.push_back(0.0);
    graph.centers.push_back(s.start);
    graph.slack.push_back(0.0);
    long w = 0;
    for (std::size_t c : order) {
        const CandidateGrid& grid = inst.grids[c];
        if (grid.points.empty()) {
            throw InfeasibleError("empty candidate grid for cluster " + std::to_string(c));
        }
        const auto& cluster = s.clusters[c];
        w += cluster.node_count;
        std::vector<double> costs;
        double spread = 0.0;
        costs.reserve(grid.points.size());
        for (const Vec3& p : grid.points) {
            const double r = channel::rate_at(p, cluster.ch_position, s.env);
            costs.push_back(static_cast<double>(w) * kinematics::hover_time(cluster.node_count, r, s.env));
            spread = std::max(spread, distance(p, grid.center));
        }
        graph.points.push_back(grid.points);
        graph.node_cost.push_back(std::move(costs));
        graph.weight.push_back(static_cast<double>(w));
        graph.centers.push_back(grid.center);
        graph.slack.push_back(spread);
    }
    graph.points.push_back({s.start});
    graph.node_cost.push_back({0.0});
    graph.weight.push_back(0.0);
    graph.centers.push_back(s.start);
    graph.slack.push_back(0.0);
    return graph;
}

Heuristic::Heuristic(const LayeredGraph& graph) : graph_(&graph) {
    const std::size_t layers = graph.layer_count();
    tail_.assign(layers, 0.0);
    // tail_[g]: bound on everything after arriving in layer g+1, i.e. hover of
    // layers g+1.. plus legs leaving layers g+1..M.
    for (std::size_t g = layers - 1; g-- > 0;) {
        const std::size_t next = g + 1;
        if (next >= layers - 1) {
            tail_[g] = 0.0;
            continue;
        }
        const auto& costs = graph.node_cost[next];
        const double min_hover = *std::min_element(costs.begin(), costs.end());
        const double gap = distance(graph.centers[next], graph.centers[next + 1]) - graph.slack[next] -
                           graph.slack[next + 1];
        const double leg = graph.weight[next] * std::max(0.0, gap) / graph.speed;
        tail_[g] = min_hover + leg + tail_[next];
    }
}

double Heuristic::operator()(std::size_t layer, std::size_t index) const {
    const LayeredGraph& graph = *graph_;
    if (layer + 1 >= graph.layer_count()) {
        return 0.0;
    }
    const std::size_t next = layer + 1;
    const double gap = distance(graph.points[layer][index], graph.centers[next]) - graph.slack[next];
    return graph.weight[layer] * std::max(0.0, gap) / graph.speed + tail_[layer];
}

SearchResult weighted_astar(const LayeredGraph& graph, const SearchOptions& options) {
    if (!(options.omega >= 1.0)) {
        throw ParameterError("omega must be at least 1");
    }
    const std::size_t layers = graph.layer_count();
    const Heuristic heuristic(graph);
    std::vector<std::vector<double>> cost(layers);
    std::vector<std::vector<long>> came_from(layers);
    for (std::size_t g = 0; g < layers; ++g) {
        cost[g].assign(graph.points[g].size(), kInf);
        came_from[g].assign(graph.points[g].size(), -1);
    }
    std::priority_queue<FrontierEntry, std::vector<FrontierEntry>, FrontierOrder> frontier;
    std::uint64_t seq = 0;
    cost[0][0] = 0.0;
    frontier.push({0.0, 0, seq++, 0, 0.0});
    std::size_t expanded = 0;
    std::vector<Expansion> trace;
    const std::size_t goal = graph.goal_layer();
    bool reached = false;
    while (!frontier.empty()) {
        const FrontierEntry cur = frontier.top();
        frontier.pop();
        if (cur.g > cost[cur.layer][cur.index]) {
            continue;  // stale entry
        }
        ++expanded;
        if (options.record_trace) {
            const double h = heuristic(cur.layer, cur.index);
            trace.push_back({cur.layer, cur.index, cur.g, h, cur.f});
        }
        if (cur.layer == goal) {
            reached = true;
            break;
        }
        const std::size_t next = cur.layer + 1;
        for (std::size_t j = 0; j < graph.points[next].size(); ++j) {
            const double g = cur.g + graph.edge_cost(cur.layer, cur.index, j) + graph.node_cost[next][j];
            if (g < cost[next][j]) {
                cost[next][j] = g;
                came_from[next][j] = static_cast<long>(cur.index);
                frontier.push({g + options.omega * heuristic(next, j), next, seq++, j, g});
            }
        }
    }
    if (!reached) {
        throw ContractError("goal layer unreachable");
    }
    SearchResult r = reconstruct(graph, std::move(came_from), cost[goal][0]);
    r.expanded_nodes = expanded;
    r.trace = std::move(trace);
    return r;
}

SearchResult exact_dp(const LayeredGraph& graph) {
    const std::size_t layers = graph.layer_count();
    std::vector<std::vector<double>> cost(layers);
    std::vector<std::vector<long>> came_from(layers);
    cost[0] = {0.0};
    came_from[0] = {-1};
    std::size_t touched = 1;
    for (std::size_t g = 1; g < layers; ++g) {
        const std::size_t n = graph.points[g].size();
        cost[g].assign(n, kInf);
        came_from[g].assign(n, -1);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < graph.points[g - 1].size(); ++i) {
                const double c = cost[g - 1][i] + graph.edge_cost(g - 1, i, j) + graph.node_cost[g][j];
                if (c < cost[g][j]) {
                    cost[g][j] = c;
                    came_from[g][j] = static_cast<long>(i);
                }
            }
        }
        touched += n;
    }
    SearchResult r = reconstruct(graph, std::move(came_from), cost[layers - 1][0]);
    r.expanded_nodes = touched;
    return r;
}

std::vector<std::vector<double>> cost_to_go(const LayeredGraph& graph) {
    const std::size_t layers = graph.layer_count();
    std::vector<std::vector<double>> ctg(layers);
    ctg[layers - 1] = {0.0};
    for (std::size_t g = layers - 1; g-- > 0;) {
        ctg[g].assign(graph.points[g].size(), kInf);
        for (std::size_t i = 0; i < graph.points[g].size(); ++i) {
            for (std::size_t j = 0; j < graph.points[g + 1].size(); ++j) {
                const double c = graph.edge_cost(g, i, j) + graph.node_cost[g + 1][j] + ctg[g + 1][j];
                ctg[g][i] = std::min(ctg[g][i], c);
            }
        }
    }
    return ctg;
}

Tour to_tour(const LayeredGraph& graph, const SearchResult& result) {
    Tour tour;
    tour.order = graph.order;
    for (std::size_t g = 1; g + 1 < graph.layer_count(); ++g) {
        tour.points.push_back(graph.points[g][result.chosen[g]]);
    }
    return tour;
}

Solution refine_order(const ProblemInstance& inst, const std::vector<std::size_t>& order, double omega) {
    const LayeredGraph graph = build_layered_graph(inst, order);
    const SearchResult r = weighted_astar(graph, {omega, false});
    return {to_tour(graph, r), r.total_aoi};
}

Solution refine_order_exact(const ProblemInstance& inst, const std::vector<std::size_t>& order) {
    const LayeredGraph graph = build_layered_graph(inst, order);
    const SearchResult r = exact_dp(graph);
    return {to_tour(graph, r), r.total_aoi};
}

Solution exact_global(const ProblemInstance& inst, std::size_t max_clusters) {
    const std::size_t m = inst.size();
    if (m > max_clusters) {
        throw ParameterError("exact search refuses M = " + std::to_string(m) + " (cap " +
                             std::to_string(max_clusters) + "; M! orders would be enumerated)");
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Solution best;
    best.total_aoi = kInf;
    do {
        Solution s = refine_order_exact(inst, order);
        if (s.total_aoi < best.total_aoi) {
            best = std::move(s);
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

}  // namespace aoilab::router
