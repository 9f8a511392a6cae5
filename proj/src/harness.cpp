#include "aoilab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "aoilab/errors.hpp"
#include "aoilab/parallel.hpp"
#include "aoilab/rng.hpp"
#include "aoilab/router.hpp"

namespace aoilab::harness {

namespace {

constexpr std::uint64_t kSolverStream = 0x736f6c76;

const std::vector<std::pair<SolverKind, const char*>>& solver_names() {
    static const std::vector<std::pair<SolverKind, const char*>> names{
        {SolverKind::TwaGreedy, "twa-greedy"}, {SolverKind::TwaSample, "twa-sample"},
        {SolverKind::TwaBeam, "twa-beam"},     {SolverKind::Sa, "sa"},
        {SolverKind::Ga, "ga"},                {SolverKind::Nn, "nn"},
        {SolverKind::Random, "random"},        {SolverKind::Exact, "exact"},
    };
    return names;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double parse_double(const std::string& s, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw SchemaError(field, "not a number: '" + s + "'");
    }
}

double column_value(const ResultRow& r, const std::string& column) {
    if (column == "M") return static_cast<double>(r.m);
    if (column == "gamma_th_db") return r.gamma_th_db;
    if (column == "total_aoi") return r.total_aoi;
    if (column == "oldest_aoi") return r.oldest_aoi;
    if (column == "effective_energy") return r.effective_energy;
    if (column == "fly_time") return r.fly_time;
    if (column == "hover_time") return r.hover_time;
    if (column == "wall_seconds") return r.wall_seconds;
    if (column == "fly_share") return r.fly_time / (r.fly_time + r.hover_time);
    if (column == "hover_share") return r.hover_time / (r.fly_time + r.hover_time);
    throw ParameterError("unknown column '" + column + "'");
}

}  // namespace

SolverKind parse_solver(const std::string& name) {
    for (const auto& [kind, n] : solver_names()) {
        if (name == n) {
            return kind;
        }
    }
    throw ParameterError("unknown solver '" + name + "'");
}

std::string solver_name(SolverKind kind) {
    for (const auto& [k, n] : solver_names()) {
        if (k == kind) {
            return n;
        }
    }
    return "?";
}

bool needs_policy(SolverKind kind) {
    return kind == SolverKind::TwaGreedy || kind == SolverKind::TwaSample || kind == SolverKind::TwaBeam;
}

const std::vector<SolverKind>& all_solvers() {
    static const std::vector<SolverKind> kinds = [] {
        std::vector<SolverKind> k;
        for (const auto& entry : solver_names()) {
            k.push_back(entry.first);
        }
        return k;
    }();
    return kinds;
}

std::string NodePolicy::label() const { return fixed ? std::to_string(*fixed) : "random"; }

std::vector<int> NodePolicy::choices() const {
    if (fixed) {
        return {*fixed};
    }
    return {5, 10, 15, 20, 25, 30};
}

NodePolicy parse_node_policy(const std::string& text) {
    if (text == "random") {
        return {};
    }
    try {
        std::size_t used = 0;
        const int n = std::stoi(text, &used);
        if (used == text.size() && n >= 1) {
            return {n};
        }
    } catch (const std::exception&) {
    }
    throw ParameterError("n-per-cluster must be 'random' or a positive count, got '" + text + "'");
}

SolveOutcome run_solver(SolverKind kind, const ProblemInstance& inst, const SolveOptions& options) {
    if (needs_policy(kind) && options.policy == nullptr) {
        throw ParameterError(solver_name(kind) + " needs a policy checkpoint");
    }
    if (options.width == 0) {
        throw ParameterError("width must be at least 1");
    }
    const auto t0 = std::chrono::steady_clock::now();
    router::Solution sol;
    switch (kind) {
        case SolverKind::TwaGreedy:
            sol = router::refine_order(inst, policy::decode_greedy(*options.policy, inst).order, options.omega);
            break;
        case SolverKind::TwaSample: {
            policy::SampleOptions so;
            so.width = options.width;
            so.seed = options.seed;
            so.omega = options.omega;
            sol = policy::decode_sample(*options.policy, inst, so).solution;
            break;
        }
        case SolverKind::TwaBeam:
            sol = router::refine_order(inst, policy::decode_beam(*options.policy, inst, options.width).order,
                                       options.omega);
            break;
        case SolverKind::Sa: {
            baselines::SaConfig c = options.sa;
            c.seed = options.seed;
            const auto r = baselines::solve_sa(inst, c);
            sol = {r.tour, r.total_aoi};
            break;
        }
        case SolverKind::Ga: {
            baselines::GaConfig c = options.ga;
            c.seed = options.seed;
            const auto r = baselines::solve_ga(inst, c);
            sol = {r.tour, r.total_aoi};
            break;
        }
        case SolverKind::Nn: {
            const auto r = baselines::solve_nearest_neighbor(inst);
            sol = {r.tour, r.total_aoi};
            break;
        }
        case SolverKind::Random: {
            const auto r = baselines::solve_random(inst, options.seed);
            sol = {r.tour, r.total_aoi};
            break;
        }
        case SolverKind::Exact:
            sol = router::exact_global(inst);
            break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {sol.tour, sol.total_aoi, wall};
}

FlyHoverSplit fly_hover_split(const aoi::AoIReport& report) {
    const double fly = report.ledger.fly_time_after_first_stop();
    const double hover = report.ledger.total_hover_time();
    const double sum = fly + hover;
    if (!(sum > 0.0)) {
        throw ParameterError("report has no flight or hover time");
    }
    return {fly / sum, hover / sum};
}

ResultRow make_row(std::string instance_id, SolverKind kind, const ProblemInstance& inst, double gamma_th_db,
                   const NodePolicy& nodes, const SolveOutcome& outcome) {
    const aoi::AoIReport rep = aoi::evaluate(outcome.tour, inst.scenario);
    if (std::abs(rep.total_aoi - outcome.total_aoi) > 1e-9 * rep.total_aoi) {
        throw ContractError(solver_name(kind) + " reported " + fmt(outcome.total_aoi) + " but the tour evaluates to " +
                            fmt(rep.total_aoi));
    }
    ResultRow r;
    r.instance_id = std::move(instance_id);
    r.solver = solver_name(kind);
    r.m = inst.size();
    r.gamma_th_db = gamma_th_db;
    r.n_policy = nodes.label();
    r.total_aoi = rep.total_aoi;
    r.oldest_aoi = rep.oldest_aoi;
    r.effective_energy = rep.ledger.effective_energy;
    r.fly_time = rep.ledger.fly_time_after_first_stop();
    r.hover_time = rep.ledger.total_hover_time();
    r.wall_seconds = outcome.wall_seconds;
    return r;
}

std::string csv_header() {
    return "instance_id,solver,M,gamma_th_db,n_policy,total_aoi,oldest_aoi,effective_energy,fly_time,hover_time,"
           "wall_seconds";
}

std::string csv_line(const ResultRow& r) {
    return r.instance_id + "," + r.solver + "," + std::to_string(r.m) + "," + fmt(r.gamma_th_db) + "," + r.n_policy +
           "," + fmt(r.total_aoi) + "," + fmt(r.oldest_aoi) + "," + fmt(r.effective_energy) + "," + fmt(r.fly_time) +
           "," + fmt(r.hover_time) + "," + fmt(r.wall_seconds);
}

void write_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << csv_header() << '\n';
    for (const auto& r : rows) {
        out << csv_line(r) << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != csv_header()) {
        throw SchemaError("header", path.string() + " is not a results file");
    }
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto c = split(line, ',');
        if (c.size() != 11) {
            throw SchemaError("row", "expected 11 columns, got " + std::to_string(c.size()));
        }
        ResultRow r;
        r.instance_id = c[0];
        r.solver = c[1];
        r.m = static_cast<std::size_t>(parse_double(c[2], "M"));
        r.gamma_th_db = parse_double(c[3], "gamma_th_db");
        r.n_policy = c[4];
        r.total_aoi = parse_double(c[5], "total_aoi");
        r.oldest_aoi = parse_double(c[6], "oldest_aoi");
        r.effective_energy = parse_double(c[7], "effective_energy");
        r.fly_time = parse_double(c[8], "fly_time");
        r.hover_time = parse_double(c[9], "hover_time");
        r.wall_seconds = parse_double(c[10], "wall_seconds");
        rows.push_back(std::move(r));
    }
    return rows;
}

ProblemInstance sweep_instance(const SweepSpec& spec, std::size_t m, double gamma_db, const NodePolicy& nodes,
                               std::size_t k) {
    EnvParams env;
    env.l_sub = spec.l_sub;
    env.snr_threshold = db_to_linear(gamma_db);
    return generate_instance(mix_seed(spec.seed, k), m, spec.area_side, nodes.choices(), env);
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    if (spec.solvers.empty()) {
        throw ParameterError("at least one solver is required");
    }
    if (spec.count == 0 || spec.m_values.empty() || spec.gamma_db_values.empty() || spec.node_policies.empty()) {
        throw ParameterError("empty sweep");
    }
    for (SolverKind s : spec.solvers) {
        if (needs_policy(s) && spec.options.policy == nullptr) {
            throw ParameterError(solver_name(s) + " needs a policy checkpoint");
        }
        if (s == SolverKind::Exact) {
            for (std::size_t m : spec.m_values) {
                if (m > router::kDefaultGlobalCap) {
                    throw ParameterError("exact solver supports M <= " + std::to_string(router::kDefaultGlobalCap));
                }
            }
        }
    }
    struct Cell {
        std::size_t m;
        double gamma;
        NodePolicy nodes;
        std::size_t k;
    };
    std::vector<Cell> cells;
    for (std::size_t m : spec.m_values) {
        for (double g : spec.gamma_db_values) {
            for (const NodePolicy& n : spec.node_policies) {
                for (std::size_t k = 0; k < spec.count; ++k) {
                    cells.push_back({m, g, n, k});
                }
            }
        }
    }
    const std::size_t per = spec.solvers.size();
    std::vector<ResultRow> rows(cells.size() * per);
    parallel_for(cells.size(), [&](std::size_t i) {
        const Cell& c = cells[i];
        const ProblemInstance inst = sweep_instance(spec, c.m, c.gamma, c.nodes, c.k);
        for (std::size_t s = 0; s < per; ++s) {
            SolveOptions opt = spec.options;
            opt.seed = mix_seed(mix_seed(spec.seed, kSolverStream), c.k);
            const SolveOutcome out = run_solver(spec.solvers[s], inst, opt);
            rows[i * per + s] = make_row(std::to_string(c.k), spec.solvers[s], inst, c.gamma, c.nodes, out);
        }
    });
    return rows;
}

void write_plot_data(const std::vector<ResultRow>& rows, const std::string& x_column, const std::string& y_column,
                     const std::filesystem::path& out_dir) {
    // solver -> x -> (sum, count); n_policy is categorical, so "random" sorts after the counts
    std::map<std::string, std::map<std::pair<int, double>, std::pair<double, std::size_t>>> series;
    for (const auto& r : rows) {
        std::pair<int, double> key;
        if (x_column == "n_policy") {
            key = r.n_policy == "random" ? std::pair{1, 0.0} : std::pair{0, parse_double(r.n_policy, "n_policy")};
        } else {
            key = {0, column_value(r, x_column)};
        }
        auto& acc = series[r.solver][key];
        acc.first += column_value(r, y_column);
        acc.second += 1;
    }
    std::filesystem::create_directories(out_dir);
    for (const auto& [solver, points] : series) {
        const auto path = out_dir / (solver + "_" + y_column + "_vs_" + x_column + ".dat");
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        out << "# " << x_column << ' ' << y_column << '\n';
        for (const auto& [x, acc] : points) {
            out << (x.first == 1 ? std::string("random") : fmt(x.second)) << ' '
                << fmt(acc.first / static_cast<double>(acc.second)) << '\n';
        }
    }
}

}  // namespace aoilab::harness
