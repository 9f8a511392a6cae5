#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aoilab/channel.hpp"
#include "aoilab/errors.hpp"
#include "aoilab/harness.hpp"
#include "aoilab/router.hpp"
#include "support/instances.hpp"
#include "support/policy_check.hpp"

using namespace aoilab;
using namespace aoilab::harness;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("aoilab_harness_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "aoi_lab");
    std::vector<char*> argv;
    for (auto& a : args) {
        argv.push_back(a.data());
    }
    return run(static_cast<int>(argv.size()), argv.data());
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<ResultRow> without_timing(std::vector<ResultRow> rows) {
    for (auto& r : rows) {
        r.wall_seconds = 0.0;
    }
    return rows;
}

bool same_rows(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (csv_line(a[i]) != csv_line(b[i])) {
            return false;
        }
    }
    return true;
}

SweepSpec cheap_spec() {
    SweepSpec s;
    s.m_values = {6};
    s.count = 20;
    s.seed = 4;
    s.l_sub = 3;
    s.solvers = {SolverKind::Nn, SolverKind::Random, SolverKind::Sa};
    s.options.sa.max_iter = 50;
    return s;
}

}  // namespace

TEST_CASE("solver names") {
    for (SolverKind k : all_solvers()) {
        CHECK(parse_solver(solver_name(k)) == k);
    }
    CHECK(all_solvers().size() == 8);
    CHECK_THROWS_AS(parse_solver("lkh"), ParameterError);
    CHECK(needs_policy(SolverKind::TwaBeam));
    CHECK_FALSE(needs_policy(SolverKind::Exact));
    CHECK(parse_node_policy("random").label() == "random");
    CHECK(parse_node_policy("12").choices() == std::vector<int>{12});
    CHECK_THROWS_AS(parse_node_policy("0"), ParameterError);
    CHECK_THROWS_AS(parse_node_policy("7x"), ParameterError);
}

TEST_CASE("fly/hover split") {
    // One cluster of two nodes: 100 s of return flight, 22 s of hovering.
    Scenario s;
    s.start = {0.0, 0.0, 100.0};
    s.clusters = {{{1500.0, 0.0}, 2}};
    const Vec3 hover{1500.0, 0.0, 100.0};
    s.env.packet_bits = 10.9 * channel::rate_at(hover, s.clusters[0].ch_position, s.env);
    const Tour tour{{0}, {hover}};
    const FlyHoverSplit split = fly_hover_split(aoi::evaluate(tour, s));
    CHECK(split.fly == doctest::Approx(100.0 / 122.0).epsilon(1e-12));
    CHECK(split.hover == doctest::Approx(22.0 / 122.0).epsilon(1e-12));
    CHECK(split.fly == doctest::Approx(0.8197).epsilon(1e-4));
    CHECK(split.hover == doctest::Approx(0.1803).epsilon(1e-3));

    Rng rng(3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ProblemInstance inst = testsupport::random_instance(seed, 2 + seed % 8);
        const auto order = testsupport::random_order(inst.size(), rng);
        const Tour t = make_tour(order, testsupport::random_choice(inst, order, rng), inst.grids);
        const FlyHoverSplit a = fly_hover_split(aoi::evaluate(t, inst.scenario));
        CHECK(std::abs(a.fly + a.hover - 1.0) <= 1e-12);
        Scenario more = inst.scenario;
        for (auto& c : more.clusters) {
            c.node_count += 3;
        }
        CHECK(fly_hover_split(aoi::evaluate(t, more)).hover > a.hover);
    }
}

TEST_CASE("result rows re-validate and round-trip through CSV") {
    const ProblemInstance inst = testsupport::random_instance(21, 5, 2);
    SolveOptions opt;
    SolveOutcome out = run_solver(SolverKind::Exact, inst, opt);
    CHECK(out.total_aoi == doctest::Approx(router::exact_global(inst).total_aoi).epsilon(1e-12));
    const ResultRow row = make_row("3", SolverKind::Exact, inst, 20.0, NodePolicy{}, out);
    CHECK(row.total_aoi == doctest::Approx(out.total_aoi).epsilon(1e-12));
    CHECK(row.oldest_aoi == doctest::Approx(row.fly_time + row.hover_time).epsilon(1e-12));
    const auto dir = scratch_dir("rows");
    write_results({row, row}, dir / "r.csv");
    const auto back = read_results(dir / "r.csv");
    REQUIRE(back.size() == 2);
    CHECK(csv_line(back[1]) == csv_line(row));
    CHECK(read_file(dir / "r.csv").rfind(csv_header() + "\n", 0) == 0);

    out.total_aoi *= 1.001;
    CHECK_THROWS_AS(make_row("3", SolverKind::Exact, inst, 20.0, NodePolicy{}, out), ContractError);
    CHECK_THROWS_AS(run_solver(SolverKind::TwaGreedy, inst, opt), ParameterError);
    CHECK_THROWS_AS(read_results(dir / "missing.csv"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("bench-style sweep writes one row per instance and solver, deterministically") {
    const SweepSpec spec = cheap_spec();
    const auto a = run_sweep(spec);
    CHECK(a.size() == 20 * spec.solvers.size());
    setenv("AOI_LAB_THREADS", "3", 1);
    const auto b = run_sweep(spec);
    unsetenv("AOI_LAB_THREADS");
    CHECK(same_rows(without_timing(a), without_timing(b)));
    for (std::size_t i = 0; i < a.size(); ++i) {
        const ProblemInstance inst = sweep_instance(spec, 6, 20.0, NodePolicy{}, std::stoul(a[i].instance_id));
        CHECK(a[i].m == 6);
        CHECK(a[i].solver == solver_name(spec.solvers[i % 3]));
        CHECK(a[i].wall_seconds >= 0.0);
        CHECK(inst.size() == 6);
    }
    SweepSpec bad = spec;
    bad.solvers = {};
    CHECK_THROWS_AS(run_sweep(bad), ParameterError);
    bad.solvers = {SolverKind::Exact};
    bad.m_values = {9};
    CHECK_THROWS_AS(run_sweep(bad), ParameterError);
}

TEST_CASE("threshold sweep: service radius shrinks as the threshold rises") {
    SweepSpec spec = cheap_spec();
    spec.gamma_db_values = {10.0, 20.0, 30.0};
    spec.count = 5;
    spec.solvers = {SolverKind::Nn};
    const auto rows = run_sweep(spec);
    CHECK(rows.size() == 15);
    for (std::size_t k = 0; k < spec.count; ++k) {
        const auto r10 = sweep_instance(spec, 6, 10.0, NodePolicy{}, k);
        const auto r20 = sweep_instance(spec, 6, 20.0, NodePolicy{}, k);
        const auto r30 = sweep_instance(spec, 6, 30.0, NodePolicy{}, k);
        CHECK(r10.service_radius > r20.service_radius);
        CHECK(r20.service_radius > r30.service_radius);
        CHECK(r10.scenario.clusters == r30.scenario.clusters);
    }
}

TEST_CASE("plot data averages per solver") {
    std::vector<ResultRow> rows(4);
    rows[0] = {"0", "nn", 5, 20, "random", 10, 0, 0, 0, 0, 0};
    rows[1] = {"1", "nn", 5, 20, "random", 20, 0, 0, 0, 0, 0};
    rows[2] = {"0", "nn", 10, 20, "random", 40, 0, 0, 0, 0, 0};
    rows[3] = {"0", "sa", 5, 20, "random", 7, 0, 0, 0, 0, 0};
    const auto dir = scratch_dir("plot");
    write_plot_data(rows, "M", "total_aoi", dir);
    CHECK(read_file(dir / "nn_total_aoi_vs_M.dat") == "# M total_aoi\n5 15\n10 40\n");
    CHECK(read_file(dir / "sa_total_aoi_vs_M.dat") == "# M total_aoi\n5 7\n");
    CHECK_THROWS_AS(write_plot_data(rows, "colour", "total_aoi", dir), ParameterError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("command line") {
    const auto dir = scratch_dir("cli");
    const std::string d = dir.string();
    CHECK(cli({"gen", "--seed", "7", "--m", "5", "--l-sub", "2", "--count", "2", "--out", d + "/sc"}) == 0);
    CHECK(std::filesystem::exists(dir / "sc" / "scenario_001.json"));
    CHECK(cli({"solve", "--scenario", d + "/sc/scenario_000.json", "--exact", "--out", d + "/solve.csv"}) == 0);
    const auto solved = read_results(dir / "solve.csv");
    REQUIRE(solved.size() == 1);
    const ProblemInstance inst = make_instance(load_scenario(dir / "sc" / "scenario_000.json"));
    CHECK(solved[0].total_aoi == doctest::Approx(router::exact_global(inst).total_aoi).epsilon(1e-12));

    // a fixed untrained policy exercises the learned decoders end to end
    policy::save_policy(policy::Policy(testsupport::tiny_config(), 5), dir / "p.twa");
    const std::vector<std::string> eval{"eval", "--checkpoint", d + "/p.twa", "--m", "4,6", "--gamma-th-db", "10,30",
                                        "--n-per-cluster", "random,8", "--count", "2", "--width", "4"};
    auto run_eval = [&](const std::string& out) {
        auto args = eval;
        args.push_back("--out");
        args.push_back(out);
        return cli(args);
    };
    CHECK(run_eval(d + "/e1.csv") == 0);
    CHECK(run_eval(d + "/e2.csv") == 0);
    const auto e1 = read_results(dir / "e1.csv");
    CHECK(e1.size() == 2 * 2 * 2 * 2 * 3);
    CHECK(same_rows(without_timing(e1), without_timing(read_results(dir / "e2.csv"))));

    CHECK(cli({"bench", "--m", "4", "--l-sub", "2", "--count", "3", "--ga-iter", "20", "--out", d + "/b.csv"}) == 0);
    CHECK(read_results(dir / "b.csv").size() == 3 * 5);
    CHECK(cli({"plotdata", "--in", d + "/e1.csv", "--x", "n_policy", "--out", d + "/plot"}) == 0);
    CHECK(std::filesystem::exists(dir / "plot" / "twa-beam_total_aoi_vs_n_policy.dat"));

    CHECK(cli({"bench", "--m", "9", "--solver", "exact", "--out", d + "/x.csv"}) == 2);
    CHECK(cli({"eval", "--m", "4", "--out", d + "/x.csv"}) == 2);
    CHECK(cli({"solve", "--solver", "dijkstra"}) == 2);
    CHECK(cli({"solve", "--solver", "nn", "--width", "0"}) == 2);
    CHECK(cli({"solve", "--m", "3", "--gamma-th-db", "200", "--solver", "nn"}) == 3);
    CHECK(cli({"solve", "--scenario", d + "/missing.json", "--solver", "nn"}) == 4);
    CHECK(cli({"eval", "--checkpoint", d + "/missing.twa", "--out", d + "/x.csv"}) == 4);
    CHECK(cli({"frobnicate"}) == 2);
    std::filesystem::remove_all(dir);
}
