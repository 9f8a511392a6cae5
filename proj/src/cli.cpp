// Command-line front end: gen, train, eval, solve, bench, plotdata.

#include <array>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "aoilab/errors.hpp"
#include "aoilab/harness.hpp"
#include "aoilab/router.hpp"
#include "aoilab/training.hpp"

namespace aoilab::harness {

namespace {

struct SolverFlags {
    std::vector<std::string> solvers;
    std::string checkpoint;
    std::size_t width = 16;
    double omega = 1.2;
    std::size_t sa_iter = 1000;
    std::size_t ga_iter = 10000;
    std::size_t ga_population = 0;
};

struct ScenarioFlags {
    std::uint64_t seed = 1;
    std::vector<std::size_t> m{10};
    std::vector<double> gamma_db{20.0};
    std::vector<std::string> nodes{"random"};
    std::optional<int> l_sub;
    std::size_t count = 20;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f, bool lists) {
    cmd->add_option("--seed", f.seed, "base seed")->capture_default_str();
    auto* m = cmd->add_option("--m", f.m, "number of clusters")->capture_default_str();
    auto* g = cmd->add_option("--gamma-th-db", f.gamma_db, "SNR threshold in dB")->capture_default_str();
    auto* n = cmd->add_option("--n-per-cluster", f.nodes, "node count per cluster, or 'random' for {5,...,30}")
                  ->capture_default_str();
    if (lists) {
        m->delimiter(',');
        g->delimiter(',');
        n->delimiter(',');
    } else {
        m->expected(1);
        g->expected(1);
        n->expected(1);
    }
    cmd->add_option("--l-sub", f.l_sub, "grid subdivisions per disk side (default 5, or the checkpoint's)");
}

void add_solver_flags(CLI::App* cmd, SolverFlags& f, bool many) {
    auto* s = cmd->add_option("--solver", f.solvers,
                              "twa-greedy, twa-sample, twa-beam, sa, ga, nn, random or exact");
    if (many) {
        s->delimiter(',');
    } else {
        s->expected(1);
    }
    cmd->add_option("--checkpoint", f.checkpoint, "trained policy (.twa)");
    cmd->add_option("--width", f.width, "sampling or beam width")->capture_default_str();
    cmd->add_option("--omega", f.omega, "weighted A* inflation")->capture_default_str();
    cmd->add_option("--sa-iter", f.sa_iter, "simulated annealing iterations")->capture_default_str();
    cmd->add_option("--ga-iter", f.ga_iter, "genetic algorithm generations")->capture_default_str();
    cmd->add_option("--ga-population", f.ga_population, "GA population (0 = all candidate points)")
        ->capture_default_str();
}

// Collects every contradiction before failing so the message lists them all.
class Problems {
public:
    void check(bool ok, const std::string& what) {
        if (!ok) {
            items_.push_back(what);
        }
    }
    void raise() const {
        if (items_.empty()) {
            return;
        }
        std::string msg = "invalid arguments:";
        for (const auto& i : items_) {
            msg += "\n  " + i;
        }
        throw ParameterError(msg);
    }

private:
    std::vector<std::string> items_;
};

struct Prepared {
    SweepSpec spec;
    std::optional<policy::Policy> policy;
};

Prepared prepare(const ScenarioFlags& sf, const SolverFlags& vf, const std::vector<std::string>& default_solvers) {
    Problems p;
    Prepared out;
    SweepSpec& spec = out.spec;
    const auto& names = vf.solvers.empty() ? default_solvers : vf.solvers;
    for (const auto& n : names) {
        try {
            spec.solvers.push_back(parse_solver(n));
        } catch (const ParameterError& e) {
            p.check(false, e.what());
        }
    }
    spec.node_policies.clear();
    for (const auto& n : sf.nodes) {
        try {
            spec.node_policies.push_back(parse_node_policy(n));
        } catch (const ParameterError& e) {
            p.check(false, e.what());
        }
    }
    p.check(!spec.solvers.empty(), "--solver: at least one solver is required");
    p.check(vf.width >= 1, "--width must be at least 1");
    p.check(vf.omega >= 1.0, "--omega must be at least 1");
    p.check(sf.count >= 1, "--count must be at least 1");
    p.check(!sf.m.empty() && !sf.gamma_db.empty() && !sf.nodes.empty(), "sweep lists must be nonempty");
    for (std::size_t m : sf.m) {
        p.check(m >= 1, "--m must be at least 1");
    }
    for (double g : sf.gamma_db) {
        p.check(g > 0.0, "--gamma-th-db must be positive (threshold above 0 dB)");
    }
    if (sf.l_sub) {
        p.check(*sf.l_sub >= 1, "--l-sub must be at least 1");
    }
    bool wants_policy = false;
    for (SolverKind s : spec.solvers) {
        wants_policy = wants_policy || needs_policy(s);
        if (s == SolverKind::Exact) {
            for (std::size_t m : sf.m) {
                p.check(m <= router::kDefaultGlobalCap,
                        "--solver exact needs --m <= " + std::to_string(router::kDefaultGlobalCap));
            }
        }
    }
    p.check(!wants_policy || !vf.checkpoint.empty(), "--checkpoint is required by the twa-* solvers");
    p.raise();

    if (!vf.checkpoint.empty()) {
        out.policy = policy::load_policy(vf.checkpoint);
    }
    spec.m_values = sf.m;
    spec.gamma_db_values = sf.gamma_db;
    spec.count = sf.count;
    spec.seed = sf.seed;
    spec.l_sub = sf.l_sub ? *sf.l_sub : (out.policy ? out.policy->config().l_sub : 5);
    spec.options.omega = vf.omega;
    spec.options.width = vf.width;
    spec.options.sa.max_iter = vf.sa_iter;
    spec.options.ga.max_iter = vf.ga_iter;
    spec.options.ga.population_size = vf.ga_population;
    return out;
}

void print_table(const std::vector<ResultRow>& rows) {
    std::vector<std::string> order;
    std::map<std::string, std::array<double, 3>> acc;  // total, wall, count
    for (const auto& r : rows) {
        if (!acc.count(r.solver)) {
            order.push_back(r.solver);
            acc[r.solver] = {0.0, 0.0, 0.0};
        }
        auto& a = acc[r.solver];
        a[0] += r.total_aoi;
        a[1] += r.wall_seconds;
        a[2] += 1.0;
    }
    std::printf("%-12s %16s %14s\n", "solver", "mean total AoI", "mean time (s)");
    for (const auto& s : order) {
        const auto& a = acc[s];
        std::printf("%-12s %16.2f %14.6f\n", s.c_str(), a[0] / a[2], a[1] / a[2]);
    }
}

int cmd_gen(const ScenarioFlags& sf, double area, const std::string& out_dir) {
    Problems p;
    p.check(sf.m.front() >= 1, "--m must be at least 1");
    p.check(sf.count >= 1, "--count must be at least 1");
    p.check(sf.gamma_db.front() > 0.0, "--gamma-th-db must be positive");
    p.check(area > 0.0, "--area must be positive");
    p.check(!sf.l_sub || *sf.l_sub >= 1, "--l-sub must be at least 1");
    p.raise();
    SweepSpec spec;
    spec.seed = sf.seed;
    spec.area_side = area;
    spec.l_sub = sf.l_sub.value_or(5);
    const NodePolicy nodes = parse_node_policy(sf.nodes.front());
    std::filesystem::create_directories(out_dir);
    for (std::size_t k = 0; k < sf.count; ++k) {
        const ProblemInstance inst = sweep_instance(spec, sf.m.front(), sf.gamma_db.front(), nodes, k);
        char name[32];
        std::snprintf(name, sizeof name, "scenario_%03zu.json", k);
        save_scenario(inst.scenario, std::filesystem::path(out_dir) / name);
        std::printf("%s  M=%zu  nodes=%ld  R*=%.3f m\n", name, inst.size(), inst.scenario.total_nodes(),
                    inst.service_radius);
    }
    return 0;
}

int cmd_solve(const ScenarioFlags& sf, const SolverFlags& vf, const std::string& scenario_path, bool exact,
              const std::string& out) {
    SolverFlags flags = vf;
    if (exact) {
        flags.solvers = {"exact"};
    }
    ScenarioFlags scen = sf;
    scen.count = 1;
    std::optional<Scenario> loaded;
    if (!scenario_path.empty()) {
        loaded = load_scenario(scenario_path);
        scen.m = {loaded->size()};
    }
    Prepared prep = prepare(scen, flags, {"twa-greedy"});
    const SolverKind kind = prep.spec.solvers.front();
    ProblemInstance inst;
    double gamma_db = 0.0;
    NodePolicy nodes = prep.spec.node_policies.front();
    if (loaded) {
        if (sf.l_sub) {
            loaded->env.l_sub = *sf.l_sub;
        }
        inst = make_instance(*loaded);
        gamma_db = linear_to_db(inst.scenario.env.snr_threshold);
        nodes = NodePolicy{};
    } else {
        gamma_db = prep.spec.gamma_db_values.front();
        inst = sweep_instance(prep.spec, prep.spec.m_values.front(), gamma_db, nodes, 0);
    }
    SolveOptions opt = prep.spec.options;
    opt.policy = prep.policy ? &*prep.policy : nullptr;
    opt.seed = sf.seed;
    const SolveOutcome res = run_solver(kind, inst, opt);
    const aoi::AoIReport rep = aoi::evaluate(res.tour, inst.scenario);
    const FlyHoverSplit split = fly_hover_split(rep);

    std::printf("solver            %s\n", solver_name(kind).c_str());
    std::printf("clusters          %zu (%ld nodes)\n", inst.size(), inst.scenario.total_nodes());
    std::printf("service radius    %.3f m\n", inst.service_radius);
    std::printf("order            ");
    for (std::size_t c : res.tour.order) {
        std::printf(" %zu", c);
    }
    std::printf("\n");
    for (std::size_t k = 0; k < res.tour.size(); ++k) {
        const auto& pt = res.tour.points[k];
        const auto& cl = inst.scenario.clusters[res.tour.order[k]];
        std::printf("  stop %2zu  cluster %2zu  N=%2d  hover at (%.2f, %.2f, %.2f)\n", k + 1, res.tour.order[k],
                    cl.node_count, pt.x, pt.y, pt.z);
    }
    std::printf("total AoI         %.6f s\n", rep.total_aoi);
    std::printf("oldest AoI        %.6f s\n", rep.oldest_aoi);
    std::printf("effective energy  %.3f J\n", rep.ledger.effective_energy);
    std::printf("fly / hover       %.4f / %.4f\n", split.fly, split.hover);
    std::printf("wall time         %.6f s\n", res.wall_seconds);
    if (!out.empty()) {
        write_results({make_row("0", kind, inst, gamma_db, nodes, res)}, out);
    }
    return 0;
}

int cmd_eval_or_bench(const ScenarioFlags& sf, const SolverFlags& vf, const std::string& out, bool bench) {
    std::vector<std::string> defaults;
    if (bench) {
        if (!vf.checkpoint.empty()) {
            defaults = {"twa-greedy", "twa-sample", "twa-beam"};
        }
        for (const char* s : {"sa", "ga", "nn", "random"}) {
            defaults.push_back(s);
        }
        if (sf.m.front() <= router::kDefaultGlobalCap) {
            defaults.push_back("exact");
        }
    } else {
        defaults = {"twa-greedy", "twa-sample", "twa-beam"};
    }
    Prepared prep = prepare(sf, vf, defaults);
    prep.spec.options.policy = prep.policy ? &*prep.policy : nullptr;
    const std::vector<ResultRow> rows = run_sweep(prep.spec);
    write_results(rows, out);
    if (bench) {
        print_table(rows);
    }
    std::printf("wrote %zu rows to %s\n", rows.size(), out.c_str());
    return 0;
}

int cmd_train(const std::string& preset, const ScenarioFlags& sf, training::TrainConfig overrides,
              const std::map<std::string, bool>& given, const std::string& out_dir) {
    training::TrainConfig c;
    if (preset == "desk") {
        c = training::desk_train_config();
    } else if (preset == "full") {
        c = training::full_train_config();
    } else {
        throw ParameterError("--preset must be 'desk' or 'full'");
    }
    auto set = [&](const char* flag) { return given.count(flag) && given.at(flag); };
    c.seed = sf.seed;
    if (set("--m")) c.m_train = sf.m.front();
    if (set("--epochs")) c.epochs = overrides.epochs;
    if (set("--steps")) c.steps_per_epoch = overrides.steps_per_epoch;
    if (set("--batch")) c.batch_size = overrides.batch_size;
    if (set("--lr")) c.learning_rate = overrides.learning_rate;
    if (set("--eval-size")) c.eval_set_size = overrides.eval_set_size;
    if (set("--omega")) c.omega = overrides.omega;
    if (sf.l_sub) c.model.l_sub = *sf.l_sub;
    if (set("--gamma-th-db")) c.env.snr_threshold = db_to_linear(sf.gamma_db.front());
    if (set("--n-per-cluster")) c.node_count_choices = parse_node_policy(sf.nodes.front()).choices();
    training::validate(c);
    std::printf("training M=%zu for %zu x %zu steps, batch %zu -> %s\n", c.m_train, c.epochs, c.steps_per_epoch,
                c.batch_size, out_dir.c_str());
    const std::size_t steps = c.steps_per_epoch;
    const auto state = training::train(c, out_dir, [steps](const training::StepMetrics& m) {
        if ((m.step + 1) % steps == 0) {
            std::printf("epoch %3zu  sample %.2f  greedy %.2f  baseline %.2f  |grad| %.3g\n", m.epoch, m.mean_sample_cost,
                        m.mean_greedy_cost, m.baseline_cost, m.grad_norm);
            std::fflush(stdout);
        }
    });
    std::printf("baseline refreshed %zu times\n", state.baseline_updates);
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"AoI-minimal UAV data-collection planner"};
    app.require_subcommand(1);

    ScenarioFlags gen_sf;
    gen_sf.count = 1;
    double area = 3000.0;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "write seeded scenario files");
    add_scenario_flags(gen, gen_sf, false);
    gen->add_option("--count", gen_sf.count, "number of scenarios")->capture_default_str();
    gen->add_option("--area", area, "side of the square area (m)")->capture_default_str();
    gen->add_option("--out", gen_out, "output directory")->required();

    ScenarioFlags train_sf;
    train_sf.m = {5};
    training::TrainConfig tc = training::desk_train_config();
    std::string preset = "desk";
    std::string train_out;
    auto* train = app.add_subcommand("train", "train a policy with REINFORCE and a rollout baseline");
    add_scenario_flags(train, train_sf, false);
    train->add_option("--preset", preset, "desk or full")->capture_default_str();
    train->add_option("--epochs", tc.epochs);
    train->add_option("--steps", tc.steps_per_epoch, "steps per epoch");
    train->add_option("--batch", tc.batch_size);
    train->add_option("--lr", tc.learning_rate);
    train->add_option("--eval-size", tc.eval_set_size, "baseline test instances per epoch");
    train->add_option("--omega", tc.omega);
    train->add_option("--out", train_out, "output directory")->required();

    ScenarioFlags eval_sf;
    SolverFlags eval_vf;
    std::string eval_out;
    auto* eval = app.add_subcommand("eval", "decode a checkpoint across a sweep of M, threshold and node counts");
    add_scenario_flags(eval, eval_sf, true);
    add_solver_flags(eval, eval_vf, true);
    eval->add_option("--count", eval_sf.count, "instances per sweep cell")->capture_default_str();
    eval->add_option("--out", eval_out, "results CSV")->required();

    ScenarioFlags solve_sf;
    SolverFlags solve_vf;
    std::string scenario_path;
    std::string solve_out;
    bool exact = false;
    auto* solve = app.add_subcommand("solve", "solve one instance and print the tour");
    add_scenario_flags(solve, solve_sf, false);
    add_solver_flags(solve, solve_vf, false);
    solve->add_option("--scenario", scenario_path, "scenario JSON (otherwise generated from --seed)");
    solve->add_flag("--exact", exact, "shorthand for --solver exact");
    solve->add_option("--out", solve_out, "optional results CSV");

    ScenarioFlags bench_sf;
    SolverFlags bench_vf;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "compare solvers on seeded instances with timing");
    add_scenario_flags(bench, bench_sf, false);
    add_solver_flags(bench, bench_vf, true);
    bench->add_option("--count", bench_sf.count, "number of instances")->capture_default_str();
    bench->add_option("--out", bench_out, "results CSV")->required();

    std::string plot_in;
    std::string plot_x = "M";
    std::string plot_y = "total_aoi";
    std::string plot_out;
    auto* plot = app.add_subcommand("plotdata", "turn a results CSV into per-solver x/y series");
    plot->add_option("--in", plot_in, "results CSV")->required();
    plot->add_option("--x", plot_x, "M, gamma_th_db or n_policy")->capture_default_str();
    plot->add_option("--y", plot_y,
                     "total_aoi, oldest_aoi, effective_energy, fly_time, hover_time, fly_share, hover_share or "
                     "wall_seconds")
        ->capture_default_str();
    plot->add_option("--out", plot_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen(gen_sf, area, gen_out);
        }
        if (train->parsed()) {
            std::map<std::string, bool> given;
            for (const char* f : {"--m", "--epochs", "--steps", "--batch", "--lr", "--eval-size", "--omega",
                                  "--gamma-th-db", "--n-per-cluster"}) {
                given[f] = train->count(f) > 0;
            }
            return cmd_train(preset, train_sf, tc, given, train_out);
        }
        if (eval->parsed()) {
            return cmd_eval_or_bench(eval_sf, eval_vf, eval_out, false);
        }
        if (solve->parsed()) {
            return cmd_solve(solve_sf, solve_vf, scenario_path, exact, solve_out);
        }
        if (bench->parsed()) {
            return cmd_eval_or_bench(bench_sf, bench_vf, bench_out, true);
        }
        if (plot->parsed()) {
            write_plot_data(read_results(plot_in), plot_x, plot_y, plot_out);
            return 0;
        }
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 3;
    } catch (const IoError& e) {
        std::cerr << "file error: " << e.what() << '\n';
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "file error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}

}  // namespace aoilab::harness
