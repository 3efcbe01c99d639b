// Acceptance suite. Every numbered criterion checks one end-to-end property
// of the engine and prints a single PASS or FAIL line with the measured
// values; the process exits nonzero when any requested criterion fails.
//
// Usage: hypersr_acceptance [--only N] [--extended]
//   --only N     run one criterion instead of the whole suite
//   --extended   include the long model-recovery runs (criterion 4)
//
// Expected to run from the repository root so the configs/ and data/
// fixtures resolve.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "hypersr/config_json.hpp"
#include "hypersr/data.hpp"
#include "hypersr/expr.hpp"
#include "hypersr/fitness.hpp"
#include "hypersr/gp.hpp"
#include "hypersr/mechanics.hpp"
#include "hypersr/report.hpp"
#include "hypersr/rng.hpp"

using namespace hypersr;

namespace {

#ifndef HYPERSR_CLI_PATH
#error "HYPERSR_CLI_PATH must point at the command-line binary"
#endif

// Closed-form baseline model for the shipped Treloar fixture. Its mean
// absolute error on data/treloar.csv is frozen below as the regression
// baseline M0; criterion 5 recomputes it to guard against fixture drift.
const char* kTreloarReferenceExpr =
    "sqrt(0.93296*exp(0.080316*I1bar) + sqrt(I1bar - 0.080316) + "
    "(0.0232113*I1bar + 0.021633)*I1bar)";
constexpr double kTreloarBaselineMae = 0.09213125519415556;  // MPa

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

ExpressionTree round_constants(const ExpressionTree& t) {
    std::vector<Node> nodes(t.nodes().begin(), t.nodes().end());
    for (Node& n : nodes) {
        if (n.kind == NodeKind::Constant) {
            n.value = std::round(n.value * 100.0) / 100.0;
        }
    }
    return ExpressionTree(nodes);
}

std::string join(const std::vector<double>& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << " ";
        out << format_double(values[i]);
    }
    return out.str();
}

bool report(int criterion, bool pass, const std::string& detail) {
    std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL")
              << " - " << detail << "\n";
    return pass;
}

// 1. Finite-difference derivatives against the closed-form derivatives of the
//    three built-in materials over 100 invariant points each, relative error
//    at most 1e-6, in under a second.
bool criterion1() {
    const auto t0 = Clock::now();
    const double tol = 1e-6;
    double worst = 0.0;
    Rng rng(1234);
    for (int c = 1; c <= 3; ++c) {
        const GmrParameters gmr = GmrParameters::benchmark_case(c);
        const auto psi = [&](const InvariantPoint& q, std::span<const double>) {
            return gmr_energy(gmr, q);
        };
        for (int i = 0; i < 100; ++i) {
            InvariantPoint p;
            p.I1bar = rng.uniform(3.0, 12.0);
            p.I2bar = rng.uniform(3.0, 12.0);
            p.J = rng.uniform(0.8, 1.2);
            const EnergyDerivatives an = gmr_derivatives(gmr, p);
            const EnergyDerivatives fd =
                energy_derivatives(psi, p, {}, kDefaultFdStep);
            const auto rel = [](double got, double want) {
                return std::abs(got - want) / std::max(1.0, std::abs(want));
            };
            worst = std::max({worst, rel(fd.dI1, an.dI1), rel(fd.dI2, an.dI2),
                              rel(fd.dJ, an.dJ)});
        }
    }
    const double wall = seconds_since(t0);
    std::ostringstream detail;
    detail << "max relative derivative error " << worst << " (limit " << tol
           << ") over 3 materials x 100 points in " << wall << " s (limit 1)";
    return report(1, worst <= tol && wall < 1.0, detail.str());
}

// 2. Nominal stresses of the two-term benchmark material at stretch 2 against
//    hand-derived values, absolute error at most 1e-9.
bool criterion2() {
    const GmrParameters gmr = GmrParameters::case1();
    const struct {
        LoadingMode mode;
        double expected;
    } rows[] = {{LoadingMode::UT, 1.89}, {LoadingMode::PS, 2.25},
                {LoadingMode::EBT, 3.78}};
    double worst = 0.0;
    for (const auto& row : rows) {
        const DeformationState d = deformation(row.mode, 2.0);
        const EnergyDerivatives ed = gmr_derivatives(gmr, invariants(d));
        worst = std::max(worst,
                         std::abs(nominal_stress(ed, row.mode, 2.0) - row.expected));
    }
    std::ostringstream detail;
    detail << "max |stress - expected| " << worst
           << " MPa at stretch 2 over UT/PS/EBT (limit 1e-9)";
    return report(2, worst <= 1e-9, detail.str());
}

// 3. Model recovery of the two-term benchmark material: with the shipped
//    case-1 configuration, at least 3 of 5 seeds must reach raw MAE at most
//    0.001 MPa on the full 150-point grid, and the best expression rounded to
//    two decimals must reproduce the material's stresses to 1e-6 MPa.
bool criterion3() {
    const GpConfig base = load_config("configs/gmr_case1.json");
    const Dataset ds =
        generate_benchmark(GmrParameters::case1(), default_benchmark_grid());
    std::vector<double> raws;
    FitResult best;
    best.best.raw_fitness = std::numeric_limits<double>::infinity();
    std::uint64_t best_seed = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GpConfig cfg = base;
        cfg.seed = seed;
        const FitResult r = run(cfg, ds);
        raws.push_back(r.best.raw_fitness);
        if (r.best.raw_fitness < best.best.raw_fitness) {
            best = r;
            best_seed = seed;
        }
    }
    const int hits =
        static_cast<int>(std::count_if(raws.begin(), raws.end(),
                                       [](double r) { return r <= 0.001; }));

    const ExpressionTree rounded = round_constants(best.best.tree);
    const StressPredictor predictor(ds, base.fd_step);
    std::vector<double> predicted(ds.points.size());
    predictor.predict_points(rounded, all_indices(ds.points.size()), predicted);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(predicted[i] - ds.points[i].stress));
    }

    const bool pass = hits >= 3 && max_diff <= 1e-6;
    std::ostringstream detail;
    detail << hits << " of 5 seeds at raw MAE <= 0.001 (need 3); raws "
           << join(raws) << "; best seed " << best_seed
           << "; rounded-expression max stress deviation " << max_diff
           << " MPa (limit 1e-6)";
    return report(3, pass, detail.str());
}

// 4. Model recovery of the four- and six-term benchmark materials: best of 5
//    seeds at raw MAE at most 0.01 MPa each. Long runs, so only part of the
//    extended suite.
bool criterion4(bool extended) {
    if (!extended) {
        std::cout << "criterion 4: SKIP - extended suite disabled"
                     " (pass --extended)\n";
        return true;
    }
    bool pass = true;
    std::ostringstream detail;
    for (int c = 2; c <= 3; ++c) {
        const GpConfig base =
            load_config("configs/gmr_case" + std::to_string(c) + ".json");
        const Dataset ds = generate_benchmark(GmrParameters::benchmark_case(c),
                                              default_benchmark_grid());
        double best = std::numeric_limits<double>::infinity();
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            GpConfig cfg = base;
            cfg.seed = seed;
            best = std::min(best, run(cfg, ds).best.raw_fitness);
        }
        pass = pass && best <= 0.01;
        if (c > 2) detail << "; ";
        detail << "case " << c << " best-of-5 raw MAE " << best
               << " MPa (limit 0.01)";
    }
    return report(4, pass, detail.str());
}

// 5. Treloar fixture: the reference expression's error on the shipped data
//    must match the frozen baseline M0, and a fresh best-of-5 fit with the
//    shipped Treloar configuration must reach MAE at most 1.1 * M0. The
//    equibiaxial points carry no constraint of their own (the model may
//    under-predict there); their error is printed for information only.
bool criterion5() {
    const Dataset ds = load_csv("data/treloar.csv");
    const std::vector<std::size_t> all = all_indices(ds.points.size());
    const StressPredictor predictor(ds, kDefaultFdStep);
    const ExpressionTree reference =
        parse(kTreloarReferenceExpr, ds.variable_names);
    const double m0 = predictor.raw_mae(reference, all);
    if (std::abs(m0 - kTreloarBaselineMae) > 1e-9) {
        std::ostringstream detail;
        detail << "baseline drift: reference expression MAE " << m0
               << " MPa differs from frozen " << kTreloarBaselineMae;
        return report(5, false, detail.str());
    }

    const GpConfig base = load_config("configs/treloar.json");
    double best = std::numeric_limits<double>::infinity();
    ExpressionTree best_tree;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GpConfig cfg = base;
        cfg.seed = seed;
        const FitResult r = run(cfg, ds);
        if (r.best.raw_fitness < best) {
            best = r.best.raw_fitness;
            best_tree = r.best.tree;
        }
    }

    std::vector<std::size_t> ebt;
    for (std::size_t i = 0; i < ds.points.size(); ++i) {
        if (ds.points[i].mode == LoadingMode::EBT) ebt.push_back(i);
    }
    const double ebt_mae = predictor.raw_mae(best_tree, ebt);

    const bool pass = best <= 1.1 * m0;
    std::ostringstream detail;
    detail << "baseline M0 " << m0 << " MPa; best-of-5 fit MAE " << best
           << " (limit " << 1.1 * m0 << "); unconstrained EBT-only MAE "
           << ebt_mae;
    return report(5, pass, detail.str());
}

// 6. Temperature plumbing: fit a material whose c10 depends affinely on the
//    reduced temperature over five training temperatures, then evaluate on
//    four held-out interior temperatures. Test MAE at most twice train MAE.
bool criterion6() {
    LambdaGrid grid;
    grid.mode = LoadingMode::UT;
    grid.lo = 1.0;
    grid.hi = 2.0;
    grid.count = 21;
    const std::vector<double> train_temps = {-40.0, 0.0, 40.0, 90.0, 120.0};
    const std::vector<double> test_temps = {-20.0, 23.0, 60.0, 100.0};
    const Dataset train =
        generate_thermal_benchmark(0.85, -0.6, 0.0, train_temps, grid);
    const Dataset test =
        generate_thermal_benchmark(0.85, -0.6, 0.0, test_temps, grid);

    const GpConfig cfg = load_config("configs/hytrel_synthetic.json");
    const FitResult r = run(cfg, train);
    const double train_mae = r.best.raw_fitness;
    const StressPredictor test_predictor(test, cfg.fd_step);
    const double test_mae =
        test_predictor.raw_mae(r.best.tree, all_indices(test.points.size()));

    const bool pass = test_mae <= 2.0 * train_mae + 1e-12;
    std::ostringstream detail;
    detail << "train MAE " << train_mae << " MPa over 5 temperatures, test MAE "
           << test_mae << " over 4 held-out temperatures (limit "
           << 2.0 * train_mae << "); model " << to_string(r.best.tree,
                                                          train.variable_names);
    return report(6, pass, detail.str());
}

std::string strip_wall_time(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("wall_time") == std::string::npos) out << line << "\n";
    }
    return out.str();
}

// 7. Determinism across worker counts: the same seeded fit through the
//    command line with 1 and 4 threads produces byte-identical reports up to
//    the wall-time field, within ten seconds.
bool criterion7() {
    const auto t0 = Clock::now();
    const std::string dir = "/tmp/hypersr_acceptance7";
    if (std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str()) != 0) {
        return report(7, false, "could not prepare " + dir);
    }
    const std::string data = dir + "/data.csv";
    write_csv(data, generate_benchmark(GmrParameters::case1(),
                                       default_benchmark_grid()));
    GpConfig cfg;
    cfg.population_size = 200;
    cfg.generations = 10;
    cfg.stopping_criteria = 0.0;
    const std::string conf = dir + "/config.json";
    {
        std::ofstream out(conf);
        out << config_to_json(cfg).dump(2) << "\n";
    }
    for (const char* threads : {"1", "4"}) {
        const std::string cmd = "HYPERSR_THREADS=" + std::string(threads) + " " +
                                HYPERSR_CLI_PATH + " fit --data " + data +
                                " --config " + conf + " --out " + dir + "/run" +
                                threads + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
            return report(7, false, "fit did not exit cleanly");
        }
    }
    const auto slurp = [](const std::string& path) {
        std::ifstream in(path);
        std::ostringstream out;
        out << in.rdbuf();
        return out.str();
    };
    const std::string a = slurp(dir + "/run1/report_seed0.json");
    const std::string b = slurp(dir + "/run4/report_seed0.json");
    const nlohmann::json ja = nlohmann::json::parse(a);
    const nlohmann::json jb = nlohmann::json::parse(b);
    const bool traces_equal =
        ja["fitness_trace"].dump() == jb["fitness_trace"].dump();
    const bool reports_equal = strip_wall_time(a) == strip_wall_time(b);
    const double wall = seconds_since(t0);
    const bool pass =
        traces_equal && reports_equal && !a.empty() && wall < 10.0;
    std::ostringstream detail;
    detail << "1-thread vs 4-thread reports "
           << (reports_equal ? "identical" : "DIFFER") << " up to wall time, "
           << "traces " << (traces_equal ? "byte-identical" : "DIFFER")
           << ", in " << wall << " s (limit 10)";
    return report(7, pass, detail.str());
}

// 8. Operator fuzz: 1e5 iterations per variation operator with zero
//    well-formedness violations, point mutation preserving the node skeleton,
//    hoist never growing a tree and crossover obeying the splice size
//    identity, all inside thirty seconds.
bool criterion8() {
    const auto t0 = Clock::now();
    const int iterations = 100000;
    FunctionSet fs;
    fs.operators = FunctionSet::default_operators();
    fs.variables = FunctionSet::invariant_variables(0);
    GpConfig cfg;
    Rng rng(77);
    long violations = 0;
    const auto fresh = [&]() {
        return random_tree(fs, InitMethod::Grow, rng.uniform_int(1, 6), rng);
    };
    const auto well_formed = [&](const ExpressionTree& t) {
        try {
            validate_tree(t, fs.variables.size());
            return true;
        } catch (const std::exception&) {
            return false;
        }
    };

    for (int i = 0; i < iterations; ++i) {
        const ExpressionTree parent = fresh();
        const ExpressionTree donor = fresh();
        detail::SpliceInfo info;
        const ExpressionTree child = crossover(parent, donor, rng, &info);
        if (!well_formed(child)) ++violations;
        if (tree_size(child) !=
            tree_size(parent) - info.removed + info.inserted) {
            ++violations;
        }
    }
    for (int i = 0; i < iterations; ++i) {
        if (!well_formed(subtree_mutation(fresh(), cfg, fs, rng))) ++violations;
    }
    for (int i = 0; i < iterations; ++i) {
        const ExpressionTree parent = fresh();
        const ExpressionTree child = hoist_mutation(parent, rng);
        if (!well_formed(child)) ++violations;
        if (tree_size(child) > tree_size(parent)) ++violations;
    }
    for (int i = 0; i < iterations; ++i) {
        const ExpressionTree parent = fresh();
        const ExpressionTree child = point_mutation(parent, fs, rng);
        if (!well_formed(child)) ++violations;
        if (tree_size(child) != tree_size(parent) ||
            tree_depth(child) != tree_depth(parent)) {
            ++violations;
        } else {
            const auto pn = parent.nodes();
            const auto cn = child.nodes();
            for (std::size_t k = 0; k < pn.size(); ++k) {
                const bool op_kept =
                    (pn[k].kind == NodeKind::Operator) ==
                    (cn[k].kind == NodeKind::Operator);
                const bool arity_kept =
                    pn[k].kind != NodeKind::Operator ||
                    arity(pn[k].op) == arity(cn[k].op);
                if (!op_kept || !arity_kept) {
                    ++violations;
                    break;
                }
            }
        }
    }

    const double wall = seconds_since(t0);
    std::ostringstream detail;
    detail << violations << " violations over " << iterations
           << " iterations per operator in " << wall << " s (limit 30)";
    return report(8, violations == 0 && wall < 30.0, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> only;
    bool extended = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--extended") {
            extended = true;
        } else if (arg == "--only" && i + 1 < argc) {
            only.push_back(std::atoi(argv[++i]));
        } else {
            std::cerr << "usage: hypersr_acceptance [--only N] [--extended]\n";
            return 2;
        }
    }
    if (only.empty()) {
        only = {1, 2, 3, 4, 5, 6, 7, 8};
    }

    bool all_pass = true;
    for (const int n : only) {
        bool pass = false;
        switch (n) {
            case 1: pass = criterion1(); break;
            case 2: pass = criterion2(); break;
            case 3: pass = criterion3(); break;
            case 4: pass = criterion4(extended); break;
            case 5: pass = criterion5(); break;
            case 6: pass = criterion6(); break;
            case 7: pass = criterion7(); break;
            case 8: pass = criterion8(); break;
            default:
                std::cerr << "unknown criterion " << n << "\n";
                return 2;
        }
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
