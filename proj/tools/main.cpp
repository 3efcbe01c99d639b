#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypersr/config_json.hpp"
#include "hypersr/data.hpp"
#include "hypersr/gp.hpp"
#include "hypersr/report.hpp"

namespace {

using namespace hypersr;

// Command-line misuse that CLI11 cannot express directly; mapped to the same
// exit code as parse errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t p = s.find(sep, start);
        if (p == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, p - start));
        start = p + 1;
    }
}

double parse_double_arg(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid number '" + s + "' in " + what);
    }
}

int parse_int_arg(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid integer '" + s + "' in " + what);
    }
}

// Stretch sweep list of the form MODE:lo:hi:count[,MODE:lo:hi:count...].
std::vector<LambdaGrid> parse_stretch_grids(const std::string& spec) {
    std::vector<LambdaGrid> grids;
    for (const std::string& entry : split(spec, ',')) {
        const std::vector<std::string> parts = split(entry, ':');
        if (parts.size() != 4) {
            throw UsageError("grid entry '" + entry + "' is not MODE:lo:hi:count");
        }
        LambdaGrid g;
        try {
            g.mode = mode_from_name(parts[0]);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        g.lo = parse_double_arg(parts[1], "--grid");
        g.hi = parse_double_arg(parts[2], "--grid");
        g.count = parse_int_arg(parts[3], "--grid");
        grids.push_back(g);
    }
    return grids;
}

struct GenerateArgs {
    int case_index = 0;
    std::string params;
    std::string grid;
    std::string out;
};

int cmd_generate(const GenerateArgs& args) {
    if ((args.case_index == 0) == args.params.empty()) {
        throw UsageError("generate needs exactly one of --case or --params");
    }
    GmrParameters p;
    if (args.case_index != 0) {
        p = GmrParameters::benchmark_case(args.case_index);
    } else {
        const std::vector<std::string> parts = split(args.params, ',');
        if (parts.size() != 6) {
            throw UsageError("--params must be c10,c20,c30,c01,c02,c03");
        }
        p.c10 = parse_double_arg(parts[0], "--params");
        p.c20 = parse_double_arg(parts[1], "--params");
        p.c30 = parse_double_arg(parts[2], "--params");
        p.c01 = parse_double_arg(parts[3], "--params");
        p.c02 = parse_double_arg(parts[4], "--params");
        p.c03 = parse_double_arg(parts[5], "--params");
    }
    std::vector<LambdaGrid> grids;
    if (args.grid.empty()) {
        grids = default_benchmark_grid();
    } else {
        grids = parse_stretch_grids(args.grid);
    }
    const Dataset ds = generate_benchmark(p, grids);
    std::vector<std::string> comments;
    if (args.case_index != 0) {
        comments.push_back("generalized Mooney-Rivlin benchmark case " +
                           std::to_string(args.case_index));
    } else {
        comments.push_back("generalized Mooney-Rivlin benchmark, custom coefficients");
    }
    comments.push_back("c10=" + format_double(p.c10) + " c20=" + format_double(p.c20) +
                       " c30=" + format_double(p.c30) + " c01=" + format_double(p.c01) +
                       " c02=" + format_double(p.c02) + " c03=" + format_double(p.c03));
    comments.push_back("energy: " + gmr_expression(p));
    write_csv(args.out, ds, comments);
    std::cerr << "wrote " << ds.points.size() << " points to " << args.out << "\n";
    return 0;
}

struct FitArgs {
    std::string data;
    std::string config;
    std::string out;
    int seeds = 1;
    std::optional<std::uint64_t> seed;
};

int cmd_fit(const FitArgs& args) {
    const Dataset ds = load_csv(args.data);
    GpConfig cfg = load_config(args.config);
    if (args.seed) cfg.seed = *args.seed;
    const std::uint64_t base_seed = cfg.seed;

    std::filesystem::create_directories(args.out);

    nlohmann::ordered_json summary;
    summary["data"] = args.data;
    summary["seeds"] = args.seeds;
    summary["base_seed"] = base_seed;
    summary["runs"] = nlohmann::ordered_json::array();

    std::optional<FitReport> best;
    for (int k = 0; k < args.seeds; ++k) {
        cfg.seed = base_seed + static_cast<std::uint64_t>(k);
        const auto t0 = std::chrono::steady_clock::now();
        const FitResult result = run(cfg, ds);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const FitReport report = make_report(result, cfg, ds.variable_names, wall);

        const std::string name = "report_seed" + std::to_string(cfg.seed) + ".json";
        const std::string path = (std::filesystem::path(args.out) / name).string();
        save_report(path, report);
        std::cerr << "seed " << cfg.seed << ": raw " << format_double(report.raw_fitness)
                  << " penalized " << format_double(report.penalized_fitness) << " size "
                  << report.size << " generations " << report.generations_run << " wall "
                  << format_double(wall) << "s\n";

        nlohmann::ordered_json entry;
        entry["seed"] = report.seed;
        entry["raw_fitness"] = report.raw_fitness;
        entry["penalized_fitness"] = report.penalized_fitness;
        entry["size"] = report.size;
        entry["generations_run"] = report.generations_run;
        entry["report"] = name;
        summary["runs"].push_back(entry);

        if (!best || report.raw_fitness < best->raw_fitness) {
            best = report;
        }
    }

    summary["best_seed"] = best->seed;
    summary["best_raw_fitness"] = best->raw_fitness;
    summary["best_expression"] = best->best_expression;
    const std::string summary_path =
        (std::filesystem::path(args.out) / "summary.json").string();
    std::ofstream out(summary_path);
    if (!out) {
        throw std::invalid_argument("cannot open " + summary_path + " for writing");
    }
    out << summary.dump(2) << "\n";
    std::cout << best->best_expression << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string expr;
    std::string report;
    std::string data;
};

int cmd_evaluate(const EvaluateArgs& args) {
    if (args.expr.empty() == args.report.empty()) {
        throw UsageError("evaluate needs exactly one of --expr or --report");
    }
    const Dataset ds = load_csv(args.data);
    double fd_step = kDefaultFdStep;
    std::string text = args.expr;
    if (!args.report.empty()) {
        const FitReport report = load_report(args.report);
        text = report.best_expression;
        fd_step = report.config.fd_step;
    }
    const ExpressionTree tree = parse(text, ds.variable_names);

    const StressPredictor predictor(ds, fd_step);
    std::vector<std::size_t> idx(ds.points.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<double> predicted(idx.size());
    predictor.predict_points(tree, idx, predicted);

    std::cout << "mode,stretch,stress_MPa,predicted_MPa\n";
    double acc = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const DataPoint& p = ds.points[i];
        std::cout << mode_name(p.mode) << "," << format_double(p.stretch) << ","
                  << format_double(p.stress) << "," << format_double(predicted[i]) << "\n";
        acc += std::abs(predicted[i] - p.stress);
    }
    std::cout << "# MAE_MPa " << format_double(acc / static_cast<double>(idx.size()))
              << "\n";
    return 0;
}

struct ExportArgs {
    std::string report;
    std::string format;
    std::string out;
    std::string grid;
};

// Variable sweep of the form name=lo:hi:count or name=value.
std::vector<double> expand_value_spec(const std::string& spec) {
    const std::vector<std::string> parts = split(spec, ':');
    if (parts.size() == 1) {
        return {parse_double_arg(parts[0], "--grid")};
    }
    if (parts.size() != 3) {
        throw UsageError("grid range '" + spec + "' is not lo:hi:count");
    }
    const double lo = parse_double_arg(parts[0], "--grid");
    const double hi = parse_double_arg(parts[1], "--grid");
    const int count = parse_int_arg(parts[2], "--grid");
    if (count < 1) {
        throw UsageError("grid range '" + spec + "' needs a positive count");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(count == 1
                          ? lo
                          : lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(count - 1));
    }
    return out;
}

int cmd_export(const ExportArgs& args) {
    const FitReport report = load_report(args.report);
    const ExpressionTree tree = parse(report.best_expression, report.variable_names);

    std::ofstream out(args.out);
    if (!out) {
        throw std::invalid_argument("cannot open " + args.out + " for writing");
    }

    if (args.format == "expr") {
        out << report.best_expression << "\n";
        if (!out) throw std::runtime_error("failed writing " + args.out);
        return 0;
    }

    // Derivative table over a cartesian grid of the report's variables.
    std::map<std::string, std::vector<double>> sweeps;
    sweeps["I1bar"] = expand_value_spec("3:9:10");
    sweeps["I2bar"] = expand_value_spec("3:9:10");
    sweeps["J"] = expand_value_spec("1");
    if (!args.grid.empty()) {
        for (const std::string& entry : split(args.grid, ',')) {
            const std::size_t eq = entry.find('=');
            if (eq == std::string::npos) {
                throw UsageError("grid entry '" + entry + "' is not name=values");
            }
            sweeps[entry.substr(0, eq)] = expand_value_spec(entry.substr(eq + 1));
        }
    }

    const auto& names = report.variable_names;
    for (const auto& entry : sweeps) {
        if (std::find(names.begin(), names.end(), entry.first) == names.end()) {
            throw std::invalid_argument("grid variable '" + entry.first +
                                        "' is not used by this report");
        }
    }
    std::vector<std::vector<double>> axes;
    for (const std::string& name : names) {
        const auto it = sweeps.find(name);
        if (it == sweeps.end()) {
            throw std::invalid_argument("no grid values for variable '" + name + "'");
        }
        axes.push_back(it->second);
    }

    for (const std::string& name : names) out << name << ",";
    out << "psi,dpsi_dI1bar,dpsi_dI2bar,dpsi_dJ\n";

    std::vector<std::size_t> pos(axes.size(), 0);
    std::vector<double> bindings(axes.size());
    auto psi = [&](const InvariantPoint& q, std::span<const double>) {
        bindings[0] = q.I1bar;
        bindings[1] = q.I2bar;
        bindings[2] = q.J;
        return evaluate(tree, bindings);
    };
    for (;;) {
        for (std::size_t v = 0; v < axes.size(); ++v) bindings[v] = axes[v][pos[v]];
        const InvariantPoint q{bindings[0], bindings[1], bindings[2]};
        const EnergyDerivatives ed =
            energy_derivatives(psi, q, std::span<const double>(), report.config.fd_step);
        for (std::size_t v = 0; v < axes.size(); ++v) {
            out << format_double(axes[v][pos[v]]) << ",";
        }
        out << format_double(ed.psi) << "," << format_double(ed.dI1) << ","
            << format_double(ed.dI2) << "," << format_double(ed.dJ) << "\n";

        std::size_t v = axes.size();
        while (v-- > 0) {
            if (++pos[v] < axes[v].size()) break;
            pos[v] = 0;
            if (v == 0) {
                if (!out) throw std::runtime_error("failed writing " + args.out);
                return 0;
            }
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symbolic regression of hyperelastic strain energy functions"};
    app.require_subcommand(1);

    GenerateArgs gen_args;
    CLI::App* gen = app.add_subcommand(
        "generate", "Write a noise-free Mooney-Rivlin benchmark dataset as CSV");
    gen->add_option("--case", gen_args.case_index, "Built-in coefficient case")
        ->check(CLI::Range(1, 3));
    gen->add_option("--params", gen_args.params, "Coefficients c10,c20,c30,c01,c02,c03");
    gen->add_option("--grid", gen_args.grid,
                    "Stretch sweeps MODE:lo:hi:count[,...] (default UT and PS over "
                    "(1,3], EBT over (1,2.5], 50 points each)");
    gen->add_option("--out", gen_args.out, "Output CSV path")->required();

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit", "Fit strain energy candidates to a dataset");
    fit->add_option("--data", fit_args.data, "Input CSV")->required();
    fit->add_option("--config", fit_args.config, "Search configuration JSON")->required();
    fit->add_option("--out", fit_args.out, "Output directory for reports")->required();
    fit->add_option("--seeds", fit_args.seeds, "Number of consecutive seeds to run")
        ->check(CLI::PositiveNumber);
    fit->add_option("--seed", fit_args.seed, "Base seed, overrides the config");

    EvaluateArgs eval_args;
    CLI::App* eval = app.add_subcommand(
        "evaluate", "Print per-point predictions and the MAE of an expression");
    eval->add_option("--expr", eval_args.expr, "Expression text");
    eval->add_option("--report", eval_args.report, "Fit report JSON");
    eval->add_option("--data", eval_args.data, "Input CSV")->required();

    ExportArgs export_args;
    CLI::App* exp = app.add_subcommand("export", "Export a fit report");
    exp->add_option("--report", export_args.report, "Fit report JSON")->required();
    exp->add_option("--format", export_args.format, "expr or derivs")
        ->required()
        ->check(CLI::IsMember({"expr", "derivs"}));
    exp->add_option("--out", export_args.out, "Output path")->required();
    exp->add_option("--grid", export_args.grid,
                    "Variable sweeps name=lo:hi:count or name=value, comma separated");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_args);
        if (fit->parsed()) return cmd_fit(fit_args);
        if (eval->parsed()) return cmd_evaluate(eval_args);
        if (exp->parsed()) return cmd_export(export_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
