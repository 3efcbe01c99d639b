#include "hypersr/report.hpp"

#include <fstream>

#include "hypersr/config_json.hpp"

namespace hypersr {

FitReport make_report(const FitResult& result, const GpConfig& cfg,
                      std::span<const std::string> variable_names,
                      double wall_time_seconds) {
    FitReport r;
    r.best_expression = to_string(result.best.tree, variable_names);
    r.raw_fitness = result.best.raw_fitness;
    r.penalized_fitness = result.best.penalized_fitness;
    r.size = result.best.size;
    r.fitness_trace = result.trace;
    r.generations_run = result.generations_run;
    r.seed = cfg.seed;
    r.variable_names.assign(variable_names.begin(), variable_names.end());
    r.config = cfg;
    r.wall_time_seconds = wall_time_seconds;
    return r;
}

nlohmann::ordered_json report_to_json(const FitReport& report) {
    nlohmann::ordered_json j;
    j["best_expression"] = report.best_expression;
    j["raw_fitness"] = report.raw_fitness;
    j["penalized_fitness"] = report.penalized_fitness;
    j["size"] = report.size;
    j["generations_run"] = report.generations_run;
    j["fitness_trace"] = report.fitness_trace;
    j["seed"] = report.seed;
    j["variable_names"] = report.variable_names;
    j["config"] = config_to_json(report.config);
    j["wall_time_seconds"] = report.wall_time_seconds;
    return j;
}

FitReport report_from_json(const nlohmann::json& j) {
    FitReport r;
    try {
        r.best_expression = j.at("best_expression").get<std::string>();
        r.raw_fitness = j.at("raw_fitness").get<double>();
        r.penalized_fitness = j.at("penalized_fitness").get<double>();
        r.size = j.at("size").get<std::size_t>();
        r.generations_run = j.at("generations_run").get<int>();
        r.fitness_trace = j.at("fitness_trace").get<std::vector<double>>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.variable_names = j.at("variable_names").get<std::vector<std::string>>();
        r.config = config_from_json(j.at("config"));
        r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed fit report: ") + e.what());
    }
    return r;
}

void save_report(const std::string& path, const FitReport& report) {
    std::ofstream out(path);
    if (!out) {
        throw std::invalid_argument("cannot open " + path + " for writing");
    }
    out << report_to_json(report).dump(2) << "\n";
    if (!out) {
        throw std::runtime_error("failed writing " + path);
    }
}

FitReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return report_from_json(j);
}

}  // namespace hypersr
