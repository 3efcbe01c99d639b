#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hypersr/gp.hpp"

namespace hypersr {

// Result of one seeded fit, self-contained: the expression together with the
// variable names and configuration needed to reproduce or re-evaluate it.
struct FitReport {
    std::string best_expression;
    double raw_fitness = 0.0;
    double penalized_fitness = 0.0;
    std::size_t size = 0;
    std::vector<double> fitness_trace;
    int generations_run = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> variable_names;
    GpConfig config;
    double wall_time_seconds = 0.0;
};

FitReport make_report(const FitResult& result, const GpConfig& cfg,
                      std::span<const std::string> variable_names,
                      double wall_time_seconds);

nlohmann::ordered_json report_to_json(const FitReport& report);
FitReport report_from_json(const nlohmann::json& j);

void save_report(const std::string& path, const FitReport& report);
FitReport load_report(const std::string& path);

}  // namespace hypersr
