#include "hypersr/config_json.hpp"

#include <fstream>
#include <set>

namespace hypersr {

namespace {

using nlohmann::json;

const std::set<std::string> kRequiredKeys = {
    "population_size",   "generations",       "stopping_criteria",
    "p_crossover",       "p_subtree_mutation", "p_hoist_mutation",
    "p_point_mutation",  "max_samples",        "parsimony_coefficient",
};

const std::set<std::string> kOptionalKeys = {
    "tournament_size", "init_depth", "function_set",
    "constant_range",  "seed",       "fd_step",
};

double require_number(const json& j, const std::string& key) {
    if (!j.at(key).is_number()) {
        throw std::invalid_argument("config key '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

int require_int(const json& j, const std::string& key) {
    if (!j.at(key).is_number_integer()) {
        throw std::invalid_argument("config key '" + key + "' must be an integer");
    }
    return j.at(key).get<int>();
}

}  // namespace

GpConfig config_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }
    for (const std::string& key : kRequiredKeys) {
        if (!j.contains(key)) {
            throw std::invalid_argument("missing config key '" + key + "'");
        }
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (kRequiredKeys.count(it.key()) == 0 && kOptionalKeys.count(it.key()) == 0) {
            throw std::invalid_argument("unknown config key '" + it.key() + "'");
        }
    }

    GpConfig cfg;
    cfg.population_size = require_int(j, "population_size");
    cfg.generations = require_int(j, "generations");
    cfg.stopping_criteria = require_number(j, "stopping_criteria");
    cfg.p_crossover = require_number(j, "p_crossover");
    cfg.p_subtree_mutation = require_number(j, "p_subtree_mutation");
    cfg.p_hoist_mutation = require_number(j, "p_hoist_mutation");
    cfg.p_point_mutation = require_number(j, "p_point_mutation");
    cfg.max_samples = require_number(j, "max_samples");
    cfg.parsimony_coefficient = require_number(j, "parsimony_coefficient");

    if (j.contains("tournament_size")) {
        cfg.tournament_size = require_int(j, "tournament_size");
    }
    if (j.contains("init_depth")) {
        const json& d = j.at("init_depth");
        if (!d.is_array() || d.size() != 2 || !d[0].is_number_integer() ||
            !d[1].is_number_integer()) {
            throw std::invalid_argument("config key 'init_depth' must be [min, max]");
        }
        cfg.init_depth_min = d[0].get<int>();
        cfg.init_depth_max = d[1].get<int>();
    }
    if (j.contains("function_set")) {
        const json& f = j.at("function_set");
        if (!f.is_array() || f.empty()) {
            throw std::invalid_argument(
                "config key 'function_set' must be a non-empty array of operator names");
        }
        cfg.operators.clear();
        for (const json& name : f) {
            if (!name.is_string()) {
                throw std::invalid_argument("config key 'function_set' must hold strings");
            }
            cfg.operators.push_back(op_from_name(name.get<std::string>()));
        }
    }
    if (j.contains("constant_range")) {
        const json& r = j.at("constant_range");
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
            throw std::invalid_argument("config key 'constant_range' must be [lo, hi]");
        }
        cfg.constant_lo = r[0].get<double>();
        cfg.constant_hi = r[1].get<double>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) {
            throw std::invalid_argument("config key 'seed' must be an integer");
        }
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("fd_step")) {
        cfg.fd_step = require_number(j, "fd_step");
    }

    cfg.validate();
    return cfg;
}

nlohmann::ordered_json config_to_json(const GpConfig& cfg) {
    nlohmann::ordered_json j;
    j["population_size"] = cfg.population_size;
    j["generations"] = cfg.generations;
    j["stopping_criteria"] = cfg.stopping_criteria;
    j["p_crossover"] = cfg.p_crossover;
    j["p_subtree_mutation"] = cfg.p_subtree_mutation;
    j["p_hoist_mutation"] = cfg.p_hoist_mutation;
    j["p_point_mutation"] = cfg.p_point_mutation;
    j["max_samples"] = cfg.max_samples;
    j["parsimony_coefficient"] = cfg.parsimony_coefficient;
    j["tournament_size"] = cfg.tournament_size;
    j["init_depth"] = {cfg.init_depth_min, cfg.init_depth_max};
    std::vector<std::string> ops;
    ops.reserve(cfg.operators.size());
    for (OpKind op : cfg.operators) {
        ops.emplace_back(op_name(op));
    }
    j["function_set"] = ops;
    j["constant_range"] = {cfg.constant_lo, cfg.constant_hi};
    j["seed"] = cfg.seed;
    j["fd_step"] = cfg.fd_step;
    return j;
}

GpConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return config_from_json(j);
}

}  // namespace hypersr
