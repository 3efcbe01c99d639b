#include "hypersr/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parallel.hpp"

namespace hypersr {

namespace {

constexpr double kPointReplaceProb = 0.05;
constexpr double kProbSumSlack = 1e-9;

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must be in [0, 1]");
    }
}

}  // namespace

double GpConfig::p_reproduction() const {
    const double sum =
        p_crossover + p_subtree_mutation + p_hoist_mutation + p_point_mutation;
    return std::max(0.0, 1.0 - sum);
}

void GpConfig::validate() const {
    if (population_size < 1) {
        throw std::invalid_argument("population_size must be at least 1");
    }
    if (generations < 1) {
        throw std::invalid_argument("generations must be at least 1");
    }
    if (!(stopping_criteria >= 0.0)) {
        throw std::invalid_argument("stopping_criteria must be non-negative");
    }
    check_probability(p_crossover, "p_crossover");
    check_probability(p_subtree_mutation, "p_subtree_mutation");
    check_probability(p_hoist_mutation, "p_hoist_mutation");
    check_probability(p_point_mutation, "p_point_mutation");
    const double sum =
        p_crossover + p_subtree_mutation + p_hoist_mutation + p_point_mutation;
    if (sum > 1.0 + kProbSumSlack) {
        throw std::invalid_argument("variation probabilities sum to more than 1");
    }
    if (!(max_samples > 0.0 && max_samples <= 1.0)) {
        throw std::invalid_argument("max_samples must be in (0, 1]");
    }
    if (!(parsimony_coefficient >= 0.0)) {
        throw std::invalid_argument("parsimony_coefficient must be non-negative");
    }
    if (tournament_size < 1 || tournament_size > population_size) {
        throw std::invalid_argument("tournament_size must be in [1, population_size]");
    }
    if (init_depth_min < 1 || init_depth_max < init_depth_min) {
        throw std::invalid_argument("init_depth range must satisfy 1 <= min <= max");
    }
    if (!(fd_step > 0.0)) {
        throw std::invalid_argument("fd_step must be positive");
    }
    FunctionSet probe;
    probe.operators = operators;
    probe.variables = {"I1bar", "I2bar", "J"};
    probe.constant_lo = constant_lo;
    probe.constant_hi = constant_hi;
    probe.validate();
}

FunctionSet make_function_set(const GpConfig& cfg,
                              std::span<const std::string> variables) {
    FunctionSet set;
    set.operators = cfg.operators;
    set.variables.assign(variables.begin(), variables.end());
    set.constant_lo = cfg.constant_lo;
    set.constant_hi = cfg.constant_hi;
    set.validate();
    return set;
}

Population init_population(const GpConfig& cfg, const FunctionSet& set, Rng& rng) {
    cfg.validate();
    set.validate();
    Population pop;
    pop.individuals.reserve(static_cast<std::size_t>(cfg.population_size));
    const int span = cfg.init_depth_max - cfg.init_depth_min + 1;
    for (int i = 0; i < cfg.population_size; ++i) {
        const int depth = cfg.init_depth_min + i % span;
        const InitMethod method = i % 2 == 0 ? InitMethod::Full : InitMethod::Grow;
        Individual ind;
        ind.tree = random_tree(set, method, depth, rng);
        ind.size = ind.tree.size();
        pop.individuals.push_back(std::move(ind));
    }
    return pop;
}

const Individual& tournament_select(const Population& pop, int k, Rng& rng) {
    const std::size_t n = pop.individuals.size();
    if (n == 0) {
        throw std::invalid_argument("tournament_select: empty population");
    }
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw std::invalid_argument("tournament_select: k must be in [1, population size]");
    }
    // Rejection sampling keeps draws without replacement cheap for the usual
    // small k; entrants are compared in draw order so ties are stable.
    std::vector<std::size_t> drawn;
    drawn.reserve(static_cast<std::size_t>(k));
    const Individual* best = nullptr;
    while (drawn.size() < static_cast<std::size_t>(k)) {
        const std::size_t idx = rng.index(n);
        if (std::find(drawn.begin(), drawn.end(), idx) != drawn.end()) continue;
        drawn.push_back(idx);
        const Individual& entrant = pop.individuals[idx];
        if (!entrant.evaluated) {
            throw std::logic_error("tournament_select: population is not evaluated");
        }
        if (best == nullptr ||
            entrant.penalized_fitness < best->penalized_fitness ||
            (entrant.penalized_fitness == best->penalized_fitness &&
             entrant.size < best->size)) {
            best = &entrant;
        }
    }
    return *best;
}

ExpressionTree crossover(const ExpressionTree& parent, const ExpressionTree& donor,
                         Rng& rng, detail::SpliceInfo* info) {
    if (parent.empty() || donor.empty()) {
        throw std::invalid_argument("crossover: empty tree");
    }
    const std::size_t p_start = rng.index(parent.size());
    const std::size_t p_len = subtree_length(parent.nodes(), p_start);
    const std::size_t d_start = rng.index(donor.size());
    const std::size_t d_len = subtree_length(donor.nodes(), d_start);
    if (info != nullptr) {
        info->removed = p_len;
        info->inserted = d_len;
    }
    return parent.replaced(p_start, p_len,
                           std::span(donor.nodes()).subspan(d_start, d_len));
}

ExpressionTree subtree_mutation(const ExpressionTree& parent, const GpConfig& cfg,
                                const FunctionSet& set, Rng& rng) {
    if (parent.empty()) {
        throw std::invalid_argument("subtree_mutation: empty tree");
    }
    const std::size_t start = rng.index(parent.size());
    const std::size_t len = subtree_length(parent.nodes(), start);
    const int depth = rng.uniform_int(cfg.init_depth_min, cfg.init_depth_max);
    const ExpressionTree replacement = random_tree(set, InitMethod::Grow, depth, rng);
    return parent.replaced(start, len, replacement.nodes());
}

ExpressionTree hoist_mutation(const ExpressionTree& parent, Rng& rng) {
    if (parent.empty()) {
        throw std::invalid_argument("hoist_mutation: empty tree");
    }
    const std::size_t outer = rng.index(parent.size());
    const std::size_t outer_len = subtree_length(parent.nodes(), outer);
    const std::size_t inner = outer + rng.index(outer_len);
    const std::size_t inner_len = subtree_length(parent.nodes(), inner);
    return parent.replaced(outer, outer_len,
                           std::span(parent.nodes()).subspan(inner, inner_len));
}

ExpressionTree point_mutation(const ExpressionTree& parent, const FunctionSet& set,
                              Rng& rng) {
    if (parent.empty()) {
        throw std::invalid_argument("point_mutation: empty tree");
    }
    std::vector<Node> nodes = parent.nodes();
    for (Node& n : nodes) {
        if (!rng.bernoulli(kPointReplaceProb)) continue;
        switch (n.kind) {
            case NodeKind::Operator: {
                // Replacement keeps the arity; with no alternative of the
                // same arity the node stays as it is.
                std::vector<OpKind> candidates;
                for (OpKind op : set.operators) {
                    if (op != n.op && arity(op) == arity(n.op)) {
                        candidates.push_back(op);
                    }
                }
                if (!candidates.empty()) {
                    n.op = candidates[rng.index(candidates.size())];
                }
                break;
            }
            case NodeKind::Variable: {
                const std::size_t n_vars = set.variables.size();
                if (n_vars > 1) {
                    std::size_t pick = rng.index(n_vars - 1);
                    if (pick >= static_cast<std::size_t>(n.var)) ++pick;
                    n.var = static_cast<std::int32_t>(pick);
                }
                break;
            }
            case NodeKind::Constant:
                n.value = rng.uniform(set.constant_lo, set.constant_hi);
                break;
        }
    }
    return ExpressionTree(std::move(nodes));
}

namespace {

std::vector<std::size_t> draw_subsample(const GpConfig& cfg, std::size_t n_points,
                                        Rng& rng) {
    const double target = std::ceil(cfg.max_samples * static_cast<double>(n_points) -
                                    kProbSumSlack);
    std::size_t m = static_cast<std::size_t>(std::max(1.0, target));
    m = std::min(m, n_points);
    if (m == n_points) {
        std::vector<std::size_t> all(n_points);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    // Partial Fisher-Yates, then sorted so error terms accumulate in a fixed
    // order regardless of the draw sequence.
    std::vector<std::size_t> idx(n_points);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.index(n_points - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Scores every individual on the subsample, then rescores the champion on
// the full dataset to refresh best_ever and the fitness trace entry.
void score_generation(Population& pop, const GpConfig& cfg, const ScoreFn& fitness_fn,
                      std::size_t n_points, std::span<const std::size_t> subsample,
                      int workers) {
    auto& inds = pop.individuals;
    parallel_for(inds.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Individual& ind = inds[i];
            ind.raw_fitness = fitness_fn(ind.tree, subsample);
            ind.penalized_fitness =
                ind.raw_fitness +
                cfg.parsimony_coefficient * static_cast<double>(ind.size);
            ind.evaluated = true;
        }
    });

    std::size_t champ = 0;
    for (std::size_t i = 1; i < inds.size(); ++i) {
        const Individual& a = inds[i];
        const Individual& b = inds[champ];
        if (a.penalized_fitness < b.penalized_fitness ||
            (a.penalized_fitness == b.penalized_fitness && a.size < b.size)) {
            champ = i;
        }
    }

    std::vector<std::size_t> full(n_points);
    std::iota(full.begin(), full.end(), std::size_t{0});
    Individual champion = inds[champ];
    champion.raw_fitness = fitness_fn(champion.tree, full);
    champion.penalized_fitness =
        champion.raw_fitness +
        cfg.parsimony_coefficient * static_cast<double>(champion.size);
    pop.generation_best_raw = champion.raw_fitness;

    if (!pop.has_best ||
        champion.penalized_fitness < pop.best_ever.penalized_fitness ||
        (champion.penalized_fitness == pop.best_ever.penalized_fitness &&
         champion.size < pop.best_ever.size)) {
        pop.best_ever = std::move(champion);
        pop.has_best = true;
    }
}

}  // namespace

Population evolve_generation(const Population& pop, const GpConfig& cfg,
                             const FunctionSet& set, const ScoreFn& fitness_fn,
                             std::size_t n_points, Rng& rng, int workers) {
    cfg.validate();
    if (pop.individuals.empty()) {
        throw std::invalid_argument("evolve_generation: empty population");
    }
    if (n_points == 0) {
        throw std::invalid_argument("evolve_generation: dataset is empty");
    }
    const std::vector<std::size_t> subsample = draw_subsample(cfg, n_points, rng);

    // Offspring construction is strictly sequential over the master rng so
    // the lineage is fixed before any parallel evaluation happens.
    Population next;
    next.generation = pop.generation + 1;
    next.best_ever = pop.best_ever;
    next.has_best = pop.has_best;
    next.individuals.reserve(static_cast<std::size_t>(cfg.population_size));
    const double c_cross = cfg.p_crossover;
    const double c_subtree = c_cross + cfg.p_subtree_mutation;
    const double c_hoist = c_subtree + cfg.p_hoist_mutation;
    const double c_point = c_hoist + cfg.p_point_mutation;
    for (int i = 0; i < cfg.population_size; ++i) {
        const double u = rng.uniform01();
        Individual child;
        if (u < c_cross) {
            const Individual& parent = tournament_select(pop, cfg.tournament_size, rng);
            const Individual& donor = tournament_select(pop, cfg.tournament_size, rng);
            child.tree = crossover(parent.tree, donor.tree, rng);
        } else if (u < c_subtree) {
            const Individual& parent = tournament_select(pop, cfg.tournament_size, rng);
            child.tree = subtree_mutation(parent.tree, cfg, set, rng);
        } else if (u < c_hoist) {
            const Individual& parent = tournament_select(pop, cfg.tournament_size, rng);
            child.tree = hoist_mutation(parent.tree, rng);
        } else if (u < c_point) {
            const Individual& parent = tournament_select(pop, cfg.tournament_size, rng);
            child.tree = point_mutation(parent.tree, set, rng);
        } else {
            const Individual& parent = tournament_select(pop, cfg.tournament_size, rng);
            child.tree = parent.tree;
        }
        child.size = child.tree.size();
        next.individuals.push_back(std::move(child));
    }

    score_generation(next, cfg, fitness_fn, n_points, subsample, workers);
    return next;
}

FitResult run_with_scorer(const GpConfig& cfg, const FunctionSet& set,
                          const ScoreFn& fitness_fn, std::size_t n_points) {
    cfg.validate();
    set.validate();
    if (n_points == 0) {
        throw std::invalid_argument("run: dataset is empty");
    }
    const int workers = resolve_workers();
    Rng rng(cfg.seed);

    Population pop = init_population(cfg, set, rng);
    {
        const std::vector<std::size_t> subsample = draw_subsample(cfg, n_points, rng);
        score_generation(pop, cfg, fitness_fn, n_points, subsample, workers);
    }
    FitResult result;
    result.trace.push_back(pop.generation_best_raw);

    while (static_cast<int>(result.trace.size()) < cfg.generations &&
           pop.best_ever.raw_fitness > cfg.stopping_criteria) {
        pop = evolve_generation(pop, cfg, set, fitness_fn, n_points, rng, workers);
        result.trace.push_back(pop.generation_best_raw);
    }

    result.best = pop.best_ever;
    result.generations_run = static_cast<int>(result.trace.size());
    return result;
}

FitResult run(const GpConfig& cfg, const Dataset& dataset) {
    cfg.validate();
    dataset.validate();
    const FunctionSet set = make_function_set(cfg, dataset.variable_names);
    const StressPredictor predictor(dataset, cfg.fd_step);
    const ScoreFn fn = [&predictor](const ExpressionTree& tree,
                                    std::span<const std::size_t> idx) {
        return predictor.raw_mae(tree, idx);
    };
    return run_with_scorer(cfg, set, fn, dataset.points.size());
}

}  // namespace hypersr
