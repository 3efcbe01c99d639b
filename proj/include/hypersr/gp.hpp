#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hypersr/expr.hpp"
#include "hypersr/fitness.hpp"
#include "hypersr/rng.hpp"

namespace hypersr {

// Search configuration. Fields mirror the JSON keys accepted by the CLI.
struct GpConfig {
    int population_size = 1000;
    int generations = 50;
    double stopping_criteria = 0.001;
    double p_crossover = 0.7;
    double p_subtree_mutation = 0.15;
    double p_hoist_mutation = 0.1;
    double p_point_mutation = 0.05;
    double max_samples = 0.9;
    double parsimony_coefficient = 0.003;

    int tournament_size = 20;
    int init_depth_min = 2;
    int init_depth_max = 6;
    std::vector<OpKind> operators = FunctionSet::default_operators();
    double constant_lo = -1.0;
    double constant_hi = 1.0;
    std::uint64_t seed = 0;
    double fd_step = 1e-5;

    // Probability of reproducing a tournament winner unchanged.
    double p_reproduction() const;

    void validate() const;  // throws std::invalid_argument
};

FunctionSet make_function_set(const GpConfig& cfg,
                              std::span<const std::string> variables);

struct Individual {
    ExpressionTree tree;
    double raw_fitness = 0.0;
    double penalized_fitness = 0.0;
    std::size_t size = 0;
    bool evaluated = false;
};

struct Population {
    std::vector<Individual> individuals;
    int generation = 0;
    Individual best_ever;           // scored on the full dataset
    bool has_best = false;
    double generation_best_raw = 0; // champion's full-set MAE, feeds the trace
};

// Raw fitness of a candidate over the given dataset point indices. Must be
// pure and safe to call from several threads at once.
using ScoreFn =
    std::function<double(const ExpressionTree&, std::span<const std::size_t>)>;

// Ramped half and half: depths cycle over [init_depth_min, init_depth_max]
// while the construction method alternates between full and grow.
Population init_population(const GpConfig& cfg, const FunctionSet& set, Rng& rng);

// Winner of a k-way tournament drawn without replacement: the minimum
// penalized fitness, ties broken by smaller tree, then by draw order.
// Requires an evaluated population.
const Individual& tournament_select(const Population& pop, int k, Rng& rng);

namespace detail {
struct SpliceInfo {
    std::size_t removed = 0;
    std::size_t inserted = 0;
};
}  // namespace detail

// Replaces a uniformly chosen subtree of parent with a uniformly chosen
// subtree of donor.
ExpressionTree crossover(const ExpressionTree& parent, const ExpressionTree& donor,
                         Rng& rng, detail::SpliceInfo* info = nullptr);

// Replaces a uniformly chosen subtree with a fresh grow tree whose depth is
// drawn from the configured init range.
ExpressionTree subtree_mutation(const ExpressionTree& parent, const GpConfig& cfg,
                                const FunctionSet& set, Rng& rng);

// Lifts a uniformly chosen subtree of a uniformly chosen subtree into its
// place. Never grows the tree.
ExpressionTree hoist_mutation(const ExpressionTree& parent, Rng& rng);

// Independently replaces each node, with probability 0.05, by a random node
// of the same kind: operators by operators of equal arity, variables by other
// variables, constants by fresh draws. Tree shape is preserved.
ExpressionTree point_mutation(const ExpressionTree& parent, const FunctionSet& set,
                              Rng& rng);

// One generation step: draws the fitness subsample, builds population_size
// offspring from tournament winners (crossover, the three mutations, or
// reproduction, chosen by the configured probabilities), scores them, and
// refreshes best_ever from the generation champion rescored on the full
// dataset. Offspring construction consumes the rng sequentially so results do
// not depend on the number of evaluation workers.
Population evolve_generation(const Population& pop, const GpConfig& cfg,
                             const FunctionSet& set, const ScoreFn& fitness_fn,
                             std::size_t n_points, Rng& rng, int workers);

struct FitResult {
    Individual best;            // best_ever, scored on the full dataset
    std::vector<double> trace;  // per generation champion full-set MAE
    int generations_run = 0;
};

// Full run against a custom score function.
FitResult run_with_scorer(const GpConfig& cfg, const FunctionSet& set,
                          const ScoreFn& fitness_fn, std::size_t n_points);

// Full run against a stress dataset: seeds the rng, evolves for at most
// cfg.generations generations and stops early once best_ever's full-set MAE
// falls to cfg.stopping_criteria. Worker count comes from HYPERSR_THREADS.
FitResult run(const GpConfig& cfg, const Dataset& dataset);

}  // namespace hypersr
