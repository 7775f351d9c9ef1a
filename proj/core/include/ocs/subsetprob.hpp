#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ocs/rng.hpp"

namespace ocs {

enum class ProbMode { exact, monte_carlo };

struct SubsetProbResult {
    double prob = 0.0;
    double log_prob = 0.0;
    std::vector<double> grad_logits;  // d log prob / d logits; empty unless log_prob_grad
    ProbMode mode = ProbMode::exact;
    std::uint64_t permutations = 0;  // orderings enumerated (exact) or sampled (monte_carlo)
};

// 8! — the default switch point between exact enumeration and estimation.
inline constexpr std::uint64_t kDefaultPermutationLimit = 40320;

// Probability of drawing the given indices sequentially in that exact
// order, each step renormalized over the remaining mass:
//   q = p_{i1} * p_{i2}/(1-p_{i1}) * ... * p_{iN}/(1-sum of earlier picks)
// Denominators are clamped at 1e-12; if clamping would move the result by
// more than 1e-6 relative, a NumericError is raised instead.
double chain_prob(std::span<const double> probs, std::span<const int> order);

// Exact probability of the unordered subset: the sum of chain_prob over
// all N! orderings, enumerated in lexicographic order and accumulated in
// long double. Subsets covering all candidates short-circuit to 1.
// Requires N! <= permutation_limit; beyond that, the error directs the
// caller to mc_subset_prob.
SubsetProbResult exact_subset_prob(std::span<const double> probs, std::span<const int> subset,
                                   std::uint64_t permutation_limit = kDefaultPermutationLimit);

// Unbiased estimator of the permutation sum: draws num_orderings orderings
// of the subset uniformly at random and returns N! times the mean chain
// probability. When num_orderings >= N! the sampling is replaced by full
// enumeration and the result equals exact_subset_prob.
SubsetProbResult mc_subset_prob(std::span<const double> probs, std::span<const int> subset,
                                std::uint64_t num_orderings, RngStream& rng);

// prob, log prob and d log prob / d logits, differentiated analytically
// through the permutation sum (product rule per ordering) and the softmax
// Jacobian. Precondition: probs == softmax(logits); checked to 1e-9.
// rng is required for monte_carlo mode only.
SubsetProbResult log_prob_grad(std::span<const double> probs, std::span<const double> logits,
                               std::span<const int> subset, ProbMode mode,
                               std::uint64_t num_orderings = 0, RngStream* rng = nullptr);

}  // namespace ocs
