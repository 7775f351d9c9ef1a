#include "ocs/subsetprob.hpp"

#include <algorithm>
#include <cmath>

#include "ocs/combinatorics.hpp"
#include "ocs/error.hpp"
#include "ocs/mathutil.hpp"

namespace ocs {

namespace {

constexpr double kMinDenominator = 1e-12;
constexpr double kClampRelTol = 1e-6;
constexpr long double kLogSpaceGuard = 1e-300L;

double checked_denominator(double remaining_mass) {
    if (remaining_mass >= kMinDenominator) return remaining_mass;
    if (remaining_mass >= kMinDenominator * (1.0 - kClampRelTol)) return kMinDenominator;
    throw NumericError("probs", "degenerate prefix mass in sequential-sampling chain");
}

void validate_inputs(std::span<const double> probs, std::span<const int> subset) {
    if (subset.empty()) throw DomainError("subset", "subset must be nonempty");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p > 0.0)) throw ConfigError("probs", "probabilities must be strictly positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw ConfigError("probs", "probabilities must sum to 1");
    std::vector<int> seen(probs.size(), 0);
    for (int i : subset) {
        if (i < 0 || i >= static_cast<int>(probs.size()))
            throw DomainError("subset", "subset index out of range");
        if (seen[static_cast<std::size_t>(i)]++)
            throw DomainError("subset", "subset indices must be distinct");
    }
}

// One ordering's chain probability, optionally with d q / d p accumulated
// into grad_p (long double, full length). For the element at position m,
//   dq/dp_{i_m} = q * (1/p_{i_m} + sum over later steps of 1/denominator).
long double chain_with_grad(std::span<const double> probs, std::span<const int> order,
                            std::vector<long double>* grad_p) {
    std::size_t n = order.size();
    thread_local std::vector<double> denom;
    denom.assign(n, 1.0);

    long double q = 1.0L;
    bool log_space = false;
    long double log_q = 0.0L;
    double mass = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        double p = probs[static_cast<std::size_t>(order[k])];
        double d = checked_denominator(mass);
        denom[k] = d;
        long double factor = static_cast<long double>(p) / d;
        if (!log_space && (factor < kLogSpaceGuard || q * factor < kLogSpaceGuard)) {
            log_space = true;
            log_q = std::log(static_cast<double>(q));
        }
        if (log_space)
            log_q += std::log(static_cast<double>(factor));
        else
            q *= factor;
        mass -= p;
    }
    if (log_space) q = std::exp(static_cast<double>(log_q));

    if (grad_p) {
        long double suffix = 0.0L;  // sum of 1/denominator over steps after m
        for (std::size_t m = n; m-- > 0;) {
            double p = probs[static_cast<std::size_t>(order[m])];
            (*grad_p)[static_cast<std::size_t>(order[m])] += q * (1.0L / p + suffix);
            suffix += 1.0L / static_cast<long double>(denom[m]);
        }
    }
    return q;
}

bool is_full_set(std::span<const double> probs, std::span<const int> subset) {
    return subset.size() == probs.size();
}

SubsetProbResult full_set_result(std::size_t t_count, ProbMode mode, bool with_grad) {
    SubsetProbResult r;
    r.prob = 1.0;
    r.log_prob = 0.0;
    r.mode = mode;
    r.permutations = 0;  // nothing enumerated; the subset is exhaustive
    if (with_grad) r.grad_logits.assign(t_count, 0.0);
    return r;
}

// d log prob / d p -> d log prob / d logits through the softmax Jacobian.
std::vector<double> chain_to_logits(std::span<const double> probs,
                                    std::span<const long double> grad_p, long double prob) {
    std::size_t t_count = probs.size();
    std::vector<double> grad(t_count, 0.0);
    long double inner = 0.0L;
    for (std::size_t i = 0; i < t_count; ++i)
        inner += grad_p[i] / prob * static_cast<long double>(probs[i]);
    for (std::size_t j = 0; j < t_count; ++j)
        grad[j] = static_cast<double>(static_cast<long double>(probs[j]) *
                                      (grad_p[j] / prob - inner));
    return grad;
}

struct Accumulated {
    long double prob = 0.0L;
    std::uint64_t permutations = 0;
    std::vector<long double> grad_p;
};

Accumulated enumerate_exact(std::span<const double> probs, std::span<const int> subset,
                            bool with_grad) {
    Accumulated acc;
    if (with_grad) acc.grad_p.assign(probs.size(), 0.0L);
    std::vector<int> order(subset.begin(), subset.end());
    std::sort(order.begin(), order.end());
    do {
        acc.prob += chain_with_grad(probs, order, with_grad ? &acc.grad_p : nullptr);
        ++acc.permutations;
    } while (std::next_permutation(order.begin(), order.end()));
    return acc;
}

Accumulated sample_orderings(std::span<const double> probs, std::span<const int> subset,
                             std::uint64_t num_orderings, RngStream& rng, bool with_grad) {
    Accumulated acc;
    if (with_grad) acc.grad_p.assign(probs.size(), 0.0L);
    std::vector<int> order(subset.begin(), subset.end());
    std::sort(order.begin(), order.end());
    std::uint64_t n_fact = factorial(static_cast<int>(subset.size()));
    for (std::uint64_t j = 0; j < num_orderings; ++j) {
        rng.shuffle(order);
        acc.prob += chain_with_grad(probs, order, with_grad ? &acc.grad_p : nullptr);
    }
    // N! * mean over sampled orderings: an unbiased estimate of the full sum
    long double scale = static_cast<long double>(n_fact) / static_cast<long double>(num_orderings);
    acc.prob *= scale;
    if (with_grad)
        for (auto& g : acc.grad_p) g *= scale;
    acc.permutations = num_orderings;
    return acc;
}

}  // namespace

double chain_prob(std::span<const double> probs, std::span<const int> order) {
    validate_inputs(probs, order);
    return static_cast<double>(chain_with_grad(probs, order, nullptr));
}

SubsetProbResult exact_subset_prob(std::span<const double> probs, std::span<const int> subset,
                                   std::uint64_t permutation_limit) {
    validate_inputs(probs, subset);
    if (is_full_set(probs, subset)) return full_set_result(probs.size(), ProbMode::exact, false);

    std::uint64_t n_fact = factorial(static_cast<int>(subset.size()));
    if (n_fact > permutation_limit)
        throw DomainError("subset",
                          "subset needs " + std::to_string(n_fact) +
                              " permutations, over the limit of " +
                              std::to_string(permutation_limit) + "; use mc_subset_prob");

    Accumulated acc = enumerate_exact(probs, subset, false);
    SubsetProbResult r;
    r.prob = static_cast<double>(acc.prob);
    r.log_prob = std::log(r.prob);
    r.mode = ProbMode::exact;
    r.permutations = acc.permutations;
    return r;
}

SubsetProbResult mc_subset_prob(std::span<const double> probs, std::span<const int> subset,
                                std::uint64_t num_orderings, RngStream& rng) {
    validate_inputs(probs, subset);
    if (num_orderings < 1) throw DomainError("num_orderings", "must be >= 1");
    if (is_full_set(probs, subset))
        return full_set_result(probs.size(), ProbMode::monte_carlo, false);

    std::uint64_t n_fact = factorial(static_cast<int>(subset.size()));
    Accumulated acc = num_orderings >= n_fact
                          ? enumerate_exact(probs, subset, false)  // exhaustion fast path
                          : sample_orderings(probs, subset, num_orderings, rng, false);
    SubsetProbResult r;
    r.prob = static_cast<double>(acc.prob);
    r.log_prob = std::log(r.prob);
    r.mode = ProbMode::monte_carlo;
    r.permutations = acc.permutations;
    return r;
}

SubsetProbResult log_prob_grad(std::span<const double> probs, std::span<const double> logits,
                               std::span<const int> subset, ProbMode mode,
                               std::uint64_t num_orderings, RngStream* rng) {
    validate_inputs(probs, subset);
    if (logits.size() != probs.size())
        throw ConfigError("logits", "logits/probs length mismatch");
    std::vector<double> check = softmax(logits);
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (std::abs(check[i] - probs[i]) > 1e-9)
            throw ConfigError("probs", "probs are not softmax(logits)");

    if (is_full_set(probs, subset)) return full_set_result(probs.size(), mode, true);

    Accumulated acc;
    std::uint64_t n_fact = factorial(static_cast<int>(subset.size()));
    if (mode == ProbMode::exact || num_orderings >= n_fact) {
        if (mode == ProbMode::exact && n_fact > kDefaultPermutationLimit)
            throw DomainError("subset", "too many permutations for exact mode; use monte_carlo");
        acc = enumerate_exact(probs, subset, true);
    } else {
        if (!rng) throw ConfigError("rng", "monte_carlo mode requires an RngStream");
        if (num_orderings < 1) throw DomainError("num_orderings", "must be >= 1");
        acc = sample_orderings(probs, subset, num_orderings, *rng, true);
    }

    SubsetProbResult r;
    r.prob = static_cast<double>(acc.prob);
    r.log_prob = std::log(r.prob);
    r.mode = mode;
    r.permutations = acc.permutations;
    r.grad_logits = chain_to_logits(probs, acc.grad_p, acc.prob);
    return r;
}

}  // namespace ocs
