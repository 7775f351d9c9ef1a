#include "ocs/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ocs/budget.hpp"
#include "ocs/classifier.hpp"
#include "ocs/combinatorics.hpp"
#include "ocs/dataset.hpp"
#include "ocs/mathutil.hpp"
#include "ocs/policy.hpp"
#include "ocs/rng.hpp"
#include "ocs/subsetprob.hpp"

namespace ocs {

namespace {

// Independent route: recursive expansion of the sequential-sampling tree,
// no permutation container, no shared code with the shipped enumerator.
double recursive_subset_prob(std::span<const double> probs, std::vector<int>& remaining,
                             double mass, double prefix) {
    if (remaining.empty()) return prefix;
    double total = 0.0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        int idx = remaining[i];
        double p = probs[static_cast<std::size_t>(idx)];
        std::vector<int> rest;
        rest.reserve(remaining.size() - 1);
        for (std::size_t j = 0; j < remaining.size(); ++j)
            if (j != i) rest.push_back(remaining[j]);
        total += recursive_subset_prob(probs, rest, mass - p, prefix * p / mass);
    }
    return total;
}

std::vector<double> random_distribution(RngStream& rng, int t_count) {
    std::vector<double> logits(static_cast<std::size_t>(t_count));
    for (double& v : logits) v = rng.normal();
    return softmax(logits);
}

std::string fmt_detail(double value, double bound, const char* relation) {
    std::ostringstream ss;
    ss << value << ' ' << relation << ' ' << bound;
    return ss.str();
}

CheckResult check_exact_vs_recursive(RngStream& rng) {
    double worst = 0.0;
    for (int t = 3; t <= 8; ++t) {
        for (int n = 1; n <= std::min(4, t); ++n) {
            std::vector<double> probs = random_distribution(rng, t);
            double sum = 0.0;
            for_each_combination(t, n, [&](std::span<const int> subset) {
                double shipped = exact_subset_prob(probs, subset).prob;
                std::vector<int> rem(subset.begin(), subset.end());
                double alt = recursive_subset_prob(probs, rem, 1.0, 1.0);
                worst = std::max(worst, std::abs(shipped - alt));
                sum += shipped;
            });
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    }
    return {"exact_subset_prob_vs_recursive", worst <= 1e-9, fmt_detail(worst, 1e-9, "<=")};
}

CheckResult check_gradient(RngStream& rng) {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        int t = 4 + static_cast<int>(rng.below(5));
        int n = 1 + static_cast<int>(rng.below(3));
        std::vector<double> logits(static_cast<std::size_t>(t));
        for (double& v : logits) v = rng.normal();
        std::vector<double> probs = softmax(logits);
        std::vector<int> subset = rng.sample_distinct(n, t);
        std::sort(subset.begin(), subset.end());

        SubsetProbResult res = log_prob_grad(probs, logits, subset, ProbMode::exact);
        const double h = 1e-5;
        double scale = 0.0;
        std::vector<double> fd(static_cast<std::size_t>(t));
        for (int j = 0; j < t; ++j) {
            auto eval = [&](double delta) {
                std::vector<double> shifted = logits;
                shifted[static_cast<std::size_t>(j)] += delta;
                std::vector<double> p = softmax(shifted);
                return exact_subset_prob(p, subset).log_prob;
            };
            fd[static_cast<std::size_t>(j)] = (eval(h) - eval(-h)) / (2.0 * h);
            scale = std::max(scale, std::abs(fd[static_cast<std::size_t>(j)]));
        }
        for (int j = 0; j < t; ++j)
            worst = std::max(worst, std::abs(res.grad_logits[static_cast<std::size_t>(j)] -
                                             fd[static_cast<std::size_t>(j)]) /
                                        std::max(scale, 1e-8));
    }
    return {"log_prob_grad_vs_finite_differences", worst <= 1e-5, fmt_detail(worst, 1e-5, "<=")};
}

CheckResult check_mc_unbiased(RngStream& rng) {
    std::vector<double> probs = random_distribution(rng, 8);
    std::vector<int> subset = {1, 3, 6};
    double exact = exact_subset_prob(probs, subset).prob;

    const int runs = 300;
    const std::uint64_t orderings = 4;  // N! = 6, so sampling really happens
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < runs; ++i) {
        RngStream run_rng = rng.derive("mc_run", static_cast<std::uint64_t>(i));
        double est = mc_subset_prob(probs, subset, orderings, run_rng).prob;
        sum += est;
        sum_sq += est * est;
    }
    double mean = sum / runs;
    double var = (sum_sq - sum * sum / runs) / (runs - 1);
    double sigma = std::sqrt(var / runs);
    double dev = std::abs(mean - exact);
    return {"mc_subset_prob_unbiased", dev <= 4.0 * sigma,
            fmt_detail(dev, 4.0 * sigma, "<= 4*sigma =")};
}

CheckResult check_sampler_consistency(RngStream& rng) {
    const int t = 6, n = 2;
    std::vector<double> logits(static_cast<std::size_t>(t));
    for (double& v : logits) v = rng.normal();
    PolicyDistribution dist{softmax(logits), logits};

    std::vector<std::vector<int>> subsets;
    std::vector<double> expected;
    for_each_combination(t, n, [&](std::span<const int> subset) {
        subsets.emplace_back(subset.begin(), subset.end());
        expected.push_back(exact_subset_prob(dist.probs, subset).prob);
    });

    const int draws = 100000;
    std::vector<int> counts(subsets.size(), 0);
    RngStream draw_rng = rng.derive("draws");
    for (int i = 0; i < draws; ++i) {
        std::vector<int> picked = sample_clip(dist, n, draw_rng).sorted();
        for (std::size_t s = 0; s < subsets.size(); ++s)
            if (subsets[s] == picked) {
                ++counts[s];
                break;
            }
    }
    double chi2 = 0.0;
    for (std::size_t s = 0; s < subsets.size(); ++s) {
        double e = expected[s] * draws;
        chi2 += (counts[s] - e) * (counts[s] - e) / e;
    }
    // chi-square critical value at p = 0.001 for df = C(6,2) - 1 = 14
    const double critical = 36.1233;
    return {"sample_clip_matches_subset_probabilities", chi2 <= critical,
            fmt_detail(chi2, critical, "<=")};
}

CheckResult check_classifier_gradient(RngStream& rng) {
    const int c = 3, d = 5;
    LinearClassifier model = LinearClassifier::zeros(c, d);
    for (double& w : model.weights) w = rng.normal(0.0, 0.5);
    for (double& b : model.bias) b = rng.normal(0.0, 0.5);

    std::vector<PooledExample> batch;
    for (int i = 0; i < 8; ++i) {
        PooledExample ex;
        ex.x.resize(d);
        for (double& v : ex.x) v = rng.normal();
        ex.label = static_cast<int>(rng.below(c));
        batch.push_back(std::move(ex));
    }

    std::vector<double> grad(model.weights.size() + model.bias.size());
    stage1_loss_grad(model, batch, grad);

    auto loss_at = [&](const LinearClassifier& m) {
        std::vector<double> tmp(grad.size());
        return stage1_loss_grad(m, batch, tmp);
    };
    const double h = 1e-5;
    double worst = 0.0, scale = 0.0;
    std::vector<double> fd(grad.size());
    for (std::size_t j = 0; j < grad.size(); ++j) {
        LinearClassifier up = model, down = model;
        auto& u = j < model.weights.size() ? up.weights[j] : up.bias[j - model.weights.size()];
        auto& dn = j < model.weights.size() ? down.weights[j] : down.bias[j - model.weights.size()];
        u += h;
        dn -= h;
        fd[j] = (loss_at(up) - loss_at(down)) / (2.0 * h);
        scale = std::max(scale, std::abs(fd[j]));
    }
    for (std::size_t j = 0; j < grad.size(); ++j)
        worst = std::max(worst, std::abs(grad[j] - fd[j]) / std::max(scale, 1e-8));
    return {"classifier_gradient_vs_finite_differences", worst <= 1e-5,
            fmt_detail(worst, 1e-5, "<=")};
}

}  // namespace

std::vector<CheckResult> run_selfchecks(std::uint64_t seed) {
    RngStream root = RngStream(seed).derive("selfcheck");
    std::vector<CheckResult> results;
    {
        RngStream rng = root.derive("exact");
        results.push_back(check_exact_vs_recursive(rng));
    }
    {
        RngStream rng = root.derive("grad");
        results.push_back(check_gradient(rng));
    }
    {
        RngStream rng = root.derive("mc");
        results.push_back(check_mc_unbiased(rng));
    }
    {
        RngStream rng = root.derive("sampler");
        results.push_back(check_sampler_consistency(rng));
    }
    {
        RngStream rng = root.derive("classifier");
        results.push_back(check_classifier_gradient(rng));
    }
    return results;
}

}  // namespace ocs
