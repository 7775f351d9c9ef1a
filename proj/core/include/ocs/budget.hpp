#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ocs/classifier.hpp"
#include "ocs/policy.hpp"
#include "ocs/subsetprob.hpp"

namespace ocs {

// Frame-count head: a shared per-frame MLP (relu, 64 hidden units by
// default), mean-pooled over frames, then projected to logits over the
// frame counts 1..T.
struct BudgetHead {
    int feature_dim = 0;
    int frame_count = 0;  // T; output classes are the counts 1..T
    int hidden = 64;
    std::vector<double> w1;  // hidden x D_s
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // T x hidden
    std::vector<double> b2;  // T

    static BudgetHead zeros(int feature_dim, int frame_count, int hidden = 64);
    std::size_t param_count() const {
        return w1.size() + b1.size() + w2.size() + b2.size();
    }
    std::vector<double> flatten() const;
    void unflatten(std::span<const double> params);
};

struct BudgetConfig {
    double epsilon = 0.5;           // correctness threshold for the minimum budget
    double alpha = 2.0;             // decay of the label tail above the minimum budget
    int samples_per_m = 64;         // MC subsets per frame count when not exact
    std::uint64_t exact_limit = 200;  // enumerate all C(T,m) subsets up to here
    double lr = 0.2;
    int epochs = 200;
    int batch = 16;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon", "requires 0 < epsilon <= 1");
        if (!(alpha > 1.0)) throw ConfigError("alpha", "must be > 1");
        if (samples_per_m < 1) throw ConfigError("samples_per_m", "must be >= 1");
        if (lr < 0) throw ConfigError("lr", "must be >= 0");
        if (epochs < 0) throw ConfigError("epochs", "must be >= 0");
        if (batch < 1) throw ConfigError("batch", "must be >= 1");
    }
};

struct BudgetLabel {
    std::vector<double> ratios;      // r^m for m = 1..T (index m-1)
    int min_budget = 0;              // k, 1-based frame count
    std::vector<double> label;       // y^B, unnormalized
    std::vector<double> normalized;  // y^B scaled to sum 1
    ProbMode ratio_mode = ProbMode::exact;
    int samples_per_m = 0;
};

// r^m for every m in 1..T: the fraction of m-frame combinations the
// classifier labels correctly. Exact enumeration while C(T,m) stays within
// exact_limit, Monte-Carlo with samples_per_m uniform subsets otherwise
// (r^T is always exact: there is a single subset).
std::vector<double> correctness_ratios(const SyntheticVideo& video, const SkimFeatures& features,
                                       const ClipClassifier& classifier,
                                       const BudgetConfig& config, RngStream& rng);

// k = the smallest m with r^m >= epsilon (k = T when none qualifies);
// y^B_k = 1, y^B_i = alpha^-(i-k) above k, 0 below; plus the normalized
// copy used as the cross-entropy target.
BudgetLabel build_budget_label(std::span<const double> ratios, const BudgetConfig& config);

// Probability vector over frame counts 1..T.
std::vector<double> budget_forward(const BudgetHead& head, const SkimFeatures& features);

struct BudgetExample {
    const SkimFeatures* features = nullptr;
    std::vector<double> target;  // normalized label over counts 1..T
    double weight = 1.0;
};

// Weighted-mean cross-entropy over the batch and its gradient with respect
// to the flattened head parameters (w1, b1, w2, b2).
double budget_loss_grad(const BudgetHead& head, std::span<const BudgetExample> batch,
                        std::span<double> grad_out);

struct BudgetTrainResult {
    BudgetHead head;
    std::vector<double> epoch_loss;
    std::vector<BudgetLabel> labels;  // per video, dataset order
};

// Builds pseudo-labels from combination statistics, then minimizes the
// class-weighted cross-entropy by minibatch SGD. Videos whose minimum
// budget is rare get proportionally larger weight (normalized to mean 1).
BudgetTrainResult train_budget(std::span<const SyntheticVideo> dataset,
                               const FeatureExtractorSpec& extractor,
                               const ClipClassifier& classifier, const BudgetConfig& config);

struct AdaptiveResult {
    int frames_used = 0;
    ClipSelection clip;
    ClassProbs probs;
};

// Frame count = argmax of the budget head (ties toward the smaller,
// cheaper count), then the policy's top-N selection, then the classifier.
AdaptiveResult adaptive_infer(const SyntheticVideo& video, const BudgetHead& head,
                              const PolicyParams& policy, const FeatureExtractorSpec& extractor,
                              const ClipClassifier& classifier);

}  // namespace ocs
