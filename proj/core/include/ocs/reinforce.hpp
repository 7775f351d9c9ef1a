#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ocs/classifier.hpp"
#include "ocs/policy.hpp"
#include "ocs/subsetprob.hpp"

namespace ocs {

// clip: selected-clip confidence minus the expected confidence under
// uniform subset sampling (the control variate). frame: replaces the clip
// confidence by the mean of the per-frame confidences. vanilla: no
// baseline.
enum class RewardKind { clip, frame, vanilla };

struct RewardSample {
    double clip_confidence = 0.0;
    double baseline = 0.0;
    double reward = 0.0;  // always clip_confidence - baseline
    ProbMode baseline_mode = ProbMode::exact;
    std::uint64_t baseline_samples = 0;
};

struct Stage2Config {
    int clip_frames = 2;  // N
    double lr = 0.5;
    int epochs = 100;
    int batch = 16;
    int baseline_subsets = 16;                 // K, when the exact baseline is too big
    std::uint64_t baseline_exact_limit = 500;  // enumerate all C(T,N) subsets up to here
    ProbMode prob_mode = ProbMode::exact;
    std::uint64_t mc_permutations = 64;
    RewardKind reward_kind = RewardKind::clip;
    std::uint64_t seed = 0;

    void validate(int frames_per_video) const {
        if (clip_frames < 1 || clip_frames > frames_per_video)
            throw ConfigError("clip_frames", "requires 1 <= N <= T");
        if (!(lr > 0.0) && lr != 0.0) throw ConfigError("lr", "must be >= 0");
        if (epochs < 0) throw ConfigError("epochs", "must be >= 0");
        if (batch < 1) throw ConfigError("batch", "must be >= 1");
        if (baseline_subsets < 1) throw ConfigError("baseline_subsets", "must be >= 1");
        if (prob_mode == ProbMode::monte_carlo && mc_permutations < 1)
            throw ConfigError("mc_permutations", "must be >= 1");
    }
};

// Reward for one selected clip. The baseline is the exact mean confidence
// over all C(T,N) subsets when that count is within baseline_exact_limit,
// otherwise the mean over baseline_subsets sampled uniform subsets drawn
// from baseline_rng.
RewardSample compute_reward(const SyntheticVideo& video, const SkimFeatures& features,
                            std::span<const int> clip, const ClipClassifier& classifier,
                            const Stage2Config& config, RngStream& baseline_rng);

struct Stage2Epoch {
    int epoch = 0;
    double mean_reward = 0.0;
    double mean_confidence = 0.0;
    double grad_norm = 0.0;
};

struct Stage2Result {
    PolicyParams params;
    std::vector<Stage2Epoch> log;
};

// Policy-gradient ascent on the expected reward: per video, one sampled
// clip, gradient = reward * d log Prob(clip) / d params, averaged per
// minibatch. The classifier stays frozen throughout.
Stage2Result stage2_train(std::span<const SyntheticVideo> dataset,
                          const FeatureExtractorSpec& extractor, const ClipClassifier& classifier,
                          PolicyParams init, const Stage2Config& config);

// Trace of the empirical covariance of the per-video gradient estimator,
// per reward kind, with the clip draws and baseline draws shared across
// kinds so the comparison is paired. Requires trials >= 30.
std::map<RewardKind, double> gradient_variance(std::span<const SyntheticVideo> videos,
                                               const PolicyParams& params,
                                               const FeatureExtractorSpec& extractor,
                                               const ClipClassifier& classifier,
                                               const Stage2Config& config,
                                               std::span<const RewardKind> kinds, int trials);

// Per-trial gradient vectors (one per kind), exposed so paired statistics
// can be computed on the raw draws.
std::map<RewardKind, std::vector<std::vector<double>>> gradient_samples(
    std::span<const SyntheticVideo> videos, const PolicyParams& params,
    const FeatureExtractorSpec& extractor, const ClipClassifier& classifier,
    const Stage2Config& config, std::span<const RewardKind> kinds, int trials);

}  // namespace ocs
