#include "ocs/reinforce.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ocs/combinatorics.hpp"
#include "ocs/mathutil.hpp"

namespace ocs {

namespace {

double true_label_confidence(const SyntheticVideo& video, const SkimFeatures& features,
                             std::span<const int> clip, const ClipClassifier& classifier) {
    return classifier.predict(video, features, clip).p[static_cast<std::size_t>(video.label)];
}

double frame_mean_confidence(const SyntheticVideo& video, const SkimFeatures& features,
                             std::span<const int> clip, const ClipClassifier& classifier) {
    double sum = 0.0;
    for (int t : clip) {
        int single[1] = {t};
        sum += true_label_confidence(video, features, single, classifier);
    }
    return sum / static_cast<double>(clip.size());
}

struct Baseline {
    double value = 0.0;
    ProbMode mode = ProbMode::exact;
    std::uint64_t samples = 0;
};

Baseline uniform_baseline(const SyntheticVideo& video, const SkimFeatures& features,
                          const ClipClassifier& classifier, const Stage2Config& config,
                          RngStream& rng) {
    int t_count = video.frame_count();
    Baseline b;
    std::uint64_t total = n_choose_k(t_count, config.clip_frames);
    if (total <= config.baseline_exact_limit) {
        double sum = 0.0;
        for_each_combination(t_count, config.clip_frames, [&](std::span<const int> subset) {
            sum += true_label_confidence(video, features, subset, classifier);
        });
        b.value = sum / static_cast<double>(total);
        b.mode = ProbMode::exact;
        b.samples = total;
    } else {
        double sum = 0.0;
        for (int k = 0; k < config.baseline_subsets; ++k) {
            std::vector<int> subset = rng.sample_distinct(config.clip_frames, t_count);
            sum += true_label_confidence(video, features, subset, classifier);
        }
        b.value = sum / static_cast<double>(config.baseline_subsets);
        b.mode = ProbMode::monte_carlo;
        b.samples = static_cast<std::uint64_t>(config.baseline_subsets);
    }
    return b;
}

// reward * d log Prob / d (weights, bias); bias gradient is last.
std::vector<double> param_gradient(const SkimFeatures& features,
                                   std::span<const double> grad_logits, double reward) {
    int dim = features.feature_dim();
    std::vector<double> grad(static_cast<std::size_t>(dim) + 1, 0.0);
    for (int t = 0; t < features.frame_count(); ++t) {
        double g = grad_logits[static_cast<std::size_t>(t)];
        const auto& z = features.z[static_cast<std::size_t>(t)];
        for (int d = 0; d < dim; ++d) grad[static_cast<std::size_t>(d)] += g * z[static_cast<std::size_t>(d)];
        grad[static_cast<std::size_t>(dim)] += g;
    }
    for (double& g : grad) g *= reward;
    return grad;
}

}  // namespace

RewardSample compute_reward(const SyntheticVideo& video, const SkimFeatures& features,
                            std::span<const int> clip, const ClipClassifier& classifier,
                            const Stage2Config& config, RngStream& baseline_rng) {
    if (clip.empty()) throw DomainError("clip", "clip must be nonempty");

    RewardSample r;
    r.clip_confidence = config.reward_kind == RewardKind::frame
                            ? frame_mean_confidence(video, features, clip, classifier)
                            : true_label_confidence(video, features, clip, classifier);
    if (config.reward_kind == RewardKind::vanilla) {
        r.baseline = 0.0;
        r.baseline_mode = ProbMode::exact;
        r.baseline_samples = 0;
    } else {
        Baseline b = uniform_baseline(video, features, classifier, config, baseline_rng);
        r.baseline = b.value;
        r.baseline_mode = b.mode;
        r.baseline_samples = b.samples;
    }
    r.reward = r.clip_confidence - r.baseline;
    return r;
}

Stage2Result stage2_train(std::span<const SyntheticVideo> dataset,
                          const FeatureExtractorSpec& extractor, const ClipClassifier& classifier,
                          PolicyParams init, const Stage2Config& config) {
    if (dataset.empty()) throw ConfigError("dataset", "dataset must be nonempty");
    config.validate(dataset.front().frame_count());

    std::vector<SkimFeatures> features;
    features.reserve(dataset.size());
    for (const auto& v : dataset) features.push_back(extract(v, extractor));

    PolicyParams params = std::move(init);
    std::size_t dim = params.weights.size();
    RngStream root = RngStream(config.seed).derive("stage2");

    std::vector<int> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    Stage2Result result;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        RngStream epoch_rng = root.derive("epoch", static_cast<std::uint64_t>(epoch));
        epoch_rng.shuffle(order);

        double reward_sum = 0.0;
        double conf_sum = 0.0;
        double norm_sum = 0.0;
        std::size_t batches = 0;

        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch)) {
            std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch));
            std::vector<double> batch_grad(dim + 1, 0.0);
            for (std::size_t i = start; i < end; ++i) {
                const auto& video = dataset[static_cast<std::size_t>(order[i])];
                const auto& feats = features[static_cast<std::size_t>(order[i])];

                PolicyDistribution dist = policy_forward(params, feats);
                RngStream sample_rng = epoch_rng.derive("sample", video.id);
                ClipSelection clip = sample_clip(dist, config.clip_frames, sample_rng);
                std::vector<int> subset = clip.sorted();

                RngStream baseline_rng = epoch_rng.derive("baseline", video.id);
                RewardSample reward =
                    compute_reward(video, feats, subset, classifier, config, baseline_rng);

                RngStream perm_rng = epoch_rng.derive("perm", video.id);
                SubsetProbResult lp = log_prob_grad(dist.probs, dist.logits, subset,
                                                    config.prob_mode, config.mc_permutations,
                                                    &perm_rng);
                std::vector<double> grad = param_gradient(feats, lp.grad_logits, reward.reward);
                for (std::size_t d = 0; d <= dim; ++d) batch_grad[d] += grad[d];

                reward_sum += reward.reward;
                conf_sum += reward.clip_confidence;
            }
            double inv = 1.0 / static_cast<double>(end - start);
            for (double& g : batch_grad) g *= inv;
            if (!all_finite(batch_grad))
                throw DivergenceError("stage2", epoch, "non-finite policy gradient");
            for (std::size_t d = 0; d < dim; ++d) params.weights[d] += config.lr * batch_grad[d];
            params.bias += config.lr * batch_grad[dim];
            norm_sum += l2_norm(batch_grad);
            ++batches;
        }

        Stage2Epoch entry;
        entry.epoch = epoch;
        entry.mean_reward = reward_sum / static_cast<double>(dataset.size());
        entry.mean_confidence = conf_sum / static_cast<double>(dataset.size());
        entry.grad_norm = norm_sum / static_cast<double>(batches);
        result.log.push_back(entry);
    }
    result.params = std::move(params);
    return result;
}

std::map<RewardKind, std::vector<std::vector<double>>> gradient_samples(
    std::span<const SyntheticVideo> videos, const PolicyParams& params,
    const FeatureExtractorSpec& extractor, const ClipClassifier& classifier,
    const Stage2Config& config, std::span<const RewardKind> kinds, int trials) {
    if (trials < 30)
        throw DomainError("trials", "gradient variance estimates require trials >= 30");
    if (videos.empty()) throw ConfigError("videos", "need at least one video");

    std::vector<SkimFeatures> features;
    features.reserve(videos.size());
    for (const auto& v : videos) features.push_back(extract(v, extractor));

    RngStream root = RngStream(config.seed).derive("gradient_variance");
    std::map<RewardKind, std::vector<std::vector<double>>> samples;
    for (RewardKind kind : kinds) samples[kind] = {};

    for (int trial = 0; trial < trials; ++trial) {
        std::size_t vi = static_cast<std::size_t>(trial) % videos.size();
        const auto& video = videos[vi];
        const auto& feats = features[vi];

        PolicyDistribution dist = policy_forward(params, feats);
        RngStream trial_rng = root.derive("trial", static_cast<std::uint64_t>(trial));
        RngStream sample_rng = trial_rng.derive("sample", video.id);
        ClipSelection clip = sample_clip(dist, config.clip_frames, sample_rng);
        std::vector<int> subset = clip.sorted();

        RngStream perm_rng = trial_rng.derive("perm", video.id);
        SubsetProbResult lp = log_prob_grad(dist.probs, dist.logits, subset, config.prob_mode,
                                            config.mc_permutations, &perm_rng);

        // one clip and one baseline stream per trial, shared by every kind
        for (RewardKind kind : kinds) {
            Stage2Config kind_config = config;
            kind_config.reward_kind = kind;
            RngStream baseline_rng = trial_rng.derive("baseline", video.id);
            RewardSample reward =
                compute_reward(video, feats, subset, classifier, kind_config, baseline_rng);
            samples[kind].push_back(param_gradient(feats, lp.grad_logits, reward.reward));
        }
    }
    return samples;
}

std::map<RewardKind, double> gradient_variance(std::span<const SyntheticVideo> videos,
                                               const PolicyParams& params,
                                               const FeatureExtractorSpec& extractor,
                                               const ClipClassifier& classifier,
                                               const Stage2Config& config,
                                               std::span<const RewardKind> kinds, int trials) {
    auto samples = gradient_samples(videos, params, extractor, classifier, config, kinds, trials);
    std::map<RewardKind, double> trace;
    for (const auto& [kind, grads] : samples) {
        std::size_t n = grads.size();
        std::size_t dim = grads.front().size();
        double total = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            double m = 0.0;
            for (const auto& g : grads) m += g[d];
            m /= static_cast<double>(n);
            double var = 0.0;
            for (const auto& g : grads) var += (g[d] - m) * (g[d] - m);
            total += var / static_cast<double>(n - 1);
        }
        trace[kind] = total;
    }
    return trace;
}

}  // namespace ocs
