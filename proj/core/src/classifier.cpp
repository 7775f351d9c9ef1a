#include "ocs/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ocs/mathutil.hpp"
#include "ocs/rng.hpp"

namespace ocs {

bool is_correct(const ClassProbs& probs, int label) {
    return argmax_smallest_tie(probs.p) == label;
}

ClassProbs oracle_predict(const SyntheticVideo& video, std::span<const int> clip,
                          const CoverageOracleSpec& spec, int num_classes) {
    spec.validate();
    if (clip.empty()) throw DomainError("clip", "clip must be nonempty");
    for (int t : clip)
        if (t < 0 || t >= video.frame_count())
            throw DomainError("clip", "clip index out of range");

    int hits = 0;
    for (int t : clip)
        if (std::binary_search(video.salient_set.begin(), video.salient_set.end(), t)) ++hits;
    double coverage = static_cast<double>(hits) / static_cast<double>(video.salient_set.size());
    double conf = spec.c_min + (1.0 - spec.c_min) * std::pow(coverage, spec.gamma);
    conf = std::min(conf, 1.0 - 1e-9);

    ClassProbs out;
    out.p.assign(static_cast<std::size_t>(num_classes),
                 (1.0 - conf) / static_cast<double>(num_classes - 1));
    out.p[static_cast<std::size_t>(video.label)] = conf;
    return out;
}

LinearClassifier LinearClassifier::zeros(int num_classes, int feature_dim) {
    LinearClassifier m;
    m.num_classes = num_classes;
    m.feature_dim = feature_dim;
    m.weights.assign(static_cast<std::size_t>(num_classes * feature_dim), 0.0);
    m.bias.assign(static_cast<std::size_t>(num_classes), 0.0);
    return m;
}

namespace {

std::vector<double> pool_clip(const SkimFeatures& features, std::span<const int> clip) {
    if (clip.empty()) throw DomainError("clip", "clip must be nonempty");
    int dim = features.feature_dim();
    std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
    for (int t : clip) {
        if (t < 0 || t >= features.frame_count())
            throw DomainError("clip", "clip index out of range");
        const auto& z = features.z[static_cast<std::size_t>(t)];
        for (int d = 0; d < dim; ++d) x[static_cast<std::size_t>(d)] += z[static_cast<std::size_t>(d)];
    }
    double inv = 1.0 / static_cast<double>(clip.size());
    for (double& v : x) v *= inv;
    return x;
}

ClassProbs predict_pooled(const LinearClassifier& model, std::span<const double> x) {
    std::vector<double> logits(static_cast<std::size_t>(model.num_classes));
    for (int c = 0; c < model.num_classes; ++c) {
        std::span<const double> row(model.weights.data() + c * model.feature_dim,
                                    static_cast<std::size_t>(model.feature_dim));
        logits[static_cast<std::size_t>(c)] = dot(row, x) + model.bias[static_cast<std::size_t>(c)];
    }
    return ClassProbs{softmax(logits)};
}

}  // namespace

ClassProbs classify(const LinearClassifier& model, const SkimFeatures& features,
                    std::span<const int> clip) {
    if (features.feature_dim() != model.feature_dim)
        throw ConfigError("feature_dim", "classifier/feature dimension mismatch");
    return predict_pooled(model, pool_clip(features, clip));
}

double stage1_loss_grad(const LinearClassifier& model, std::span<const PooledExample> batch,
                        std::span<double> grad_out) {
    std::size_t n_params = model.weights.size() + model.bias.size();
    if (grad_out.size() != n_params)
        throw ConfigError("grad_out", "gradient buffer has wrong size");
    std::fill(grad_out.begin(), grad_out.end(), 0.0);

    double loss = 0.0;
    for (const auto& ex : batch) {
        ClassProbs probs = predict_pooled(model, ex.x);
        loss -= std::log(std::max(probs.p[static_cast<std::size_t>(ex.label)], 1e-300));
        // d loss / d logit_c = p_c - [c == y]
        for (int c = 0; c < model.num_classes; ++c) {
            double delta = probs.p[static_cast<std::size_t>(c)] - (c == ex.label ? 1.0 : 0.0);
            for (int d = 0; d < model.feature_dim; ++d)
                grad_out[static_cast<std::size_t>(c * model.feature_dim + d)] +=
                    delta * ex.x[static_cast<std::size_t>(d)];
            grad_out[model.weights.size() + static_cast<std::size_t>(c)] += delta;
        }
    }
    double inv = 1.0 / static_cast<double>(batch.size());
    for (double& g : grad_out) g *= inv;
    return loss * inv;
}

Stage1Result train_classifier(const std::vector<SyntheticVideo>& dataset,
                              const FeatureExtractorSpec& extractor, const Stage1Config& config) {
    if (dataset.empty()) throw ConfigError("dataset", "dataset must be nonempty");
    int t_count = dataset.front().frame_count();
    config.validate(t_count);

    std::vector<SkimFeatures> features;
    features.reserve(dataset.size());
    for (const auto& v : dataset) features.push_back(extract(v, extractor));

    int num_classes = config.num_classes;
    if (num_classes == 0) {
        for (const auto& v : dataset) num_classes = std::max(num_classes, v.label + 1);
        num_classes = std::max(num_classes, 2);
    }
    int dim = features.front().feature_dim();

    LinearClassifier model = LinearClassifier::zeros(num_classes, dim);
    std::vector<double> grad(model.weights.size() + model.bias.size());

    RngStream root = RngStream(config.seed).derive("stage1");
    std::vector<int> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    Stage1Result result;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        RngStream epoch_rng = root.derive("epoch", static_cast<std::uint64_t>(epoch));
        epoch_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch)) {
            std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch));
            std::vector<PooledExample> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                int vi = order[i];
                const auto& video = dataset[static_cast<std::size_t>(vi)];
                RngStream clip_rng = epoch_rng.derive("clip", video.id);
                std::vector<int> clip = clip_rng.sample_distinct(config.clip_frames, t_count);
                batch.push_back(
                    {pool_clip(features[static_cast<std::size_t>(vi)], clip), video.label});
            }
            double loss = stage1_loss_grad(model, batch, grad);
            if (!std::isfinite(loss))
                throw DivergenceError("stage1", epoch, "non-finite training loss");
            for (std::size_t j = 0; j < model.weights.size(); ++j)
                model.weights[j] -= config.lr * grad[j];
            for (std::size_t j = 0; j < model.bias.size(); ++j)
                model.bias[j] -= config.lr * grad[model.weights.size() + j];
            epoch_loss += loss;
            ++batches;
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
    }
    result.model = std::move(model);
    return result;
}

}  // namespace ocs
