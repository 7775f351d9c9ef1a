#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ocs/skim.hpp"
#include "ocs/types.hpp"

namespace ocs {

struct ClassProbs {
    std::vector<double> p;
    int num_classes() const { return static_cast<int>(p.size()); }
};

// argmax(p) == label, ties broken toward the smallest class index.
bool is_correct(const ClassProbs& probs, int label);

// Closed-form stand-in for a pretrained classifier: confidence on the true
// label grows with the fraction of the salient set the clip covers,
//   p_true = c_min + (1 - c_min) * coverage^gamma   (clamped to <= 1 - 1e-9)
// and the remaining mass is uniform over the other classes.
struct CoverageOracleSpec {
    double c_min = 0.1;
    double gamma = 1.0;

    void validate() const {
        if (!(c_min > 0.0 && c_min < 1.0)) throw ConfigError("c_min", "requires 0 < c_min < 1");
        if (!(gamma > 0.0)) throw ConfigError("gamma", "must be > 0");
    }
};

ClassProbs oracle_predict(const SyntheticVideo& video, std::span<const int> clip,
                          const CoverageOracleSpec& spec, int num_classes);

// Linear softmax head over mean-pooled clip features.
struct LinearClassifier {
    int num_classes = 0;
    int feature_dim = 0;
    std::vector<double> weights;  // C x D_s, row-major
    std::vector<double> bias;     // C

    static LinearClassifier zeros(int num_classes, int feature_dim);
    double weight(int c, int d) const {
        return weights[static_cast<std::size_t>(c * feature_dim + d)];
    }
};

// Mean-pool the clip's features, apply the affine map, softmax. Invariant
// to clip ordering.
ClassProbs classify(const LinearClassifier& model, const SkimFeatures& features,
                    std::span<const int> clip);

// Shared prediction seam: the reward, budget and evaluation machinery only
// see this interface, so the oracle and the trained head are
// interchangeable (and tests can wrap either).
class ClipClassifier {
public:
    virtual ~ClipClassifier() = default;
    virtual ClassProbs predict(const SyntheticVideo& video, const SkimFeatures& features,
                               std::span<const int> clip) const = 0;
    virtual int num_classes() const = 0;
};

class CoverageOracle final : public ClipClassifier {
public:
    CoverageOracle(const CoverageOracleSpec& spec, int num_classes)
        : spec_(spec), num_classes_(num_classes) {
        spec_.validate();
    }
    ClassProbs predict(const SyntheticVideo& video, const SkimFeatures&,
                       std::span<const int> clip) const override {
        return oracle_predict(video, clip, spec_, num_classes_);
    }
    int num_classes() const override { return num_classes_; }
    const CoverageOracleSpec& spec() const { return spec_; }

private:
    CoverageOracleSpec spec_;
    int num_classes_;
};

class LinearSoftmaxClassifier final : public ClipClassifier {
public:
    explicit LinearSoftmaxClassifier(LinearClassifier model) : model_(std::move(model)) {}
    ClassProbs predict(const SyntheticVideo&, const SkimFeatures& features,
                       std::span<const int> clip) const override {
        return classify(model_, features, clip);
    }
    int num_classes() const override { return model_.num_classes; }
    const LinearClassifier& model() const { return model_; }

private:
    LinearClassifier model_;
};

// One mean-pooled training example.
struct PooledExample {
    std::vector<double> x;
    int label = 0;
};

// Mean cross-entropy over the batch plus its gradient with respect to the
// flattened parameters (weights row-major, then bias). Used by training and
// by the finite-difference checks.
double stage1_loss_grad(const LinearClassifier& model, std::span<const PooledExample> batch,
                        std::span<double> grad_out);

struct Stage1Config {
    double lr = 0.1;  // stable on the standard synthetic environment for lr <= 1.0
    int epochs = 50;
    int batch = 16;
    int clip_frames = 10;  // N_train, frames per sampled training clip
    int num_classes = 0;   // 0: derive from the labels present
    std::uint64_t seed = 0;

    void validate(int frames_per_video) const {
        if (lr < 0) throw ConfigError("lr", "must be >= 0");
        if (epochs < 0) throw ConfigError("epochs", "must be >= 0");
        if (batch < 1) throw ConfigError("batch", "must be >= 1");
        if (clip_frames < 1 || clip_frames > frames_per_video)
            throw ConfigError("clip_frames", "requires 1 <= N_train <= T");
    }
};

struct Stage1Result {
    LinearClassifier model;
    std::vector<double> epoch_loss;
};

// Minimizes cross-entropy by minibatch SGD over clips of clip_frames
// frames drawn uniformly without replacement, fresh per video per epoch.
// Deterministic given the seed.
Stage1Result train_classifier(const std::vector<SyntheticVideo>& dataset,
                              const FeatureExtractorSpec& extractor, const Stage1Config& config);

}  // namespace ocs
