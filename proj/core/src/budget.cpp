#include "ocs/budget.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ocs/combinatorics.hpp"
#include "ocs/mathutil.hpp"

namespace ocs {

BudgetHead BudgetHead::zeros(int feature_dim, int frame_count, int hidden) {
    BudgetHead h;
    h.feature_dim = feature_dim;
    h.frame_count = frame_count;
    h.hidden = hidden;
    h.w1.assign(static_cast<std::size_t>(hidden * feature_dim), 0.0);
    h.b1.assign(static_cast<std::size_t>(hidden), 0.0);
    h.w2.assign(static_cast<std::size_t>(frame_count * hidden), 0.0);
    h.b2.assign(static_cast<std::size_t>(frame_count), 0.0);
    return h;
}

std::vector<double> BudgetHead::flatten() const {
    std::vector<double> out;
    out.reserve(param_count());
    out.insert(out.end(), w1.begin(), w1.end());
    out.insert(out.end(), b1.begin(), b1.end());
    out.insert(out.end(), w2.begin(), w2.end());
    out.insert(out.end(), b2.begin(), b2.end());
    return out;
}

void BudgetHead::unflatten(std::span<const double> params) {
    if (params.size() != param_count())
        throw ConfigError("params", "budget head parameter count mismatch");
    auto it = params.begin();
    std::copy(it, it + static_cast<std::ptrdiff_t>(w1.size()), w1.begin());
    it += static_cast<std::ptrdiff_t>(w1.size());
    std::copy(it, it + static_cast<std::ptrdiff_t>(b1.size()), b1.begin());
    it += static_cast<std::ptrdiff_t>(b1.size());
    std::copy(it, it + static_cast<std::ptrdiff_t>(w2.size()), w2.begin());
    it += static_cast<std::ptrdiff_t>(w2.size());
    std::copy(it, it + static_cast<std::ptrdiff_t>(b2.size()), b2.begin());
}

std::vector<double> correctness_ratios(const SyntheticVideo& video, const SkimFeatures& features,
                                       const ClipClassifier& classifier,
                                       const BudgetConfig& config, RngStream& rng) {
    config.validate();
    int t_count = video.frame_count();
    std::vector<double> ratios(static_cast<std::size_t>(t_count), 0.0);
    for (int m = 1; m <= t_count; ++m) {
        std::uint64_t total = n_choose_k(t_count, m);
        double correct = 0.0;
        if (total <= config.exact_limit) {
            for_each_combination(t_count, m, [&](std::span<const int> subset) {
                if (is_correct(classifier.predict(video, features, subset), video.label))
                    correct += 1.0;
            });
            ratios[static_cast<std::size_t>(m - 1)] = correct / static_cast<double>(total);
        } else {
            for (int s = 0; s < config.samples_per_m; ++s) {
                std::vector<int> subset = rng.sample_distinct(m, t_count);
                std::sort(subset.begin(), subset.end());
                if (is_correct(classifier.predict(video, features, subset), video.label))
                    correct += 1.0;
            }
            ratios[static_cast<std::size_t>(m - 1)] = correct / static_cast<double>(config.samples_per_m);
        }
    }
    return ratios;
}

BudgetLabel build_budget_label(std::span<const double> ratios, const BudgetConfig& config) {
    config.validate();
    int t_count = static_cast<int>(ratios.size());
    for (double r : ratios)
        if (!(r >= 0.0 && r <= 1.0)) throw DomainError("ratios", "ratios must lie in [0, 1]");

    BudgetLabel out;
    out.ratios.assign(ratios.begin(), ratios.end());
    out.min_budget = t_count;  // fallback when no count reaches the threshold
    for (int m = 1; m <= t_count; ++m)
        if (ratios[static_cast<std::size_t>(m - 1)] >= config.epsilon) {
            out.min_budget = m;
            break;
        }

    out.label.assign(static_cast<std::size_t>(t_count), 0.0);
    double sum = 0.0;
    for (int i = out.min_budget; i <= t_count; ++i) {
        double v = std::pow(config.alpha, -static_cast<double>(i - out.min_budget));
        out.label[static_cast<std::size_t>(i - 1)] = v;
        sum += v;
    }
    out.normalized = out.label;
    for (double& v : out.normalized) v /= sum;
    return out;
}

namespace {

struct BudgetForwardState {
    std::vector<std::vector<double>> pre;  // per frame, hidden preactivations
    std::vector<double> pooled;            // mean of relu(pre) over frames
    std::vector<double> probs;
};

BudgetForwardState budget_forward_state(const BudgetHead& head, const SkimFeatures& features) {
    if (features.feature_dim() != head.feature_dim)
        throw ConfigError("feature_dim", "budget head/feature dimension mismatch");
    if (features.frame_count() != head.frame_count)
        throw ConfigError("frame_count", "budget head/frame count mismatch");

    BudgetForwardState st;
    int t_count = features.frame_count();
    st.pre.assign(static_cast<std::size_t>(t_count),
                  std::vector<double>(static_cast<std::size_t>(head.hidden)));
    st.pooled.assign(static_cast<std::size_t>(head.hidden), 0.0);
    for (int t = 0; t < t_count; ++t) {
        const auto& z = features.z[static_cast<std::size_t>(t)];
        auto& pre = st.pre[static_cast<std::size_t>(t)];
        for (int j = 0; j < head.hidden; ++j) {
            std::span<const double> row(head.w1.data() + j * head.feature_dim,
                                        static_cast<std::size_t>(head.feature_dim));
            double a = dot(row, z) + head.b1[static_cast<std::size_t>(j)];
            pre[static_cast<std::size_t>(j)] = a;
            if (a > 0.0) st.pooled[static_cast<std::size_t>(j)] += a;
        }
    }
    double inv = 1.0 / static_cast<double>(t_count);
    for (double& v : st.pooled) v *= inv;

    std::vector<double> logits(static_cast<std::size_t>(head.frame_count));
    for (int i = 0; i < head.frame_count; ++i) {
        std::span<const double> row(head.w2.data() + i * head.hidden,
                                    static_cast<std::size_t>(head.hidden));
        logits[static_cast<std::size_t>(i)] = dot(row, st.pooled) + head.b2[static_cast<std::size_t>(i)];
    }
    st.probs = softmax(logits);
    return st;
}

}  // namespace

std::vector<double> budget_forward(const BudgetHead& head, const SkimFeatures& features) {
    return budget_forward_state(head, features).probs;
}

double budget_loss_grad(const BudgetHead& head, std::span<const BudgetExample> batch,
                        std::span<double> grad_out) {
    if (grad_out.size() != head.param_count())
        throw ConfigError("grad_out", "gradient buffer has wrong size");
    std::fill(grad_out.begin(), grad_out.end(), 0.0);

    std::size_t w1_off = 0;
    std::size_t b1_off = head.w1.size();
    std::size_t w2_off = b1_off + head.b1.size();
    std::size_t b2_off = w2_off + head.w2.size();

    double loss = 0.0;
    std::vector<double> d_pooled(static_cast<std::size_t>(head.hidden));
    for (const auto& ex : batch) {
        const SkimFeatures& feats = *ex.features;
        BudgetForwardState st = budget_forward_state(head, feats);
        int t_count = feats.frame_count();

        for (int i = 0; i < head.frame_count; ++i)
            loss -= ex.weight * ex.target[static_cast<std::size_t>(i)] *
                    std::log(std::max(st.probs[static_cast<std::size_t>(i)], 1e-300));

        // d loss / d logit_i = weight * (p_i - y_i); targets sum to 1
        std::fill(d_pooled.begin(), d_pooled.end(), 0.0);
        for (int i = 0; i < head.frame_count; ++i) {
            double dl = ex.weight *
                        (st.probs[static_cast<std::size_t>(i)] - ex.target[static_cast<std::size_t>(i)]);
            for (int j = 0; j < head.hidden; ++j) {
                grad_out[w2_off + static_cast<std::size_t>(i * head.hidden + j)] +=
                    dl * st.pooled[static_cast<std::size_t>(j)];
                d_pooled[static_cast<std::size_t>(j)] +=
                    dl * head.w2[static_cast<std::size_t>(i * head.hidden + j)];
            }
            grad_out[b2_off + static_cast<std::size_t>(i)] += dl;
        }

        double inv = 1.0 / static_cast<double>(t_count);
        for (int t = 0; t < t_count; ++t) {
            const auto& z = feats.z[static_cast<std::size_t>(t)];
            const auto& pre = st.pre[static_cast<std::size_t>(t)];
            for (int j = 0; j < head.hidden; ++j) {
                if (pre[static_cast<std::size_t>(j)] <= 0.0) continue;  // relu gate
                double da = d_pooled[static_cast<std::size_t>(j)] * inv;
                for (int d = 0; d < head.feature_dim; ++d)
                    grad_out[w1_off + static_cast<std::size_t>(j * head.feature_dim + d)] +=
                        da * z[static_cast<std::size_t>(d)];
                grad_out[b1_off + static_cast<std::size_t>(j)] += da;
            }
        }
    }

    double inv = 1.0 / static_cast<double>(batch.size());
    for (double& g : grad_out) g *= inv;
    return loss * inv;
}

BudgetTrainResult train_budget(std::span<const SyntheticVideo> dataset,
                               const FeatureExtractorSpec& extractor,
                               const ClipClassifier& classifier, const BudgetConfig& config) {
    if (dataset.empty()) throw ConfigError("dataset", "dataset must be nonempty");
    config.validate();
    int t_count = dataset.front().frame_count();

    std::vector<SkimFeatures> features;
    features.reserve(dataset.size());
    for (const auto& v : dataset) features.push_back(extract(v, extractor));
    int dim = features.front().feature_dim();

    RngStream root = RngStream(config.seed).derive("budget");

    bool all_exact = true;
    for (int m = 1; m <= t_count; ++m)
        if (n_choose_k(t_count, m) > config.exact_limit) all_exact = false;

    BudgetTrainResult result;
    result.labels.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        RngStream ratio_rng = root.derive("ratios", dataset[i].id);
        std::vector<double> r =
            correctness_ratios(dataset[i], features[i], classifier, config, ratio_rng);
        BudgetLabel label = build_budget_label(r, config);
        label.ratio_mode = all_exact ? ProbMode::exact : ProbMode::monte_carlo;
        label.samples_per_m = all_exact ? 0 : config.samples_per_m;
        result.labels.push_back(std::move(label));
    }

    // inverse-frequency class weights over the minimum budgets, mean 1
    std::map<int, int> counts;
    for (const auto& l : result.labels) ++counts[l.min_budget];
    double distinct = static_cast<double>(counts.size());
    double n = static_cast<double>(dataset.size());
    std::vector<double> weights(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        weights[i] = n / (static_cast<double>(counts[result.labels[i].min_budget]) * distinct);

    BudgetHead head = BudgetHead::zeros(dim, t_count);
    RngStream init_rng = root.derive("init");
    double s1 = 1.0 / std::sqrt(static_cast<double>(dim));
    for (double& w : head.w1) w = init_rng.normal(0.0, s1);
    double s2 = 1.0 / std::sqrt(static_cast<double>(head.hidden));
    for (double& w : head.w2) w = init_rng.normal(0.0, s2);

    std::vector<double> grad(head.param_count());
    std::vector<double> params = head.flatten();
    std::vector<int> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        RngStream epoch_rng = root.derive("epoch", static_cast<std::uint64_t>(epoch));
        epoch_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch)) {
            std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch));
            std::vector<BudgetExample> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                std::size_t vi = static_cast<std::size_t>(order[i]);
                batch.push_back({&features[vi], result.labels[vi].normalized, weights[vi]});
            }
            double loss = budget_loss_grad(head, batch, grad);
            if (!std::isfinite(loss))
                throw DivergenceError("budget", epoch, "non-finite training loss");
            for (std::size_t j = 0; j < params.size(); ++j) params[j] -= config.lr * grad[j];
            head.unflatten(params);
            epoch_loss += loss;
            ++batches;
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
    }
    result.head = std::move(head);
    return result;
}

AdaptiveResult adaptive_infer(const SyntheticVideo& video, const BudgetHead& head,
                              const PolicyParams& policy, const FeatureExtractorSpec& extractor,
                              const ClipClassifier& classifier) {
    SkimFeatures feats = extract(video, extractor);
    std::vector<double> budget = budget_forward(head, feats);
    AdaptiveResult out;
    out.frames_used = argmax_smallest_tie(budget) + 1;  // counts are 1-based
    out.clip = top_n(policy_forward(policy, feats), out.frames_used);
    out.probs = classifier.predict(video, feats, out.clip.indices);
    return out;
}

}  // namespace ocs
