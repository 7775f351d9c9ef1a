#include "ocs/policy.hpp"

#include <algorithm>
#include <numeric>

#include "ocs/error.hpp"
#include "ocs/mathutil.hpp"

namespace ocs {

PolicyDistribution policy_forward(const PolicyParams& params, const SkimFeatures& features) {
    if (features.feature_dim() != static_cast<int>(params.weights.size()))
        throw ConfigError("weights", "policy/feature dimension mismatch");
    PolicyDistribution dist;
    dist.logits.reserve(features.z.size());
    for (const auto& z : features.z) dist.logits.push_back(dot(params.weights, z) + params.bias);
    dist.probs = softmax(dist.logits);
    return dist;
}

ClipSelection sample_clip(const PolicyDistribution& dist, int n, RngStream& rng) {
    int t_count = dist.frame_count();
    if (n < 1 || n > t_count) throw DomainError("n", "requires 1 <= N <= T");

    std::vector<double> remaining = dist.probs;
    double mass = 1.0;
    ClipSelection clip;
    clip.indices.reserve(static_cast<std::size_t>(n));
    for (int step = 0; step < n; ++step) {
        if (mass < 1e-12)
            throw NumericError("probs", "remaining probability mass is degenerate");
        double u = rng.next_real() * mass;
        double acc = 0.0;
        int chosen = -1;
        for (int t = 0; t < t_count; ++t) {
            acc += remaining[static_cast<std::size_t>(t)];
            if (u < acc) {
                chosen = t;
                break;
            }
        }
        if (chosen < 0) {  // numerical edge: fall back to the last unselected index
            for (int t = t_count - 1; t >= 0; --t)
                if (remaining[static_cast<std::size_t>(t)] > 0.0) {
                    chosen = t;
                    break;
                }
        }
        clip.indices.push_back(chosen);
        mass -= remaining[static_cast<std::size_t>(chosen)];
        remaining[static_cast<std::size_t>(chosen)] = 0.0;
    }
    return clip;
}

ClipSelection top_n(const PolicyDistribution& dist, int n) {
    int t_count = dist.frame_count();
    if (n < 1 || n > t_count) throw DomainError("n", "requires 1 <= N <= T");

    std::vector<int> order(static_cast<std::size_t>(t_count));
    std::iota(order.begin(), order.end(), 0);
    // stable sort by descending probability keeps ties at the smaller index
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return dist.probs[static_cast<std::size_t>(a)] > dist.probs[static_cast<std::size_t>(b)];
    });
    ClipSelection clip;
    clip.indices.assign(order.begin(), order.begin() + n);
    std::sort(clip.indices.begin(), clip.indices.end());
    return clip;
}

}  // namespace ocs
