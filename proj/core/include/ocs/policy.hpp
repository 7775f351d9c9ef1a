#pragma once

#include <span>
#include <vector>

#include "ocs/rng.hpp"
#include "ocs/skim.hpp"

namespace ocs {

// The selection head: one shared affine map scores each frame, softmax
// turns the T scores into a distribution over candidates.
struct PolicyParams {
    std::vector<double> weights;  // 1 x D_s
    double bias = 0.0;

    static PolicyParams zeros(int feature_dim) {
        return PolicyParams{std::vector<double>(static_cast<std::size_t>(feature_dim), 0.0), 0.0};
    }
};

struct PolicyDistribution {
    std::vector<double> probs;   // p^L, sums to 1, all > 0
    std::vector<double> logits;  // per-frame scores

    int frame_count() const { return static_cast<int>(probs.size()); }
};

// N distinct frame indices. `indices` keeps draw order; sorted() gives the
// set view used everywhere downstream.
struct ClipSelection {
    std::vector<int> indices;

    int size() const { return static_cast<int>(indices.size()); }
    std::vector<int> sorted() const {
        std::vector<int> s = indices;
        std::sort(s.begin(), s.end());
        return s;
    }
};

PolicyDistribution policy_forward(const PolicyParams& params, const SkimFeatures& features);

// Training-time selection: draws N frames sequentially without
// replacement, each step proportional to the remaining mass. Deterministic
// given the stream.
ClipSelection sample_clip(const PolicyDistribution& dist, int n, RngStream& rng);

// Test-time selection: the N most probable frames, ties toward the smaller
// index, output ascending.
ClipSelection top_n(const PolicyDistribution& dist, int n);

}  // namespace ocs
