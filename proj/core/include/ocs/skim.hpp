#pragma once

#include <cstdint>
#include <vector>

#include "ocs/types.hpp"

namespace ocs {

// Per-frame context features produced by the skim pass over all T
// candidate frames.
struct SkimFeatures {
    std::vector<std::vector<double>> z;
    std::uint64_t source_video_id = 0;

    int frame_count() const { return static_cast<int>(z.size()); }
    int feature_dim() const { return z.empty() ? 0 : static_cast<int>(z.front().size()); }
};

struct FeatureExtractorSpec {
    enum class Kind { identity, temporal_smooth };
    Kind kind = Kind::identity;
    int smooth_radius = 0;  // temporal_smooth only

    void validate(int frames_per_video) const {
        if (smooth_radius < 0) throw ConfigError("smooth_radius", "must be >= 0");
        if (smooth_radius >= frames_per_video)
            throw ConfigError("smooth_radius", "must be < frames_per_video");
    }
};

// identity returns the raw frame features; temporal_smooth averages each
// frame with its neighbours within the radius (window clipped at the
// sequence ends).
SkimFeatures extract(const SyntheticVideo& video, const FeatureExtractorSpec& spec);

}  // namespace ocs
