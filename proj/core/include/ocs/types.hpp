#pragma once

#include <cstdint>
#include <vector>

#include "ocs/error.hpp"

namespace ocs {

// A T-frame record standing in for a decoded video: per-frame feature
// vectors, a class label, and the planted set of frames that carry the
// class signal. Regenerable bit-for-bit from gen_seed.
struct SyntheticVideo {
    std::uint64_t id = 0;
    int label = 0;
    std::vector<std::vector<double>> frames;  // T vectors of dimension D
    std::vector<int> salient_set;             // sorted, nonempty, indices in [0, T)
    std::uint64_t gen_seed = 0;

    int frame_count() const { return static_cast<int>(frames.size()); }
    int feature_dim() const { return frames.empty() ? 0 : static_cast<int>(frames.front().size()); }
};

struct DatasetSpec {
    int num_videos = 0;
    int frames_per_video = 10;  // T
    int num_classes = 4;        // C
    int feature_dim = 8;        // D
    int salient_min = 1;
    int salient_max = 1;
    double signal_strength = 1.0;
    double noise_sigma = 1.0;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (num_videos < 0) throw ConfigError("num_videos", "must be >= 0");
        if (frames_per_video < 2) throw ConfigError("frames_per_video", "must be >= 2");
        if (num_classes < 2) throw ConfigError("num_classes", "must be >= 2");
        if (feature_dim < 1) throw ConfigError("feature_dim", "must be >= 1");
        if (salient_min < 1 || salient_min > salient_max)
            throw ConfigError("salient_min", "requires 1 <= salient_min <= salient_max");
        if (salient_max > frames_per_video)
            throw ConfigError("salient_max", "must be <= frames_per_video");
        if (signal_strength < 0) throw ConfigError("signal_strength", "must be >= 0");
        if (noise_sigma < 0) throw ConfigError("noise_sigma", "must be >= 0");
    }
};

// Abstract per-frame compute costs: every candidate frame pays the skim
// rate, every selected frame additionally pays the classifier rate.
struct CostModel {
    double skim_cost = 1.0;
    double classifier_cost = 10.0;

    void validate() const {
        if (skim_cost <= 0) throw ConfigError("skim_cost", "must be > 0");
        if (classifier_cost <= 0) throw ConfigError("classifier_cost", "must be > 0");
    }
};

inline double clip_cost(int total_frames, int selected_frames, const CostModel& model) {
    if (selected_frames < 0 || selected_frames > total_frames)
        throw DomainError("selected_frames", "requires 0 <= N <= T");
    return static_cast<double>(total_frames) * model.skim_cost +
           static_cast<double>(selected_frames) * model.classifier_cost;
}

}  // namespace ocs
