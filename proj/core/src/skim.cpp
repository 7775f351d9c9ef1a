#include "ocs/skim.hpp"

#include <algorithm>

namespace ocs {

SkimFeatures extract(const SyntheticVideo& video, const FeatureExtractorSpec& spec) {
    spec.validate(video.frame_count());
    SkimFeatures out;
    out.source_video_id = video.id;

    if (spec.kind == FeatureExtractorSpec::Kind::identity || spec.smooth_radius == 0) {
        out.z = video.frames;
        return out;
    }

    int t_count = video.frame_count();
    int dim = video.feature_dim();
    out.z.assign(static_cast<std::size_t>(t_count), std::vector<double>(static_cast<std::size_t>(dim), 0.0));
    for (int t = 0; t < t_count; ++t) {
        int lo = std::max(0, t - spec.smooth_radius);
        int hi = std::min(t_count - 1, t + spec.smooth_radius);
        auto& dst = out.z[static_cast<std::size_t>(t)];
        for (int s = lo; s <= hi; ++s) {
            const auto& src = video.frames[static_cast<std::size_t>(s)];
            for (int d = 0; d < dim; ++d) dst[static_cast<std::size_t>(d)] += src[static_cast<std::size_t>(d)];
        }
        double inv = 1.0 / static_cast<double>(hi - lo + 1);
        for (double& v : dst) v *= inv;
    }
    return out;
}

}  // namespace ocs
