#include "ocs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ocs/mathutil.hpp"
#include "ocs/textio.hpp"

namespace ocs {

namespace {

std::uint64_t video_gen_seed(std::uint64_t master_seed, std::uint64_t index) {
    return mix64(mix64(master_seed) ^ mix64(hash_purpose("video") + mix64(index)));
}

}  // namespace

std::vector<double> class_embedding(int label, std::uint64_t master_seed, int dim) {
    RngStream rng = RngStream(master_seed).derive("class_embedding", static_cast<std::uint64_t>(label));
    std::vector<double> e(static_cast<std::size_t>(dim));
    double norm = 0.0;
    do {
        for (double& v : e) v = rng.normal();
        norm = l2_norm(e);
    } while (norm == 0.0);
    for (double& v : e) v /= norm;
    return e;
}

SyntheticVideo generate_video(const DatasetSpec& spec, std::uint64_t id, std::uint64_t gen_seed) {
    RngStream rng(gen_seed);
    SyntheticVideo video;
    video.id = id;
    video.gen_seed = gen_seed;
    video.label = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.num_classes)));

    int count = spec.salient_min +
                static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.salient_max - spec.salient_min + 1)));
    video.salient_set = rng.sample_distinct(count, spec.frames_per_video);
    std::sort(video.salient_set.begin(), video.salient_set.end());

    std::vector<double> embedding = class_embedding(video.label, spec.master_seed, spec.feature_dim);
    video.frames.assign(static_cast<std::size_t>(spec.frames_per_video),
                        std::vector<double>(static_cast<std::size_t>(spec.feature_dim)));
    for (int t = 0; t < spec.frames_per_video; ++t) {
        bool salient = std::binary_search(video.salient_set.begin(), video.salient_set.end(), t);
        auto& frame = video.frames[static_cast<std::size_t>(t)];
        for (int d = 0; d < spec.feature_dim; ++d) {
            double base = salient ? spec.signal_strength * embedding[static_cast<std::size_t>(d)] : 0.0;
            frame[static_cast<std::size_t>(d)] = base + rng.normal(0.0, spec.noise_sigma);
        }
    }
    return video;
}

std::vector<SyntheticVideo> generate_dataset(const DatasetSpec& spec) {
    spec.validate();
    std::vector<SyntheticVideo> videos;
    videos.reserve(static_cast<std::size_t>(spec.num_videos));
    for (int i = 0; i < spec.num_videos; ++i) {
        std::uint64_t index = static_cast<std::uint64_t>(i);
        videos.push_back(generate_video(spec, index, video_gen_seed(spec.master_seed, index)));
    }
    return videos;
}

void save_dataset(const std::filesystem::path& path, const DatasetSpec& spec,
                  const std::vector<SyntheticVideo>& videos, bool full_precision,
                  const DatasetFileMeta& meta) {
    std::ostringstream out;
    out << "# ocs-dataset v1"
        << " num_videos=" << videos.size()
        << " T=" << spec.frames_per_video
        << " C=" << spec.num_classes
        << " D=" << spec.feature_dim
        << " salient_min=" << spec.salient_min
        << " salient_max=" << spec.salient_max
        << " signal=" << fmt17(spec.signal_strength)
        << " noise=" << fmt17(spec.noise_sigma)
        << " master_seed=" << spec.master_seed
        << " features=" << (full_precision ? "inline" : "seed")
        << " config_hash=" << meta.config_hash
        << " seed=" << meta.run_seed << "\n";
    for (const auto& v : videos) {
        out << v.id << '\t' << v.label << '\t' << v.frame_count() << '\t' << v.feature_dim()
            << '\t' << "salient:";
        for (std::size_t i = 0; i < v.salient_set.size(); ++i) {
            if (i) out << ',';
            out << v.salient_set[i];
        }
        out << '\t' << v.gen_seed;
        if (full_precision) {
            out << '\t' << "features:";
            bool first = true;
            for (const auto& frame : v.frames)
                for (double x : frame) {
                    if (!first) out << ' ';
                    out << fmt17(x);
                    first = false;
                }
        }
        out << '\n';
    }
    atomic_write_text(path, out.str());
}

namespace {

std::string header_value(const std::string& header, const std::string& key,
                         const std::filesystem::path& path) {
    std::string token = " " + key + "=";
    auto pos = header.find(token);
    if (pos == std::string::npos)
        throw IoError("dataset", "missing header key '" + key + "' in " + path.string());
    pos += token.size();
    auto end = header.find(' ', pos);
    return header.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

}  // namespace

LoadedDataset load_dataset(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::string header;
    if (!std::getline(in, header) || header.rfind("# ocs-dataset v1", 0) != 0)
        throw IoError("dataset", "not an ocs-dataset v1 file: " + path.string());

    LoadedDataset loaded;
    DatasetSpec& spec = loaded.spec;
    spec.num_videos = std::stoi(header_value(header, "num_videos", path));
    spec.frames_per_video = std::stoi(header_value(header, "T", path));
    spec.num_classes = std::stoi(header_value(header, "C", path));
    spec.feature_dim = std::stoi(header_value(header, "D", path));
    spec.salient_min = std::stoi(header_value(header, "salient_min", path));
    spec.salient_max = std::stoi(header_value(header, "salient_max", path));
    spec.signal_strength = std::strtod(header_value(header, "signal", path).c_str(), nullptr);
    spec.noise_sigma = std::strtod(header_value(header, "noise", path).c_str(), nullptr);
    spec.master_seed = std::stoull(header_value(header, "master_seed", path));
    loaded.full_precision = header_value(header, "features", path) == "inline";
    loaded.meta.config_hash = header_value(header, "config_hash", path);
    loaded.meta.run_seed = std::stoull(header_value(header, "seed", path));
    spec.validate();

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id_s, label_s, t_s, d_s, salient_s, seed_s;
        if (!std::getline(ls, id_s, '\t') || !std::getline(ls, label_s, '\t') ||
            !std::getline(ls, t_s, '\t') || !std::getline(ls, d_s, '\t') ||
            !std::getline(ls, salient_s, '\t') || !std::getline(ls, seed_s, '\t'))
            throw IoError("dataset", "malformed record in " + path.string());

        std::uint64_t id = std::stoull(id_s);
        int label = std::stoi(label_s);
        int t = std::stoi(t_s);
        int d = std::stoi(d_s);
        if (t != spec.frames_per_video || d != spec.feature_dim)
            throw IoError("dataset", "record dimensions disagree with header in " + path.string());
        if (salient_s.rfind("salient:", 0) != 0)
            throw IoError("dataset", "malformed salient field in " + path.string());

        std::vector<int> salient;
        {
            std::istringstream ss(salient_s.substr(8));
            std::string tok;
            while (std::getline(ss, tok, ',')) salient.push_back(std::stoi(tok));
        }
        std::uint64_t gen_seed = std::stoull(seed_s);

        SyntheticVideo video;
        if (loaded.full_precision) {
            std::string feats_s;
            if (!std::getline(ls, feats_s, '\t') || feats_s.rfind("features:", 0) != 0)
                throw IoError("dataset", "missing features field in " + path.string());
            video.id = id;
            video.label = label;
            video.gen_seed = gen_seed;
            video.salient_set = salient;
            video.frames.assign(static_cast<std::size_t>(t),
                                std::vector<double>(static_cast<std::size_t>(d)));
            std::istringstream fs(feats_s.substr(9));
            for (auto& frame : video.frames)
                for (double& x : frame)
                    if (!(fs >> x)) throw IoError("dataset", "short features field in " + path.string());
        } else {
            video = generate_video(spec, id, gen_seed);
            if (video.label != label || video.salient_set != salient)
                throw IoError("dataset",
                              "record does not regenerate from its seed (wrong generator parameters?) in " +
                                  path.string());
        }
        loaded.videos.push_back(std::move(video));
    }
    return loaded;
}

}  // namespace ocs
