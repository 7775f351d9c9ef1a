#include "ocs/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "ocs/mathutil.hpp"
#include "ocs/textio.hpp"

#include <nlohmann/json.hpp>

namespace ocs {

std::string strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::learned: return "learned";
        case StrategyKind::learned_adaptive: return "learned_adaptive";
        case StrategyKind::random: return "random";
        case StrategyKind::uniform: return "uniform";
        case StrategyKind::frameexit_order: return "frameexit_order";
        case StrategyKind::fixed_length: return "fixed_length";
    }
    throw ConfigError("strategy", "unknown strategy kind");
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "learned") return StrategyKind::learned;
    if (name == "learned_adaptive") return StrategyKind::learned_adaptive;
    if (name == "random") return StrategyKind::random;
    if (name == "uniform") return StrategyKind::uniform;
    if (name == "frameexit_order") return StrategyKind::frameexit_order;
    if (name == "fixed_length") return StrategyKind::fixed_length;
    throw ConfigError("strategy", "unknown strategy name: " + name);
}

std::vector<int> bisection_order(int frame_count) {
    std::vector<int> order;
    std::vector<char> emitted(static_cast<std::size_t>(frame_count), 0);
    auto emit = [&](int idx) {
        if (!emitted[static_cast<std::size_t>(idx)]) {
            emitted[static_cast<std::size_t>(idx)] = 1;
            order.push_back(idx);
        }
    };
    int lo = 0;
    int hi = frame_count - 1;
    emit((lo + hi) / 2);
    emit(lo);
    emit(hi);
    std::deque<std::pair<int, int>> intervals{{lo, (lo + hi) / 2}, {(lo + hi) / 2, hi}};
    while (!intervals.empty() && static_cast<int>(order.size()) < frame_count) {
        auto [a, b] = intervals.front();
        intervals.pop_front();
        if (b - a < 2) continue;
        int mid = (a + b) / 2;
        emit(mid);
        intervals.emplace_back(a, mid);
        intervals.emplace_back(mid, b);
    }
    return order;
}

namespace {

ClipSelection uniform_selection(int t_count, int n) {
    ClipSelection clip;
    if (n == 1) {
        clip.indices.push_back((t_count - 1) / 2);  // middle frame
        return clip;
    }
    int prev = -1;
    for (int i = 0; i < n; ++i) {
        int idx = static_cast<int>(
            std::llround(static_cast<double>(i) * static_cast<double>(t_count - 1) /
                         static_cast<double>(n - 1)));
        if (idx <= prev) idx = prev + 1;  // dedup by shifting right
        clip.indices.push_back(idx);
        prev = idx;
    }
    return clip;
}

}  // namespace

ClipSelection select(const Strategy& strategy, const SyntheticVideo& video, int n,
                     const StrategyModels& models, RngStream& rng) {
    int t_count = video.frame_count();
    if (strategy.kind != StrategyKind::learned_adaptive && (n < 1 || n > t_count))
        throw DomainError("n", "requires 1 <= N <= T");

    switch (strategy.kind) {
        case StrategyKind::uniform:
            return uniform_selection(t_count, n);
        case StrategyKind::random: {
            ClipSelection clip;
            clip.indices = rng.sample_distinct(n, t_count);
            std::sort(clip.indices.begin(), clip.indices.end());
            return clip;
        }
        case StrategyKind::frameexit_order: {
            std::vector<int> order = bisection_order(t_count);
            ClipSelection clip;
            clip.indices.assign(order.begin(), order.begin() + n);
            return clip;
        }
        case StrategyKind::fixed_length: {
            int max_start = t_count - n;
            int start = strategy.centered_window
                            ? max_start / 2
                            : static_cast<int>(rng.below(static_cast<std::uint64_t>(max_start + 1)));
            ClipSelection clip;
            for (int i = 0; i < n; ++i) clip.indices.push_back(start + i);
            return clip;
        }
        case StrategyKind::learned: {
            if (!models.policy || !models.extractor)
                throw MissingModelError("policy", "learned strategy needs a policy checkpoint");
            return top_n(policy_forward(*models.policy, extract(video, *models.extractor)), n);
        }
        case StrategyKind::learned_adaptive: {
            if (!models.policy || !models.budget || !models.extractor || !models.classifier)
                throw MissingModelError("budget",
                                        "learned_adaptive needs policy, budget and classifier");
            return adaptive_infer(video, *models.budget, *models.policy, *models.extractor,
                                  *models.classifier)
                .clip;
        }
    }
    throw ConfigError("strategy", "unknown strategy kind");
}

namespace {

struct RowAccumulator {
    double correct = 0.0;
    double frames = 0.0;
    double cost = 0.0;
    double recall = 0.0;
    std::vector<std::uint64_t> histogram;
};

int salient_overlap(const SyntheticVideo& video, std::span<const int> clip) {
    int hits = 0;
    for (int t : clip)
        if (std::binary_search(video.salient_set.begin(), video.salient_set.end(), t)) ++hits;
    return hits;
}

}  // namespace

EvalReport evaluate(std::span<const SyntheticVideo> videos, std::span<const Strategy> strategies,
                    std::span<const int> n_list, const StrategyModels& models,
                    const CostModel& cost_model, std::uint64_t seed) {
    if (!models.classifier) throw MissingModelError("classifier", "evaluate needs a classifier");
    if (!models.extractor) throw MissingModelError("extractor", "evaluate needs an extractor spec");
    cost_model.validate();

    // id order makes the reduction independent of dataset ordering
    std::vector<std::size_t> by_id(videos.size());
    std::iota(by_id.begin(), by_id.end(), 0);
    std::sort(by_id.begin(), by_id.end(),
              [&](std::size_t a, std::size_t b) { return videos[a].id < videos[b].id; });

    RngStream root = RngStream(seed).derive("evaluate");
    EvalReport report;
    for (const Strategy& strategy : strategies) {
        for (int n : n_list) {
            RowAccumulator acc;
            acc.histogram.assign(static_cast<std::size_t>(
                                     strategy.kind == StrategyKind::learned_adaptive
                                         ? (videos.empty() ? 1 : videos[0].frame_count() + 1)
                                         : n + 1),
                                 0);
            for (std::size_t i : by_id) {
                const auto& video = videos[i];
                RngStream video_rng =
                    root.derive(strategy_name(strategy.kind), video.id).derive("n", static_cast<std::uint64_t>(n));
                ClipSelection clip = select(strategy, video, n, models, video_rng);
                SkimFeatures feats = extract(video, *models.extractor);
                ClassProbs probs = models.classifier->predict(video, feats, clip.indices);

                int hits = salient_overlap(video, clip.indices);
                acc.correct += is_correct(probs, video.label) ? 1.0 : 0.0;
                acc.frames += static_cast<double>(clip.size());
                acc.cost += clip_cost(video.frame_count(), clip.size(), cost_model);
                acc.recall += static_cast<double>(hits) /
                              static_cast<double>(video.salient_set.size());
                if (static_cast<std::size_t>(hits) >= acc.histogram.size())
                    acc.histogram.resize(static_cast<std::size_t>(hits) + 1, 0);
                ++acc.histogram[static_cast<std::size_t>(hits)];
            }

            EvalRow row;
            row.strategy = strategy_name(strategy.kind);
            // adaptive selection picks its own frame count; 0 marks that in reports
            row.clip_frames = strategy.kind == StrategyKind::learned_adaptive ? 0 : n;
            double count = videos.empty() ? 1.0 : static_cast<double>(videos.size());
            row.accuracy = acc.correct / count;
            row.mean_frames = acc.frames / count;
            row.mean_cost = acc.cost / count;
            row.salient_recall = acc.recall / count;
            row.selection_histogram = std::move(acc.histogram);
            report.rows.push_back(std::move(row));

            if (strategy.kind == StrategyKind::learned_adaptive) break;  // N is ignored
        }
    }
    return report;
}

EvalReport transfer_selections(std::span<const SyntheticVideo> videos,
                               const std::map<std::uint64_t, std::vector<int>>& selections,
                               const ClipClassifier& classifier_b,
                               const FeatureExtractorSpec& extractor, const CostModel& cost_model) {
    std::vector<std::uint64_t> missing;
    for (const auto& v : videos)
        if (!selections.count(v.id)) missing.push_back(v.id);
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "selections missing for video ids:";
        for (std::uint64_t id : missing) msg << ' ' << id;
        throw DomainError("selections", msg.str());
    }

    EvalReport report;
    if (videos.empty()) return report;

    std::vector<std::size_t> by_id(videos.size());
    std::iota(by_id.begin(), by_id.end(), 0);
    std::sort(by_id.begin(), by_id.end(),
              [&](std::size_t a, std::size_t b) { return videos[a].id < videos[b].id; });

    RowAccumulator transfer_acc, uniform_acc;
    transfer_acc.histogram.assign(1, 0);
    uniform_acc.histogram.assign(1, 0);
    auto add = [&](RowAccumulator& acc, const SyntheticVideo& video, std::span<const int> clip) {
        SkimFeatures feats = extract(video, extractor);
        ClassProbs probs = classifier_b.predict(video, feats, clip);
        int hits = salient_overlap(video, clip);
        acc.correct += is_correct(probs, video.label) ? 1.0 : 0.0;
        acc.frames += static_cast<double>(clip.size());
        acc.cost += clip_cost(video.frame_count(), static_cast<int>(clip.size()), cost_model);
        acc.recall += static_cast<double>(hits) / static_cast<double>(video.salient_set.size());
        if (static_cast<std::size_t>(hits) >= acc.histogram.size())
            acc.histogram.resize(static_cast<std::size_t>(hits) + 1, 0);
        ++acc.histogram[static_cast<std::size_t>(hits)];
    };

    double mean_n = 0.0;
    for (std::size_t i : by_id) {
        const auto& video = videos[i];
        const auto& clip = selections.at(video.id);
        if (clip.empty()) throw DomainError("selections", "empty selection for a video");
        add(transfer_acc, video, clip);
        add(uniform_acc, video,
            uniform_selection(video.frame_count(), static_cast<int>(clip.size())).indices);
        mean_n += static_cast<double>(clip.size());
    }

    double count = static_cast<double>(videos.size());
    int n_rounded = static_cast<int>(std::llround(mean_n / count));
    auto finish = [&](const char* name, RowAccumulator& acc) {
        EvalRow row;
        row.strategy = name;
        row.clip_frames = n_rounded;
        row.accuracy = acc.correct / count;
        row.mean_frames = acc.frames / count;
        row.mean_cost = acc.cost / count;
        row.salient_recall = acc.recall / count;
        row.selection_histogram = std::move(acc.histogram);
        report.rows.push_back(std::move(row));
    };
    finish("transfer", transfer_acc);
    finish("transfer_uniform", uniform_acc);
    return report;
}

std::vector<SweepCell> sweep_budget(std::span<const SyntheticVideo> train_videos,
                                    std::span<const SyntheticVideo> eval_videos,
                                    const FeatureExtractorSpec& extractor,
                                    const ClipClassifier& classifier, const PolicyParams& policy,
                                    const BudgetConfig& base_config,
                                    std::span<const double> epsilons,
                                    std::span<const double> alphas) {
    std::vector<SweepCell> cells;
    for (double epsilon : epsilons) {
        for (double alpha : alphas) {
            SweepCell cell;
            cell.epsilon = epsilon;
            cell.alpha = alpha;
            try {
                BudgetConfig config = base_config;
                config.epsilon = epsilon;
                config.alpha = alpha;
                BudgetTrainResult trained =
                    train_budget(train_videos, extractor, classifier, config);

                double frames = 0.0;
                double correct = 0.0;
                for (const auto& video : eval_videos) {
                    AdaptiveResult r =
                        adaptive_infer(video, trained.head, policy, extractor, classifier);
                    frames += static_cast<double>(r.frames_used);
                    correct += is_correct(r.probs, video.label) ? 1.0 : 0.0;
                }
                double count = eval_videos.empty() ? 1.0 : static_cast<double>(eval_videos.size());
                cell.mean_frames = frames / count;
                cell.accuracy = correct / count;
                cell.valid = true;
            } catch (const Error& e) {
                cell.valid = false;
                cell.error = e.error_line();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report,
                      const ReportMeta& meta) {
    std::ostringstream out;
    out << "# config_hash=" << meta.config_hash << " seed=" << meta.run_seed << "\n";
    out << "strategy,N,accuracy,mean_frames,mean_cost,salient_recall\n";
    for (const auto& row : report.rows)
        out << row.strategy << ',' << row.clip_frames << ',' << fmt17(row.accuracy) << ','
            << fmt17(row.mean_frames) << ',' << fmt17(row.mean_cost) << ','
            << fmt17(row.salient_recall) << "\n";
    atomic_write_text(path, out.str());
}

void write_report_json(const std::filesystem::path& path, const EvalReport& report,
                       const ReportMeta& meta) {
    nlohmann::json doc;
    doc["config_hash"] = meta.config_hash;
    doc["seed"] = meta.run_seed;
    doc["rows"] = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json r;
        r["strategy"] = row.strategy;
        r["N"] = row.clip_frames;
        r["accuracy"] = row.accuracy;
        r["mean_frames"] = row.mean_frames;
        r["mean_cost"] = row.mean_cost;
        r["salient_recall"] = row.salient_recall;
        r["selection_histogram"] = row.selection_histogram;
        doc["rows"].push_back(std::move(r));
    }
    atomic_write_text(path, doc.dump(2) + "\n");
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepCell> cells,
                     const ReportMeta& meta) {
    std::ostringstream out;
    out << "# config_hash=" << meta.config_hash << " seed=" << meta.run_seed << "\n";
    out << "epsilon,alpha,mean_frames,accuracy,valid\n";
    for (const auto& cell : cells)
        out << fmt17(cell.epsilon) << ',' << fmt17(cell.alpha) << ',' << fmt17(cell.mean_frames)
            << ',' << fmt17(cell.accuracy) << ',' << (cell.valid ? 1 : 0) << "\n";
    atomic_write_text(path, out.str());
}

void write_selections(const std::filesystem::path& path,
                      const std::map<std::uint64_t, std::vector<int>>& selections,
                      const ReportMeta& meta) {
    std::ostringstream out;
    out << "# config_hash=" << meta.config_hash << " seed=" << meta.run_seed << "\n";
    for (const auto& [id, indices] : selections) {
        out << id << ':';
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (i) out << ',';
            out << indices[i];
        }
        out << "\n";
    }
    atomic_write_text(path, out.str());
}

std::map<std::uint64_t, std::vector<int>> read_selections(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::map<std::uint64_t, std::vector<int>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw IoError("selections", "malformed selection line in " + path.string());
        std::uint64_t id = std::stoull(line.substr(0, colon));
        std::vector<int> indices;
        std::istringstream ss(line.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) indices.push_back(std::stoi(tok));
        out[id] = std::move(indices);
    }
    return out;
}

}  // namespace ocs
