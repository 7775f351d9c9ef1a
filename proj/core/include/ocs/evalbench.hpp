#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ocs/budget.hpp"
#include "ocs/classifier.hpp"
#include "ocs/policy.hpp"
#include "ocs/types.hpp"

namespace ocs {

enum class StrategyKind {
    learned,           // top-N of the trained policy
    learned_adaptive,  // budget head picks N, then the policy (ignores the N argument)
    random,            // N distinct uniform indices
    uniform,           // evenly spaced: round(t*(T-1)/(N-1))
    frameexit_order,   // first N of the sparse-to-dense bisection order
    fixed_length       // N consecutive frames (random or centered window)
};

std::string strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);

struct Strategy {
    StrategyKind kind = StrategyKind::uniform;
    bool centered_window = false;  // fixed_length: center instead of drawing the start
};

struct StrategyModels {
    const PolicyParams* policy = nullptr;
    const BudgetHead* budget = nullptr;
    const FeatureExtractorSpec* extractor = nullptr;
    const ClipClassifier* classifier = nullptr;  // learned_adaptive prediction path
};

// Frame selection under one strategy. Deterministic for every kind except
// random and fixed_length with a drawn window.
ClipSelection select(const Strategy& strategy, const SyntheticVideo& video, int n,
                     const StrategyModels& models, RngStream& rng);

// Sparse-to-dense decode order: global midpoint, both endpoints, then
// breadth-first midpoints of the halves.
std::vector<int> bisection_order(int frame_count);

struct EvalRow {
    std::string strategy;
    int clip_frames = 0;  // requested N (adaptive reports its own mean in mean_frames)
    double accuracy = 0.0;
    double mean_frames = 0.0;
    double mean_cost = 0.0;
    double salient_recall = 0.0;
    std::vector<std::uint64_t> selection_histogram;  // videos by #selected frames in the salient set
};

struct EvalReport {
    std::vector<EvalRow> rows;
};

// Strategy x N grid over the dataset. Deterministic given the seed and
// invariant to dataset ordering (per-video streams are keyed by id and the
// reduction runs in id order).
EvalReport evaluate(std::span<const SyntheticVideo> videos, std::span<const Strategy> strategies,
                    std::span<const int> n_list, const StrategyModels& models,
                    const CostModel& cost_model, std::uint64_t seed);

// Accuracy of classifier B on preselected clips versus B on uniform
// selections of the same size. Selections must cover every video.
EvalReport transfer_selections(std::span<const SyntheticVideo> videos,
                               const std::map<std::uint64_t, std::vector<int>>& selections,
                               const ClipClassifier& classifier_b,
                               const FeatureExtractorSpec& extractor, const CostModel& cost_model);

struct SweepCell {
    double epsilon = 0.0;
    double alpha = 0.0;
    double mean_frames = 0.0;
    double accuracy = 0.0;
    bool valid = false;
    std::string error;
};

// Trains a budget head per (epsilon, alpha) cell on the training set, then
// measures adaptive inference on the evaluation set.
std::vector<SweepCell> sweep_budget(std::span<const SyntheticVideo> train_videos,
                                    std::span<const SyntheticVideo> eval_videos,
                                    const FeatureExtractorSpec& extractor,
                                    const ClipClassifier& classifier, const PolicyParams& policy,
                                    const BudgetConfig& base_config,
                                    std::span<const double> epsilons,
                                    std::span<const double> alphas);

struct ReportMeta {
    std::string config_hash = "none";
    std::uint64_t run_seed = 0;
};

void write_report_csv(const std::filesystem::path& path, const EvalReport& report,
                      const ReportMeta& meta);
void write_report_json(const std::filesystem::path& path, const EvalReport& report,
                       const ReportMeta& meta);
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepCell> cells,
                     const ReportMeta& meta);

// `video_id:idx,idx,...`, one line per video, id order.
void write_selections(const std::filesystem::path& path,
                      const std::map<std::uint64_t, std::vector<int>>& selections,
                      const ReportMeta& meta);
std::map<std::uint64_t, std::vector<int>> read_selections(const std::filesystem::path& path);

}  // namespace ocs
