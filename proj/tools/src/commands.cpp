#include "commands.hpp"

#include <cstdio>
#include <memory>
#include <sstream>

#include "ocs/checkpoint.hpp"
#include "ocs/dataset.hpp"
#include "ocs/error.hpp"
#include "ocs/evalbench.hpp"
#include "ocs/selfcheck.hpp"
#include "ocs/textio.hpp"

namespace ocs::cli {

namespace {

constexpr const char* kTrainDataset = "dataset_train.tsv";
constexpr const char* kEvalDataset = "dataset_eval.tsv";
constexpr const char* kClassifierCkpt = "classifier.ckpt";
constexpr const char* kStage1Log = "stage1_log.csv";
constexpr const char* kPolicyCkpt = "policy.ckpt";
constexpr const char* kPolicyLog = "policy_log.csv";
constexpr const char* kBudgetCkpt = "budget.ckpt";
constexpr const char* kBudgetLabels = "budget_labels.csv";

void check_hash(const std::string& artifact, const std::string& recorded, const RunConfig& cfg,
                bool allow_mismatch) {
    if (recorded != cfg.hash && !allow_mismatch)
        throw HashMismatchError(artifact, "artifact was produced under config " + recorded +
                                              ", current is " + cfg.hash +
                                              " (pass --allow-mismatch to proceed)");
}

LoadedDataset load_dataset_checked(const RunConfig& cfg, const char* name, bool allow_mismatch) {
    auto path = cfg.out(name);
    if (!std::filesystem::exists(path))
        throw MissingModelError("dataset", "missing " + path.string() + "; run gen-data first");
    LoadedDataset loaded = load_dataset(path);
    check_hash(name, loaded.meta.config_hash, cfg, allow_mismatch);
    return loaded;
}

LinearClassifier classifier_from_ckpt(const Checkpoint& ckpt) {
    if (ckpt.kind != "classifier")
        throw IoError("checkpoint", "expected kind=classifier, found " + ckpt.kind);
    LinearClassifier model;
    model.num_classes = ckpt.rows;
    model.feature_dim = ckpt.cols - 1;
    model.weights.reserve(static_cast<std::size_t>(model.num_classes * model.feature_dim));
    model.bias.reserve(static_cast<std::size_t>(model.num_classes));
    for (int r = 0; r < ckpt.rows; ++r) {
        for (int c = 0; c + 1 < ckpt.cols; ++c)
            model.weights.push_back(ckpt.values[static_cast<std::size_t>(r * ckpt.cols + c)]);
        model.bias.push_back(ckpt.values[static_cast<std::size_t>(r * ckpt.cols + ckpt.cols - 1)]);
    }
    return model;
}

PolicyParams policy_from_ckpt(const Checkpoint& ckpt) {
    if (ckpt.kind != "policy")
        throw IoError("checkpoint", "expected kind=policy, found " + ckpt.kind);
    PolicyParams params;
    params.weights.assign(ckpt.values.begin(), ckpt.values.end() - 1);
    params.bias = ckpt.values.back();
    return params;
}

BudgetHead budget_from_ckpt(const Checkpoint& ckpt) {
    if (ckpt.kind != "budget")
        throw IoError("checkpoint", "expected kind=budget, found " + ckpt.kind);
    BudgetHead head = BudgetHead::zeros(std::stoi(ckpt.extra.at("dim")),
                                        std::stoi(ckpt.extra.at("frames")),
                                        std::stoi(ckpt.extra.at("hidden")));
    head.unflatten(ckpt.values);
    return head;
}

std::unique_ptr<ClipClassifier> resolve_classifier(const RunConfig& cfg, bool allow_mismatch) {
    if (cfg.classifier_kind == "coverage_oracle")
        return std::make_unique<CoverageOracle>(cfg.oracle, cfg.dataset.num_classes);
    auto path = cfg.out(kClassifierCkpt);
    if (!std::filesystem::exists(path))
        throw MissingModelError("classifier",
                                "missing " + path.string() + "; run train-stage1 first");
    Checkpoint ckpt = load_checkpoint(path);
    if (auto it = ckpt.extra.find("config_hash"); it != ckpt.extra.end())
        check_hash(kClassifierCkpt, it->second, cfg, allow_mismatch);
    return std::make_unique<LinearSoftmaxClassifier>(classifier_from_ckpt(ckpt));
}

PolicyParams load_policy_checked(const RunConfig& cfg, bool allow_mismatch) {
    auto path = cfg.out(kPolicyCkpt);
    if (!std::filesystem::exists(path))
        throw MissingModelError("policy", "missing " + path.string() + "; run train-policy first");
    Checkpoint ckpt = load_checkpoint(path);
    if (auto it = ckpt.extra.find("config_hash"); it != ckpt.extra.end())
        check_hash(kPolicyCkpt, it->second, cfg, allow_mismatch);
    return policy_from_ckpt(ckpt);
}

BudgetHead load_budget_checked(const RunConfig& cfg, bool allow_mismatch) {
    auto path = cfg.out(kBudgetCkpt);
    if (!std::filesystem::exists(path))
        throw MissingModelError("budget", "missing " + path.string() + "; run train-budget first");
    Checkpoint ckpt = load_checkpoint(path);
    if (auto it = ckpt.extra.find("config_hash"); it != ckpt.extra.end())
        check_hash(kBudgetCkpt, it->second, cfg, allow_mismatch);
    return budget_from_ckpt(ckpt);
}

DatasetSpec eval_spec(const RunConfig& cfg) {
    DatasetSpec spec = cfg.dataset;
    spec.num_videos = cfg.eval_videos;
    spec.master_seed = mix64(mix64(cfg.dataset.master_seed) ^ hash_purpose("eval_dataset"));
    return spec;
}

std::string csv_meta_line(const RunConfig& cfg) {
    return "# config_hash=" + cfg.hash + " seed=" + std::to_string(cfg.seed) + "\n";
}

}  // namespace

int cmd_gen_data(const RunConfig& cfg) {
    DatasetFileMeta meta{cfg.hash, cfg.seed};
    auto train = generate_dataset(cfg.dataset);
    save_dataset(cfg.out(kTrainDataset), cfg.dataset, train, cfg.dataset_full_precision, meta);

    DatasetSpec espec = eval_spec(cfg);
    auto eval = generate_dataset(espec);
    save_dataset(cfg.out(kEvalDataset), espec, eval, cfg.dataset_full_precision, meta);

    std::printf("wrote %s (%zu videos) and %s (%zu videos)\n",
                cfg.out(kTrainDataset).string().c_str(), train.size(),
                cfg.out(kEvalDataset).string().c_str(), eval.size());
    return 0;
}

int cmd_train_stage1(const RunConfig& cfg, bool allow_mismatch) {
    LoadedDataset data = load_dataset_checked(cfg, kTrainDataset, allow_mismatch);
    Stage1Config config = cfg.stage1;
    config.num_classes = data.spec.num_classes;
    Stage1Result result = train_classifier(data.videos, cfg.extractor, config);

    Checkpoint ckpt;
    ckpt.kind = "classifier";
    ckpt.rows = result.model.num_classes;
    ckpt.cols = result.model.feature_dim + 1;
    ckpt.seed = config.seed;
    ckpt.extra["config_hash"] = cfg.hash;
    for (int r = 0; r < ckpt.rows; ++r) {
        for (int c = 0; c + 1 < ckpt.cols; ++c)
            ckpt.values.push_back(result.model.weight(r, c));
        ckpt.values.push_back(result.model.bias[static_cast<std::size_t>(r)]);
    }
    save_checkpoint(cfg.out(kClassifierCkpt), ckpt);

    std::ostringstream log;
    log << csv_meta_line(cfg) << "epoch,loss\n";
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
        log << e << ',' << fmt17(result.epoch_loss[e]) << "\n";
    atomic_write_text(cfg.out(kStage1Log), log.str());

    std::printf("wrote %s and %s\n", cfg.out(kClassifierCkpt).string().c_str(),
                cfg.out(kStage1Log).string().c_str());
    return 0;
}

int cmd_train_policy(const RunConfig& cfg, bool allow_mismatch) {
    LoadedDataset data = load_dataset_checked(cfg, kTrainDataset, allow_mismatch);
    auto classifier = resolve_classifier(cfg, allow_mismatch);

    PolicyParams init = PolicyParams::zeros(data.spec.feature_dim);
    Stage2Result result =
        stage2_train(data.videos, cfg.extractor, *classifier, std::move(init), cfg.stage2);

    Checkpoint ckpt;
    ckpt.kind = "policy";
    ckpt.rows = 1;
    ckpt.cols = static_cast<int>(result.params.weights.size()) + 1;
    ckpt.seed = cfg.stage2.seed;
    ckpt.extra["config_hash"] = cfg.hash;
    ckpt.values = result.params.weights;
    ckpt.values.push_back(result.params.bias);
    save_checkpoint(cfg.out(kPolicyCkpt), ckpt);

    std::ostringstream log;
    log << csv_meta_line(cfg) << "epoch,mean_reward,mean_confidence,grad_norm\n";
    for (const auto& entry : result.log)
        log << entry.epoch << ',' << fmt17(entry.mean_reward) << ','
            << fmt17(entry.mean_confidence) << ',' << fmt17(entry.grad_norm) << "\n";
    atomic_write_text(cfg.out(kPolicyLog), log.str());

    std::printf("wrote %s and %s\n", cfg.out(kPolicyCkpt).string().c_str(),
                cfg.out(kPolicyLog).string().c_str());
    return 0;
}

int cmd_train_budget(const RunConfig& cfg, bool allow_mismatch) {
    LoadedDataset data = load_dataset_checked(cfg, kTrainDataset, allow_mismatch);
    auto classifier = resolve_classifier(cfg, allow_mismatch);

    BudgetTrainResult result = train_budget(data.videos, cfg.extractor, *classifier, cfg.budget);

    Checkpoint ckpt;
    ckpt.kind = "budget";
    ckpt.rows = 1;
    ckpt.cols = static_cast<int>(result.head.param_count());
    ckpt.seed = cfg.budget.seed;
    ckpt.extra["config_hash"] = cfg.hash;
    ckpt.extra["dim"] = std::to_string(result.head.feature_dim);
    ckpt.extra["frames"] = std::to_string(result.head.frame_count);
    ckpt.extra["hidden"] = std::to_string(result.head.hidden);
    ckpt.values = result.head.flatten();
    save_checkpoint(cfg.out(kBudgetCkpt), ckpt);

    int t_count = data.spec.frames_per_video;
    std::ostringstream labels;
    labels << csv_meta_line(cfg) << "video_id,k";
    for (int m = 1; m <= t_count; ++m) labels << ",r_" << m;
    for (int m = 1; m <= t_count; ++m) labels << ",yB_" << m;
    labels << "\n";
    for (std::size_t i = 0; i < data.videos.size(); ++i) {
        const BudgetLabel& label = result.labels[i];
        labels << data.videos[i].id << ',' << label.min_budget;
        for (double r : label.ratios) labels << ',' << fmt17(r);
        for (double y : label.label) labels << ',' << fmt17(y);
        labels << "\n";
    }
    atomic_write_text(cfg.out(kBudgetLabels), labels.str());

    std::printf("wrote %s and %s\n", cfg.out(kBudgetCkpt).string().c_str(),
                cfg.out(kBudgetLabels).string().c_str());
    return 0;
}

int cmd_eval(const RunConfig& cfg, bool allow_mismatch) {
    LoadedDataset eval_data = load_dataset_checked(cfg, kEvalDataset, allow_mismatch);
    auto classifier = resolve_classifier(cfg, allow_mismatch);

    bool needs_policy = false;
    bool needs_budget = false;
    std::vector<Strategy> strategies;
    for (const auto& name : cfg.eval_strategies) {
        Strategy s;
        s.kind = strategy_from_name(name);
        if (s.kind == StrategyKind::learned || s.kind == StrategyKind::learned_adaptive)
            needs_policy = true;
        if (s.kind == StrategyKind::learned_adaptive) needs_budget = true;
        strategies.push_back(s);
    }

    PolicyParams policy;
    BudgetHead budget;
    StrategyModels models;
    models.extractor = &cfg.extractor;
    models.classifier = classifier.get();
    if (needs_policy) {
        policy = load_policy_checked(cfg, allow_mismatch);
        models.policy = &policy;
    }
    if (needs_budget) {
        budget = load_budget_checked(cfg, allow_mismatch);
        models.budget = &budget;
    }

    std::uint64_t eval_seed = mix64(mix64(cfg.seed) ^ hash_purpose("eval"));
    EvalReport report = evaluate(eval_data.videos, strategies, cfg.eval_n_list, models,
                                 cfg.cost_model, eval_seed);

    if (cfg.transfer_gamma > 0.0) {
        if (!models.policy) {
            policy = load_policy_checked(cfg, allow_mismatch);
            models.policy = &policy;
        }
        std::map<std::uint64_t, std::vector<int>> selections;
        for (const auto& video : eval_data.videos)
            selections[video.id] =
                top_n(policy_forward(policy, extract(video, cfg.extractor)), cfg.stage2.clip_frames)
                    .indices;
        CoverageOracleSpec transfer_spec = cfg.oracle;
        transfer_spec.gamma = cfg.transfer_gamma;
        CoverageOracle transfer_oracle(transfer_spec, eval_data.spec.num_classes);
        EvalReport transfer = transfer_selections(eval_data.videos, selections, transfer_oracle,
                                                  cfg.extractor, cfg.cost_model);
        for (auto& row : transfer.rows) report.rows.push_back(std::move(row));
    }

    ReportMeta meta{cfg.hash, cfg.seed};
    write_report_csv(cfg.out("eval_report.csv"), report, meta);
    write_report_json(cfg.out("eval_report.json"), report, meta);

    if (cfg.export_selections && models.policy) {
        for (int n : cfg.eval_n_list) {
            std::map<std::uint64_t, std::vector<int>> selections;
            for (const auto& video : eval_data.videos)
                selections[video.id] =
                    top_n(policy_forward(*models.policy, extract(video, cfg.extractor)), n).indices;
            write_selections(cfg.out("selections_learned_n" + std::to_string(n) + ".txt"),
                             selections, meta);
        }
    }

    std::printf("wrote %s and %s\n", cfg.out("eval_report.csv").string().c_str(),
                cfg.out("eval_report.json").string().c_str());
    return 0;
}

int cmd_sweep(const RunConfig& cfg, bool allow_mismatch) {
    LoadedDataset train_data = load_dataset_checked(cfg, kTrainDataset, allow_mismatch);
    LoadedDataset eval_data = load_dataset_checked(cfg, kEvalDataset, allow_mismatch);
    auto classifier = resolve_classifier(cfg, allow_mismatch);
    PolicyParams policy = load_policy_checked(cfg, allow_mismatch);

    std::vector<SweepCell> cells =
        sweep_budget(train_data.videos, eval_data.videos, cfg.extractor, *classifier, policy,
                     cfg.budget, cfg.sweep_epsilons, cfg.sweep_alphas);

    write_sweep_csv(cfg.out("sweep.csv"), cells, ReportMeta{cfg.hash, cfg.seed});
    bool all_valid = true;
    for (const auto& cell : cells)
        if (!cell.valid) {
            all_valid = false;
            std::fprintf(stderr, "invalid cell epsilon=%g alpha=%g: %s\n", cell.epsilon,
                         cell.alpha, cell.error.c_str());
        }
    std::printf("wrote %s\n", cfg.out("sweep.csv").string().c_str());
    return all_valid ? 0 : 1;
}

int cmd_check(const RunConfig& cfg) {
    std::vector<CheckResult> results = run_selfchecks(cfg.seed);
    std::ostringstream out;
    out << csv_meta_line(cfg);
    bool all_passed = true;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        all_passed &= r.passed;
    }
    atomic_write_text(cfg.out("check_report.txt"), out.str());
    std::fputs(out.str().c_str(), stdout);
    return all_passed ? 0 : 1;
}

}  // namespace ocs::cli
