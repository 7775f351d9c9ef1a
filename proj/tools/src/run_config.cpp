#include "run_config.hpp"

#include <cstdio>
#include <fstream>

#include "ocs/error.hpp"
#include "ocs/evalbench.hpp"
#include "ocs/rng.hpp"
#include "ocs/textio.hpp"

namespace ocs::cli {

namespace {

using nlohmann::json;

FeatureExtractorSpec::Kind extractor_kind_from(const std::string& name) {
    if (name == "identity") return FeatureExtractorSpec::Kind::identity;
    if (name == "temporal_smooth") return FeatureExtractorSpec::Kind::temporal_smooth;
    throw ConfigError("extractor.kind", "unknown extractor kind: " + name);
}

std::string extractor_kind_name(FeatureExtractorSpec::Kind kind) {
    return kind == FeatureExtractorSpec::Kind::identity ? "identity" : "temporal_smooth";
}

RewardKind reward_kind_from(const std::string& name) {
    if (name == "clip") return RewardKind::clip;
    if (name == "frame") return RewardKind::frame;
    if (name == "vanilla") return RewardKind::vanilla;
    throw ConfigError("stage2.reward_kind", "unknown reward kind: " + name);
}

std::string reward_kind_name(RewardKind kind) {
    switch (kind) {
        case RewardKind::clip: return "clip";
        case RewardKind::frame: return "frame";
        case RewardKind::vanilla: return "vanilla";
    }
    return "clip";
}

ProbMode prob_mode_from(const std::string& name) {
    if (name == "exact") return ProbMode::exact;
    if (name == "monte_carlo") return ProbMode::monte_carlo;
    throw ConfigError("stage2.prob_mode", "unknown probability mode: " + name);
}

template <typename T>
void read_field(const json& obj, const char* key, T& value) {
    if (obj.contains(key)) {
        try {
            value = obj.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(key, "invalid value type");
        }
    }
}

// --set key.path=value; value parsed as JSON when possible, string otherwise
void apply_override(json& doc, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set", "expected key.path=value, got: " + assignment);
    std::string key = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        auto dotpos = key.find('.', start);
        std::string part = key.substr(start, dotpos == std::string::npos ? std::string::npos
                                                                         : dotpos - start);
        if (part.empty()) throw ConfigError("--set", "empty path segment in: " + key);
        if (dotpos == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[part] = parsed.is_discarded() ? json(value) : parsed;
            break;
        }
        node = &(*node)[part];
        start = dotpos + 1;
    }
}

}  // namespace

std::string config_hash(const json& effective) {
    std::string dump = effective.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : dump) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RunConfig::validate() const {
    dataset.validate();
    if (eval_videos < 0) throw ConfigError("dataset.eval_videos", "must be >= 0");
    extractor.validate(dataset.frames_per_video);
    if (classifier_kind != "coverage_oracle" && classifier_kind != "linear")
        throw ConfigError("classifier.kind", "must be coverage_oracle or linear");
    oracle.validate();
    stage1.validate(dataset.frames_per_video);
    cost_model.validate();
    stage2.validate(dataset.frames_per_video);
    budget.validate();
    for (const auto& name : eval_strategies) strategy_from_name(name);
    for (int n : eval_n_list)
        if (n < 1 || n > dataset.frames_per_video)
            throw ConfigError("eval.n_list", "every N must satisfy 1 <= N <= T");
    if (transfer_gamma < 0) throw ConfigError("eval.transfer_gamma", "must be >= 0");
    for (double e : sweep_epsilons)
        if (!(e > 0.0 && e <= 1.0)) throw ConfigError("sweep.epsilons", "requires 0 < epsilon <= 1");
    for (double a : sweep_alphas)
        if (!(a > 1.0)) throw ConfigError("sweep.alphas", "requires alpha > 1");
}

json RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["dataset"] = {{"train_videos", dataset.num_videos},
                    {"eval_videos", eval_videos},
                    {"T", dataset.frames_per_video},
                    {"C", dataset.num_classes},
                    {"D", dataset.feature_dim},
                    {"salient_min", dataset.salient_min},
                    {"salient_max", dataset.salient_max},
                    {"signal_strength", dataset.signal_strength},
                    {"noise_sigma", dataset.noise_sigma},
                    {"master_seed", dataset.master_seed},
                    {"full_precision", dataset_full_precision}};
    j["extractor"] = {{"kind", extractor_kind_name(extractor.kind)},
                      {"smooth_radius", extractor.smooth_radius}};
    j["classifier"] = {{"kind", classifier_kind},
                       {"c_min", oracle.c_min},
                       {"gamma", oracle.gamma},
                       {"stage1", {{"lr", stage1.lr},
                                   {"epochs", stage1.epochs},
                                   {"batch", stage1.batch},
                                   {"n_train", stage1.clip_frames},
                                   {"seed", stage1.seed}}}};
    j["cost_model"] = {{"c_skim", cost_model.skim_cost}, {"c_classifier", cost_model.classifier_cost}};
    j["stage2"] = {{"n", stage2.clip_frames},
                   {"lr", stage2.lr},
                   {"epochs", stage2.epochs},
                   {"batch", stage2.batch},
                   {"baseline_subsets", stage2.baseline_subsets},
                   {"baseline_exact_limit", stage2.baseline_exact_limit},
                   {"prob_mode", stage2.prob_mode == ProbMode::exact ? "exact" : "monte_carlo"},
                   {"mc_permutations", stage2.mc_permutations},
                   {"reward_kind", reward_kind_name(stage2.reward_kind)},
                   {"seed", stage2.seed}};
    j["budget"] = {{"epsilon", budget.epsilon},
                   {"alpha", budget.alpha},
                   {"samples_per_m", budget.samples_per_m},
                   {"exact_limit", budget.exact_limit},
                   {"lr", budget.lr},
                   {"epochs", budget.epochs},
                   {"batch", budget.batch},
                   {"seed", budget.seed}};
    j["eval"] = {{"strategies", eval_strategies},
                 {"n_list", eval_n_list},
                 {"export_selections", export_selections},
                 {"transfer_gamma", transfer_gamma}};
    j["sweep"] = {{"epsilons", sweep_epsilons}, {"alphas", sweep_alphas}};
    return j;
}

RunConfig load_run_config(const CliOverrides& overrides) {
    json doc = json::object();
    if (!overrides.config_path.empty()) {
        if (!std::filesystem::exists(overrides.config_path))
            throw ConfigError("--config", "config file not found: " + overrides.config_path);
        try {
            doc = json::parse(read_text(overrides.config_path));
        } catch (const json::exception& e) {
            throw ConfigError("--config", std::string("config parse error: ") + e.what());
        }
    }
    for (const auto& assignment : overrides.sets) apply_override(doc, assignment);

    RunConfig cfg;
    read_field(doc, "seed", cfg.seed);
    read_field(doc, "out_dir", cfg.out_dir);

    if (doc.contains("dataset")) {
        const json& d = doc["dataset"];
        read_field(d, "train_videos", cfg.dataset.num_videos);
        read_field(d, "eval_videos", cfg.eval_videos);
        read_field(d, "T", cfg.dataset.frames_per_video);
        read_field(d, "C", cfg.dataset.num_classes);
        read_field(d, "D", cfg.dataset.feature_dim);
        read_field(d, "salient_min", cfg.dataset.salient_min);
        read_field(d, "salient_max", cfg.dataset.salient_max);
        read_field(d, "signal_strength", cfg.dataset.signal_strength);
        read_field(d, "noise_sigma", cfg.dataset.noise_sigma);
        read_field(d, "master_seed", cfg.dataset.master_seed);
        read_field(d, "full_precision", cfg.dataset_full_precision);
    }
    if (doc.contains("extractor")) {
        const json& e = doc["extractor"];
        std::string kind = extractor_kind_name(cfg.extractor.kind);
        read_field(e, "kind", kind);
        cfg.extractor.kind = extractor_kind_from(kind);
        read_field(e, "smooth_radius", cfg.extractor.smooth_radius);
    }
    if (doc.contains("classifier")) {
        const json& c = doc["classifier"];
        read_field(c, "kind", cfg.classifier_kind);
        read_field(c, "c_min", cfg.oracle.c_min);
        read_field(c, "gamma", cfg.oracle.gamma);
        if (c.contains("stage1")) {
            const json& s = c["stage1"];
            read_field(s, "lr", cfg.stage1.lr);
            read_field(s, "epochs", cfg.stage1.epochs);
            read_field(s, "batch", cfg.stage1.batch);
            read_field(s, "n_train", cfg.stage1.clip_frames);
            read_field(s, "seed", cfg.stage1.seed);
        }
    }
    if (doc.contains("cost_model")) {
        const json& c = doc["cost_model"];
        read_field(c, "c_skim", cfg.cost_model.skim_cost);
        read_field(c, "c_classifier", cfg.cost_model.classifier_cost);
    }
    if (doc.contains("stage2")) {
        const json& s = doc["stage2"];
        read_field(s, "n", cfg.stage2.clip_frames);
        read_field(s, "lr", cfg.stage2.lr);
        read_field(s, "epochs", cfg.stage2.epochs);
        read_field(s, "batch", cfg.stage2.batch);
        read_field(s, "baseline_subsets", cfg.stage2.baseline_subsets);
        read_field(s, "baseline_exact_limit", cfg.stage2.baseline_exact_limit);
        std::string mode = cfg.stage2.prob_mode == ProbMode::exact ? "exact" : "monte_carlo";
        read_field(s, "prob_mode", mode);
        cfg.stage2.prob_mode = prob_mode_from(mode);
        read_field(s, "mc_permutations", cfg.stage2.mc_permutations);
        std::string kind = reward_kind_name(cfg.stage2.reward_kind);
        read_field(s, "reward_kind", kind);
        cfg.stage2.reward_kind = reward_kind_from(kind);
        read_field(s, "seed", cfg.stage2.seed);
    }
    if (doc.contains("budget")) {
        const json& b = doc["budget"];
        read_field(b, "epsilon", cfg.budget.epsilon);
        read_field(b, "alpha", cfg.budget.alpha);
        read_field(b, "samples_per_m", cfg.budget.samples_per_m);
        read_field(b, "exact_limit", cfg.budget.exact_limit);
        read_field(b, "lr", cfg.budget.lr);
        read_field(b, "epochs", cfg.budget.epochs);
        read_field(b, "batch", cfg.budget.batch);
        read_field(b, "seed", cfg.budget.seed);
    }
    if (doc.contains("eval")) {
        const json& e = doc["eval"];
        read_field(e, "strategies", cfg.eval_strategies);
        read_field(e, "n_list", cfg.eval_n_list);
        read_field(e, "export_selections", cfg.export_selections);
        read_field(e, "transfer_gamma", cfg.transfer_gamma);
    }
    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        read_field(s, "epsilons", cfg.sweep_epsilons);
        read_field(s, "alphas", cfg.sweep_alphas);
    }

    if (overrides.has_seed) cfg.seed = overrides.seed;
    if (!overrides.out_dir.empty()) cfg.out_dir = overrides.out_dir;

    cfg.validate();
    cfg.hash = config_hash(cfg.to_json());
    return cfg;
}

}  // namespace ocs::cli
