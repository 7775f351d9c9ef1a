#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocs/budget.hpp"
#include "ocs/classifier.hpp"
#include "ocs/reinforce.hpp"
#include "ocs/skim.hpp"
#include "ocs/types.hpp"

namespace ocs::cli {

// One config file drives every stage. Leaves can be overridden with
// repeated --set key.path=value flags; the hash covers the effective
// values, so any override changes it.
struct RunConfig {
    std::uint64_t seed = 7;
    std::string out_dir = "out";

    DatasetSpec dataset;
    int eval_videos = 100;
    bool dataset_full_precision = false;

    FeatureExtractorSpec extractor;

    std::string classifier_kind = "coverage_oracle";  // or "linear"
    CoverageOracleSpec oracle;
    Stage1Config stage1;

    CostModel cost_model;
    Stage2Config stage2;
    BudgetConfig budget;

    std::vector<std::string> eval_strategies = {"learned", "uniform", "random"};
    std::vector<int> eval_n_list = {2, 4};
    bool export_selections = false;
    double transfer_gamma = 0.0;  // > 0 adds a selection-transfer section to eval

    std::vector<double> sweep_epsilons = {0.3, 0.5, 0.7};
    std::vector<double> sweep_alphas = {1.5, 2.0, 4.0};

    std::string hash;  // 16 hex chars over the effective config

    void validate() const;
    nlohmann::json to_json() const;

    std::filesystem::path out(const std::string& name) const {
        return std::filesystem::path(out_dir) / name;
    }
};

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::vector<std::string> sets;  // key.path=value
    bool allow_mismatch = false;
};

RunConfig load_run_config(const CliOverrides& overrides);

// FNV-1a over the canonical JSON dump, 16 hex characters.
std::string config_hash(const nlohmann::json& effective);

}  // namespace ocs::cli
