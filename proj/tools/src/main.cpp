#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ocs/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"one-clip frame selection: synthetic-environment training and evaluation"};
    app.require_subcommand(1);

    ocs::cli::CliOverrides overrides;
    app.add_option("--config", overrides.config_path, "path to the run config (JSON)");
    app.add_option("--out", overrides.out_dir, "output directory (overrides config out_dir)");
    auto* seed_opt = app.add_option("--seed", overrides.seed, "global seed (overrides config seed)");
    app.add_option("--set", overrides.sets, "override a config leaf, key.path=value (repeatable)");
    app.add_flag("--allow-mismatch", overrides.allow_mismatch,
                 "consume artifacts produced under a different config hash");

    auto* gen_data = app.add_subcommand("gen-data", "generate the train and eval datasets");
    auto* train_stage1 = app.add_subcommand("train-stage1", "train the linear softmax classifier");
    auto* train_policy = app.add_subcommand("train-policy", "train the selection policy");
    auto* train_budget = app.add_subcommand("train-budget", "train the adaptive frame-count head");
    auto* eval = app.add_subcommand("eval", "run the strategy comparison harness");
    auto* sweep = app.add_subcommand("sweep", "budget trade-off grid over epsilon and alpha");
    auto* check = app.add_subcommand("check", "run the verification suites");

    CLI11_PARSE(app, argc, argv);
    overrides.has_seed = seed_opt->count() > 0;

    try {
        ocs::cli::RunConfig cfg = ocs::cli::load_run_config(overrides);
        if (gen_data->parsed()) return ocs::cli::cmd_gen_data(cfg);
        if (train_stage1->parsed()) return ocs::cli::cmd_train_stage1(cfg, overrides.allow_mismatch);
        if (train_policy->parsed()) return ocs::cli::cmd_train_policy(cfg, overrides.allow_mismatch);
        if (train_budget->parsed()) return ocs::cli::cmd_train_budget(cfg, overrides.allow_mismatch);
        if (eval->parsed()) return ocs::cli::cmd_eval(cfg, overrides.allow_mismatch);
        if (sweep->parsed()) return ocs::cli::cmd_sweep(cfg, overrides.allow_mismatch);
        if (check->parsed()) return ocs::cli::cmd_check(cfg);
    } catch (const ocs::Error& e) {
        std::fprintf(stderr, "%s\n", e.error_line().c_str());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ERROR E_INTERNAL - %s\n", e.what());
        return 1;
    }
    return 1;
}
