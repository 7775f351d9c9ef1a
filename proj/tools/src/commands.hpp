#pragma once

#include "run_config.hpp"

namespace ocs::cli {

int cmd_gen_data(const RunConfig& cfg);
int cmd_train_stage1(const RunConfig& cfg, bool allow_mismatch);
int cmd_train_policy(const RunConfig& cfg, bool allow_mismatch);
int cmd_train_budget(const RunConfig& cfg, bool allow_mismatch);
int cmd_eval(const RunConfig& cfg, bool allow_mismatch);
int cmd_sweep(const RunConfig& cfg, bool allow_mismatch);
int cmd_check(const RunConfig& cfg);

}  // namespace ocs::cli
