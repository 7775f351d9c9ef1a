#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ocs {

// OCS-CKPT v1: UTF-8 text, magic line, `key=value` metadata lines, then
// whitespace-separated decimals (row-major, 17 significant digits).
// Round-trips doubles exactly.
struct Checkpoint {
    std::string kind;
    int rows = 0;
    int cols = 0;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> extra;  // additional key=value metadata
    std::vector<double> values;                // rows * cols entries
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ocs
