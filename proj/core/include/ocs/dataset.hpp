#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ocs/rng.hpp"
#include "ocs/types.hpp"

namespace ocs {

// Deterministic unit vector for a class, derived from (master_seed, label).
std::vector<double> class_embedding(int label, std::uint64_t master_seed, int dim);

// Rebuilds one video from its generation seed. The record is a pure
// function of (spec generator parameters, gen_seed): label, salient set
// and every feature coordinate come from the seeded stream in a fixed
// draw order, so regeneration is bit-for-bit.
SyntheticVideo generate_video(const DatasetSpec& spec, std::uint64_t id, std::uint64_t gen_seed);

// Salient frames carry signal_strength * e(label) plus gaussian noise;
// the remaining frames are pure noise.
std::vector<SyntheticVideo> generate_dataset(const DatasetSpec& spec);

// Line-delimited dataset file. Records follow
//   id<TAB>label<TAB>T<TAB>D<TAB>salient:i,j,k<TAB>seed
// and features are regenerated from the seed on load. A leading header
// line carries the generator parameters needed for regeneration plus the
// producing run's config hash and seed. With full_precision, each record
// additionally embeds its features as 17-significant-digit decimals and
// the loader reads them back instead of regenerating.
struct DatasetFileMeta {
    std::string config_hash = "none";
    std::uint64_t run_seed = 0;
};

void save_dataset(const std::filesystem::path& path, const DatasetSpec& spec,
                  const std::vector<SyntheticVideo>& videos, bool full_precision = false,
                  const DatasetFileMeta& meta = {});

struct LoadedDataset {
    DatasetSpec spec;
    std::vector<SyntheticVideo> videos;
    DatasetFileMeta meta;
    bool full_precision = false;
};

LoadedDataset load_dataset(const std::filesystem::path& path);

}  // namespace ocs
