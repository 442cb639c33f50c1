#pragma once

#include "dvgan/bvh.hpp"
#include "dvgan/motion.hpp"
#include "dvgan/text.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace dvgan {

// Raw layout:       <root>/<split>/<clip_id>.bvh + <root>/<split>/descriptions.tsv
// Processed layout: <root>/<split>/<clip_id>.csv + descriptions.tsv,
//                   <root>/meta.json, stats.json, vocab.tsv
inline const char* kTrainSplit = "train";
inline const char* kTestSplit = "test";

struct DatasetClip {
  std::string id;
  std::string description;
  MotionClip clip;
};

struct ProcessedDataset {
  Skeleton skeleton;
  double frame_rate = 0.0;                  // f after resampling
  std::vector<std::string> channel_names;   // expmap channel labels
  NormalizationStats stats;                 // computed on the train split
  Vocabulary vocab;                         // built from train descriptions
  std::vector<DatasetClip> train;
  std::vector<DatasetClip> test;

  // Sorted by descending total train-split frame count, then name; used for
  // the "most popular descriptions" pool.
  std::vector<std::string> descriptions_by_popularity() const;
};

// clip_id -> sentence, one per line, tab separated.
std::map<std::string, std::string> read_descriptions(const std::string& path);
void write_descriptions(const std::string& path,
                        const std::map<std::string, std::string>& entries);

struct PreprocessOptions {
  double target_rate = 4.0;
  bool fail_fast = false;  // by default unparsable files are reported, not fatal
};

struct PreprocessReport {
  int converted = 0;
  std::vector<std::string> failures;  // "<path>: <error>"
};

// Parses every BVH clip, converts rotations to exponential maps, resamples
// to the target rate, computes train-split stats and writes the processed
// layout. Throws on an empty dataset or a missing descriptions.tsv.
PreprocessReport preprocess_dataset(const std::string& raw_root, const std::string& out_root,
                                    const PreprocessOptions& options);

ProcessedDataset load_processed(const std::string& root);

nlohmann::ordered_json skeleton_to_json(const Skeleton& skeleton);
Skeleton skeleton_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json stats_to_json(const NormalizationStats& stats);
NormalizationStats stats_from_json(const nlohmann::ordered_json& j);

}  // namespace dvgan
