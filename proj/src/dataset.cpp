#include "dvgan/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

namespace dvgan {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::map<std::string, std::string> read_descriptions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing descriptions file: " + path);
  std::map<std::string, std::string> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected clip_id<TAB>description");
    entries[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return entries;
}

void write_descriptions(const std::string& path,
                        const std::map<std::string, std::string>& entries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& [id, text] : entries) out << id << '\t' << text << '\n';
}

nlohmann::ordered_json skeleton_to_json(const Skeleton& skeleton) {
  ordered_json joints = ordered_json::array();
  for (const Joint& j : skeleton.joints) {
    ordered_json joint;
    joint["name"] = j.name;
    joint["parent"] = j.parent;
    joint["offset"] = {j.offset(0), j.offset(1), j.offset(2)};
    ordered_json channels = ordered_json::array();
    for (Channel c : j.channels) channels.push_back(channel_name(c));
    joint["channels"] = channels;
    if (j.has_end_site) joint["end_site"] = {j.end_site(0), j.end_site(1), j.end_site(2)};
    joints.push_back(joint);
  }
  ordered_json out;
  out["joints"] = joints;
  return out;
}

Skeleton skeleton_from_json(const nlohmann::ordered_json& j) {
  Skeleton skeleton;
  for (const auto& joint_json : j.at("joints")) {
    Joint joint;
    joint.name = joint_json.at("name").get<std::string>();
    joint.parent = joint_json.at("parent").get<int>();
    const auto& off = joint_json.at("offset");
    joint.offset = Eigen::Vector3d(off[0].get<double>(), off[1].get<double>(),
                                   off[2].get<double>());
    for (const auto& c : joint_json.at("channels"))
      joint.channels.push_back(channel_from_name(c.get<std::string>(), 0));
    if (joint_json.contains("end_site")) {
      joint.has_end_site = true;
      const auto& end = joint_json.at("end_site");
      joint.end_site = Eigen::Vector3d(end[0].get<double>(), end[1].get<double>(),
                                       end[2].get<double>());
    }
    skeleton.joints.push_back(std::move(joint));
  }
  return skeleton;
}

nlohmann::ordered_json stats_to_json(const NormalizationStats& stats) {
  ordered_json out;
  out["mean"] = std::vector<double>(stats.mean.data(), stats.mean.data() + stats.mean.size());
  out["std"] = std::vector<double>(stats.std.data(), stats.std.data() + stats.std.size());
  return out;
}

NormalizationStats stats_from_json(const nlohmann::ordered_json& j) {
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto std_values = j.at("std").get<std::vector<double>>();
  NormalizationStats stats;
  stats.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                 static_cast<Eigen::Index>(mean.size()));
  stats.std = Eigen::Map<const Eigen::VectorXd>(std_values.data(),
                                                static_cast<Eigen::Index>(std_values.size()));
  return stats;
}

std::vector<std::string> ProcessedDataset::descriptions_by_popularity() const {
  std::map<std::string, Eigen::Index> frame_counts;
  for (const DatasetClip& clip : train) frame_counts[clip.description] += clip.clip.frame_count();
  std::vector<std::pair<std::string, Eigen::Index>> ranked(frame_counts.begin(),
                                                           frame_counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  out.reserve(ranked.size());
  for (const auto& [text, count] : ranked) out.push_back(text);
  return out;
}

PreprocessReport preprocess_dataset(const std::string& raw_root, const std::string& out_root,
                                    const PreprocessOptions& options) {
  PreprocessReport report;
  fs::create_directories(out_root);

  Skeleton skeleton;
  bool have_skeleton = false;
  std::vector<MotionClip> train_clips;
  std::vector<std::string> train_descriptions;

  for (const char* split : {kTrainSplit, kTestSplit}) {
    const fs::path split_dir = fs::path(raw_root) / split;
    if (!fs::is_directory(split_dir))
      throw std::runtime_error("missing split directory: " + split_dir.string());
    const auto descriptions = read_descriptions((split_dir / "descriptions.tsv").string());
    fs::create_directories(fs::path(out_root) / split);
    std::map<std::string, std::string> kept;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(split_dir)) {
      if (entry.path().extension() == ".bvh") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw std::runtime_error("no .bvh clips in " + split_dir.string());

    for (const fs::path& file : files) {
      const std::string clip_id = file.stem().string();
      try {
        auto it = descriptions.find(clip_id);
        if (it == descriptions.end())
          throw std::runtime_error("no description for clip '" + clip_id + "'");
        auto [sk, raw] = parse_bvh_file(file.string());
        if (!have_skeleton) {
          skeleton = sk;
          have_skeleton = true;
        } else if (!(skeleton == sk)) {
          throw std::runtime_error("skeleton differs from the corpus skeleton");
        }
        MotionClip processed = resample(clip_to_expmap(sk, raw), options.target_rate);
        write_csv_file((fs::path(out_root) / split / (clip_id + ".csv")).string(), processed);
        kept[clip_id] = it->second;
        ++report.converted;
        if (std::string(split) == kTrainSplit) {
          train_clips.push_back(std::move(processed));
          train_descriptions.push_back(it->second);
        }
      } catch (const std::exception& e) {
        if (options.fail_fast) throw;
        report.failures.push_back(file.string() + ": " + e.what());
      }
    }
    write_descriptions((fs::path(out_root) / split / "descriptions.tsv").string(), kept);
  }

  if (train_clips.empty())
    throw std::runtime_error("preprocess: zero train clips converted from " + raw_root);

  const NormalizationStats stats = compute_stats(train_clips);
  {
    std::ofstream out(fs::path(out_root) / "stats.json");
    out << stats_to_json(stats).dump(2) << "\n";
  }
  Vocabulary vocab = Vocabulary::build(train_descriptions);
  vocab.save((fs::path(out_root) / "vocab.tsv").string());
  {
    ordered_json meta;
    meta["frame_rate"] = options.target_rate;
    meta["channels"] = expmap_channel_names(skeleton);
    meta["skeleton"] = skeleton_to_json(skeleton);
    std::ofstream out(fs::path(out_root) / "meta.json");
    out << meta.dump(2) << "\n";
  }
  return report;
}

ProcessedDataset load_processed(const std::string& root) {
  ProcessedDataset data;
  {
    std::ifstream in(fs::path(root) / "meta.json");
    if (!in) throw std::runtime_error("missing meta.json in " + root);
    const auto meta = ordered_json::parse(in);
    data.frame_rate = meta.at("frame_rate").get<double>();
    data.channel_names = meta.at("channels").get<std::vector<std::string>>();
    data.skeleton = skeleton_from_json(meta.at("skeleton"));
  }
  {
    std::ifstream in(fs::path(root) / "stats.json");
    if (!in) throw std::runtime_error("missing stats.json in " + root);
    data.stats = stats_from_json(ordered_json::parse(in));
  }
  data.vocab = Vocabulary::load((fs::path(root) / "vocab.tsv").string());

  for (const char* split : {kTrainSplit, kTestSplit}) {
    const fs::path split_dir = fs::path(root) / split;
    const auto descriptions = read_descriptions((split_dir / "descriptions.tsv").string());
    auto& list = std::string(split) == kTrainSplit ? data.train : data.test;
    for (const auto& [id, text] : descriptions) {
      DatasetClip clip;
      clip.id = id;
      clip.description = text;
      clip.clip = read_csv_file((split_dir / (id + ".csv")).string(), data.frame_rate);
      list.push_back(std::move(clip));
    }
  }
  // Train and test sources must be disjoint.
  std::set<std::string> train_ids;
  for (const DatasetClip& c : data.train) train_ids.insert(c.id);
  for (const DatasetClip& c : data.test) {
    if (train_ids.count(c.id))
      throw std::runtime_error("clip '" + c.id + "' appears in both splits");
  }
  return data;
}

}  // namespace dvgan
