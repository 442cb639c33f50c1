#include "dvgan/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

namespace dvgan {

namespace fs = std::filesystem;

SyntheticSpec SyntheticSpec::default_spec() {
  SyntheticSpec spec;
  // Channels 0-2: root (legs), channels 3-5: arm.
  spec.actions = {
      {"walk",
       {{0.5, 25.0, 0.0}, {0.5, 15.0, M_PI / 2}, {0.5, 10.0, M_PI / 4},
        {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}},
      {"run",
       {{1.25, 38.0, 0.0}, {1.25, 24.0, M_PI / 2}, {1.25, 16.0, M_PI / 4},
        {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}},
      {"wave arms",
       {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0},
        {0.75, 32.0, 0.0}, {0.75, 20.0, M_PI / 3}, {0.75, 12.0, M_PI / 6}}},
  };
  return spec;
}

Skeleton synthetic_skeleton() {
  Skeleton skeleton;
  Joint hips;
  hips.name = "hips";
  hips.parent = -1;
  hips.offset = Eigen::Vector3d::Zero();
  hips.channels = {Channel::Zrotation, Channel::Xrotation, Channel::Yrotation};
  Joint arm;
  arm.name = "arm";
  arm.parent = 0;
  arm.offset = Eigen::Vector3d(0.0, 1.0, 0.0);
  arm.channels = {Channel::Zrotation, Channel::Xrotation, Channel::Yrotation};
  arm.has_end_site = true;
  arm.end_site = Eigen::Vector3d(0.0, 0.5, 0.0);
  skeleton.joints = {hips, arm};
  return skeleton;
}

MotionClip synthesize_clip(const SyntheticSpec& spec, const SyntheticAction& action, Rng& rng) {
  const Skeleton skeleton = synthetic_skeleton();
  const auto channels = static_cast<Eigen::Index>(skeleton.total_channels());
  if (static_cast<Eigen::Index>(action.waves.size()) != channels)
    throw std::invalid_argument("synthesize_clip: wave count != channel count");

  MotionClip clip;
  clip.frame_rate = spec.source_rate;
  clip.channel_names = skeleton_channel_names(skeleton);
  clip.frames.resize(spec.frames_per_clip, channels);
  const double clip_phase = 2.0 * M_PI * rng.uniform01();
  for (Eigen::Index c = 0; c < channels; ++c) {
    const ChannelWave& wave = action.waves[static_cast<size_t>(c)];
    for (Eigen::Index f = 0; f < spec.frames_per_clip; ++f) {
      const double t = static_cast<double>(f) / spec.source_rate;
      const double angle = wave.amplitude_deg *
                           std::sin(2.0 * M_PI * wave.freq_hz * t + wave.phase + clip_phase);
      clip.frames(f, c) = angle + spec.noise_deg * rng.normal();
    }
  }
  return clip;
}

void write_synthetic_dataset(const std::string& root, const SyntheticSpec& spec, Rng& rng) {
  if (spec.actions.empty()) throw std::invalid_argument("synthetic spec has no actions");
  const Skeleton skeleton = synthetic_skeleton();
  for (const char* split : {"train", "test"}) {
    const fs::path dir = fs::path(root) / split;
    fs::create_directories(dir);
    const int per_action = std::string(split) == "train" ? spec.train_clips_per_action
                                                         : spec.test_clips_per_action;
    std::map<std::string, std::string> descriptions;
    for (size_t a = 0; a < spec.actions.size(); ++a) {
      for (int i = 0; i < per_action; ++i) {
        const std::string id =
            std::string(split) + "_a" + std::to_string(a) + "_" + std::to_string(i);
        const MotionClip clip = synthesize_clip(spec, spec.actions[a], rng);
        write_bvh_file((dir / (id + ".bvh")).string(), skeleton, clip);
        descriptions[id] = spec.actions[a].name;
      }
    }
    std::ofstream out(dir / "descriptions.tsv");
    for (const auto& [id, text] : descriptions) out << id << '\t' << text << '\n';
  }
}

}  // namespace dvgan
