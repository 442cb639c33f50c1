#pragma once

#include "dvgan/bvh.hpp"
#include "dvgan/rng.hpp"

#include <string>
#include <vector>

namespace dvgan {

// Per-channel sinusoid parameters for one synthetic action. Distinct
// actions carry distinct frequency/channel signatures so a desk-scale
// ranker can separate them.
struct ChannelWave {
  double freq_hz = 0.0;
  double amplitude_deg = 0.0;
  double phase = 0.0;
};

struct SyntheticAction {
  std::string name;
  std::vector<ChannelWave> waves;  // one per channel
};

struct SyntheticSpec {
  std::vector<SyntheticAction> actions;
  double source_rate = 8.0;
  Eigen::Index frames_per_clip = 384;
  double noise_deg = 1.5;
  int train_clips_per_action = 40;
  int test_clips_per_action = 12;

  // Three actions on a 6-DOF two-joint skeleton: "walk" and "run" drive the
  // root channels at different frequencies, "wave arms" drives the arm
  // joint.
  static SyntheticSpec default_spec();
};

// ROOT hips (3 rotations) -> JOINT arm (3 rotations); 6 DOF total.
Skeleton synthetic_skeleton();

MotionClip synthesize_clip(const SyntheticSpec& spec, const SyntheticAction& action, Rng& rng);

// Writes the raw dataset layout (train/test BVH + descriptions.tsv).
// Deterministic for a fixed rng seed.
void write_synthetic_dataset(const std::string& root, const SyntheticSpec& spec, Rng& rng);

}  // namespace dvgan
