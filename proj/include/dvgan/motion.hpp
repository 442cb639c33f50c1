#pragma once

#include "dvgan/bvh.hpp"
#include "dvgan/rng.hpp"
#include "dvgan/rotation.hpp"

#include <iosfwd>
#include <vector>

namespace dvgan {

inline constexpr double kStdFloor = 1e-8;

// Per-channel mean / std over a corpus. Constant channels get their std
// clamped to kStdFloor so normalized values come out as exact zeros and the
// channel is reconstructed from the stored mean.
struct NormalizationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  Eigen::MatrixXd normalize(const Eigen::MatrixXd& frames) const;
  Eigen::MatrixXd denormalize(const Eigen::MatrixXd& frames) const;
};

// Population mean/std per channel over all frames of all clips (two-pass).
NormalizationStats compute_stats(const std::vector<MotionClip>& clips);

// Integer-stride frame subsampling starting at frame 0. Throws
// std::invalid_argument when source/target is not a whole number.
MotionClip resample(const MotionClip& clip, double target_rate);

// Contiguous window of `length` frames at an offset drawn uniformly from
// {0 .. N-length}. Throws std::invalid_argument when the clip is shorter
// than `length`.
MotionClip sample_clip(const MotionClip& clip, Eigen::Index length, Rng& rng);

// Rotation channels (euler degrees, per-joint channel order) ->
// exponential-map radians. Translation channels pass through unchanged.
// Every joint must carry either zero or exactly three rotation channels.
MotionClip clip_to_expmap(const Skeleton& skeleton, const MotionClip& raw);

// Inverse of clip_to_expmap: expmap radians back to euler degrees in each
// joint's original channel order, for BVH export.
MotionClip expmap_to_clip(const Skeleton& skeleton, const MotionClip& processed);

// Channel labels of the expmap representation, aligned with clip_to_expmap.
std::vector<std::string> expmap_channel_names(const Skeleton& skeleton);

// CSV: header row of channel names, one row per frame.
void write_csv(std::ostream& out, const MotionClip& clip);
void write_csv_file(const std::string& path, const MotionClip& clip);
MotionClip read_csv(std::istream& in, double frame_rate);
MotionClip read_csv_file(const std::string& path, double frame_rate);

}  // namespace dvgan
