#include "dvgan/motion.hpp"

#include "dvgan/graph.hpp"
#include "dvgan/rng.hpp"
#include "dvgan/synth.hpp"
#include "support/stats.hpp"

#include <doctest.h>

#include <sstream>

using namespace dvgan;

namespace {

MotionClip make_clip(const Mat& frames, double rate) {
  MotionClip clip;
  clip.frames = frames;
  clip.frame_rate = rate;
  return clip;
}

}  // namespace

TEST_CASE("stats of {1,3} are mean 2, std 1") {
  Mat frames(2, 1);
  frames << 1.0, 3.0;
  const NormalizationStats stats = compute_stats({make_clip(frames, 10.0)});
  CHECK(stats.mean(0) == doctest::Approx(2.0));
  CHECK(stats.std(0) == doctest::Approx(1.0));
}

TEST_CASE("constant channels clamp to the std floor and normalize to zero") {
  Mat frames(4, 2);
  frames.col(0).setConstant(5.0);
  frames.col(1) << 0.0, 1.0, 2.0, 3.0;
  const NormalizationStats stats = compute_stats({make_clip(frames, 10.0)});
  CHECK(stats.std(0) == kStdFloor);
  const Mat normalized = stats.normalize(frames);
  CHECK(normalized.col(0).cwiseAbs().maxCoeff() == 0.0);
  const Mat back = stats.denormalize(normalized);
  CHECK((back - frames).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-pass stats match a single-pass brute-force recomputation") {
  Rng rng(29);
  std::vector<MotionClip> clips;
  Eigen::Index total = 0;
  for (int i = 0; i < 5; ++i) {
    Mat frames(10 + 7 * i, 4);
    for (Eigen::Index r = 0; r < frames.rows(); ++r)
      for (Eigen::Index c = 0; c < frames.cols(); ++c)
        frames(r, c) = 3.0 * rng.normal() + static_cast<double>(c);
    total += frames.rows();
    clips.push_back(make_clip(frames, 10.0));
  }
  const NormalizationStats stats = compute_stats(clips);

  // Single-pass oracle: accumulate sum and sum of squares once.
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4), sum_sq = Eigen::VectorXd::Zero(4);
  for (const MotionClip& clip : clips) {
    sum += clip.frames.colwise().sum().transpose();
    sum_sq += clip.frames.array().square().colwise().sum().matrix().transpose();
  }
  const Eigen::VectorXd mean = sum / static_cast<double>(total);
  const Eigen::VectorXd var =
      sum_sq / static_cast<double>(total) - mean.array().square().matrix();
  CHECK((stats.mean - mean).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((stats.std - var.array().sqrt().matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compute_stats rejects empty input") {
  CHECK_THROWS_AS(compute_stats({}), std::invalid_argument);
}

TEST_CASE("normalize and denormalize invert each other") {
  Rng rng(31);
  Mat frames(16, 3);
  for (Eigen::Index r = 0; r < frames.rows(); ++r)
    for (Eigen::Index c = 0; c < frames.cols(); ++c) frames(r, c) = rng.normal() * (1.0 + c);
  const NormalizationStats stats = compute_stats({make_clip(frames, 10.0)});
  CHECK((stats.denormalize(stats.normalize(frames)) - frames).cwiseAbs().maxCoeff() < 1e-9);
  Mat other = frames.array() + 0.25;
  CHECK((stats.normalize(stats.denormalize(other)) - other).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("resample strides") {
  Mat frames(120, 2);
  for (Eigen::Index r = 0; r < 120; ++r) frames.row(r).setConstant(static_cast<double>(r));

  SUBCASE("120 Hz to 4 Hz is stride 30") {
    const MotionClip out = resample(make_clip(frames, 120.0), 4.0);
    CHECK(out.frame_count() == 4);
    CHECK(out.frames(1, 0) == 30.0);
    CHECK(out.frame_rate == 4.0);
  }
  SUBCASE("50 Hz to 12.5 Hz is stride 4") {
    const MotionClip out = resample(make_clip(frames, 50.0), 12.5);
    CHECK(out.frames(1, 0) == 4.0);
    CHECK(out.frames(0, 0) == 0.0);
  }
  SUBCASE("50 Hz to 30 Hz is rejected") {
    CHECK_THROWS_AS(resample(make_clip(frames, 50.0), 30.0), std::invalid_argument);
  }
}

TEST_CASE("sample_clip") {
  Rng rng(37);
  Mat frames(10, 1);
  for (Eigen::Index r = 0; r < 10; ++r) frames(r, 0) = static_cast<double>(r);
  const MotionClip clip = make_clip(frames, 4.0);

  SUBCASE("window equal to clip length pins offset 0") {
    const MotionClip out = sample_clip(clip, 10, rng);
    CHECK(out.frames(0, 0) == 0.0);
    CHECK(out.frame_count() == 10);
  }
  SUBCASE("too-long window is rejected") {
    CHECK_THROWS_AS(sample_clip(clip, 11, rng), std::invalid_argument);
  }
  SUBCASE("offsets are uniform over the 7 admissible values") {
    std::vector<long> counts(7, 0);
    for (int i = 0; i < 10000; ++i) {
      const MotionClip out = sample_clip(clip, 4, rng);
      ++counts[static_cast<size_t>(out.frames(0, 0))];
    }
    CHECK(teststat::uniform_chi2_ok(counts));
  }
}

TEST_CASE("expmap conversion round-trips through euler channels") {
  Rng rng(41);
  const Skeleton skeleton = synthetic_skeleton();
  MotionClip raw;
  raw.frame_rate = 8.0;
  raw.frames.resize(12, skeleton.total_channels());
  for (Eigen::Index r = 0; r < raw.frames.rows(); ++r)
    for (Eigen::Index c = 0; c < raw.frames.cols(); ++c)
      raw.frames(r, c) = 60.0 * (2.0 * rng.uniform01() - 1.0);

  const MotionClip processed = clip_to_expmap(skeleton, raw);
  CHECK(processed.dof() == raw.dof());
  const MotionClip back = expmap_to_clip(skeleton, processed);
  // Angles can differ by euler ambiguity; the rotations must agree.
  const MotionClip processed2 = clip_to_expmap(skeleton, back);
  CHECK((processed2.frames - processed.frames).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("CSV round-trip") {
  Rng rng(43);
  Mat frames(5, 3);
  for (Eigen::Index r = 0; r < 5; ++r)
    for (Eigen::Index c = 0; c < 3; ++c) frames(r, c) = rng.normal();
  MotionClip clip = make_clip(frames, 4.0);
  clip.channel_names = {"a", "b", "c"};
  std::ostringstream os;
  write_csv(os, clip);
  std::istringstream is(os.str());
  const MotionClip back = read_csv(is, 4.0);
  CHECK(back.channel_names == clip.channel_names);
  CHECK((back.frames - clip.frames).cwiseAbs().maxCoeff() == 0.0);
}
