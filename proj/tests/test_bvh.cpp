#include "dvgan/bvh.hpp"

#include "dvgan/rng.hpp"

#include <doctest.h>

#include <charconv>
#include <sstream>

using namespace dvgan;

namespace {

const char* kMinimalBvh =
    "HIERARCHY\n"
    "ROOT node\n"
    "{\n"
    "  OFFSET 0.0 0.0 0.0\n"
    "  CHANNELS 3 Zrotation Xrotation Yrotation\n"
    "  End Site\n"
    "  {\n"
    "    OFFSET 0.0 1.0 0.0\n"
    "  }\n"
    "}\n"
    "MOTION\n"
    "Frames: 2\n"
    "Frame Time: 0.0333333\n"
    "0.0 0.0 0.0\n"
    "0.0 0.0 0.0\n";

// Random skeleton/clip generator for the round-trip oracle. Joints are
// created in DFS preorder, the order BVH serialization preserves.
std::pair<Skeleton, MotionClip> random_bvh(Rng& rng) {
  Skeleton skeleton;
  const int joints = 1 + static_cast<int>(rng.uniform_int(0, 5));
  std::vector<int> path;  // ancestor chain of the previous joint
  for (int j = 0; j < joints; ++j) {
    Joint joint;
    joint.name = "j" + std::to_string(j);
    if (j == 0) {
      joint.parent = -1;
    } else {
      const auto keep = static_cast<size_t>(rng.uniform_int(1, static_cast<long>(path.size())));
      path.resize(keep);
      joint.parent = path.back();
    }
    path.push_back(j);
    joint.offset = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    if (j == 0 && rng.uniform01() < 0.5) {
      joint.channels = {Channel::Xposition, Channel::Yposition, Channel::Zposition,
                        Channel::Zrotation, Channel::Xrotation, Channel::Yrotation};
    } else {
      joint.channels = {Channel::Zrotation, Channel::Xrotation, Channel::Yrotation};
    }
    joint.has_end_site = rng.uniform01() < 0.5;
    if (joint.has_end_site)
      joint.end_site = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    skeleton.joints.push_back(joint);
  }
  MotionClip clip;
  clip.frame_rate = 120.0;
  const Eigen::Index frames = 1 + static_cast<Eigen::Index>(rng.uniform_int(0, 9));
  clip.frames.resize(frames, skeleton.total_channels());
  for (Eigen::Index f = 0; f < frames; ++f)
    for (Eigen::Index c = 0; c < clip.frames.cols(); ++c)
      clip.frames(f, c) = 90.0 * rng.normal();
  return {skeleton, clip};
}

}  // namespace

TEST_CASE("minimal one-joint file parses to zeros") {
  auto [skeleton, clip] = parse_bvh_string(kMinimalBvh);
  CHECK(skeleton.joints.size() == 1);
  CHECK(skeleton.joints[0].name == "node");
  CHECK(skeleton.joints[0].parent == -1);
  CHECK(skeleton.total_channels() == 3);
  CHECK(clip.frame_count() == 2);
  CHECK(clip.dof() == 3);
  CHECK(clip.frames.cwiseAbs().maxCoeff() == 0.0);
  CHECK(clip.frame_rate == doctest::Approx(1.0 / 0.0333333));
}

TEST_CASE("parse -> write -> parse round-trips 10 random files") {
  Rng rng(23);
  for (int i = 0; i < 10; ++i) {
    auto [skeleton, clip] = random_bvh(rng);
    const std::string text = write_bvh_string(skeleton, clip);
    auto [skeleton2, clip2] = parse_bvh_string(text);
    CHECK(skeleton == skeleton2);
    REQUIRE(clip2.frames.rows() == clip.frames.rows());
    REQUIRE(clip2.frames.cols() == clip.frames.cols());
    CHECK((clip2.frames - clip.frames).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(clip2.frame_rate == doctest::Approx(clip.frame_rate).epsilon(1e-9));

    // Idempotence on the parsed representation: a second pass is exact.
    const std::string text2 = write_bvh_string(skeleton2, clip2);
    auto [skeleton3, clip3] = parse_bvh_string(text2);
    CHECK(skeleton2 == skeleton3);
    CHECK((clip3.frames - clip2.frames).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("CMU-style 31-joint hierarchy parses to 31 joints") {
  // Chain hierarchy with CMU-like naming; what matters is the joint count
  // and channel bookkeeping.
  std::ostringstream os;
  os << "HIERARCHY\nROOT Hips\n{\n  OFFSET 0 0 0\n"
     << "  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation\n";
  int open = 1;
  for (int j = 1; j < 31; ++j) {
    os << "JOINT joint" << j << "\n{\n  OFFSET 0 1 0\n"
       << "  CHANNELS 3 Zrotation Xrotation Yrotation\n";
    ++open;
  }
  os << "End Site\n{\n  OFFSET 0 1 0\n}\n";
  for (int j = 0; j < open; ++j) os << "}\n";
  os << "MOTION\nFrames: 1\nFrame Time: 0.00833333\n";
  const int channels = 6 + 30 * 3;
  for (int c = 0; c < channels; ++c) os << (c ? " " : "") << "0.0";
  os << "\n";

  auto [skeleton, clip] = parse_bvh_string(os.str());
  CHECK(skeleton.joints.size() == 31);
  CHECK(skeleton.total_channels() == 96);
  CHECK(clip.dof() == 96);
}

TEST_CASE("parse errors carry line numbers") {
  SUBCASE("malformed hierarchy") {
    try {
      parse_bvh_string("HIERARCHY\nROOT a\n{\n  OFFSET 0 0 0\n  JOINT b\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() >= 4);
    }
  }
  SUBCASE("non-numeric frame data") {
    const std::string text =
        "HIERARCHY\nROOT a\n{\n  OFFSET 0 0 0\n  CHANNELS 1 Xrotation\n}\n"
        "MOTION\nFrames: 1\nFrame Time: 0.1\nbogus\n";
    CHECK_THROWS_AS(parse_bvh_string(text), ParseError);
  }
  SUBCASE("channel-count mismatch with frame width") {
    const std::string text =
        "HIERARCHY\nROOT a\n{\n  OFFSET 0 0 0\n  CHANNELS 1 Xrotation\n}\n"
        "MOTION\nFrames: 1\nFrame Time: 0.1\n0.0 0.0\n";
    CHECK_THROWS_AS(parse_bvh_string(text), ParseError);
  }
  SUBCASE("unknown channel label") {
    const std::string text =
        "HIERARCHY\nROOT a\n{\n  OFFSET 0 0 0\n  CHANNELS 1 Wrotation\n}\n"
        "MOTION\nFrames: 0\nFrame Time: 0.1\n";
    CHECK_THROWS_AS(parse_bvh_string(text), ParseError);
  }
}

TEST_CASE("writer rejects degenerate inputs") {
  auto [skeleton, clip] = parse_bvh_string(kMinimalBvh);
  SUBCASE("empty clip") {
    MotionClip empty = clip;
    empty.frames.resize(0, 3);
    CHECK_THROWS_AS(write_bvh_string(skeleton, empty), std::invalid_argument);
  }
  SUBCASE("width mismatch") {
    MotionClip wide = clip;
    wide.frames.resize(2, 5);
    wide.frames.setZero();
    CHECK_THROWS_AS(write_bvh_string(skeleton, wide), std::invalid_argument);
  }
}

TEST_CASE("Frame Time field equals 1/frame_rate exactly") {
  auto [skeleton, clip] = parse_bvh_string(kMinimalBvh);
  clip.frame_rate = 30.0;
  const std::string text = write_bvh_string(skeleton, clip);
  const std::string needle = "Frame Time: ";
  const size_t at = text.find(needle);
  REQUIRE(at != std::string::npos);
  const size_t end = text.find('\n', at);
  const std::string token = text.substr(at + needle.size(), end - at - needle.size());
  double value = 0.0;
  std::from_chars(token.data(), token.data() + token.size(), value);
  CHECK(value == 1.0 / 30.0);
}
