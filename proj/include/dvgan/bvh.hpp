#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dvgan {

// BVH channel labels, in file order per joint.
enum class Channel { Xposition, Yposition, Zposition, Xrotation, Yrotation, Zrotation };

bool is_rotation(Channel c);
std::string channel_name(Channel c);
Channel channel_from_name(const std::string& name, int line);

struct Joint {
  std::string name;
  int parent = -1;  // index into Skeleton::joints; -1 for the root
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  std::vector<Channel> channels;
  bool has_end_site = false;
  Eigen::Vector3d end_site = Eigen::Vector3d::Zero();
};

// Joint hierarchy in file order. Parents always precede children.
struct Skeleton {
  std::vector<Joint> joints;

  int total_channels() const;
  // First channel index of joint j in a frame row.
  int channel_offset(int j) const;
  bool operator==(const Skeleton& other) const;
};

// N frames x M channels of motion data. Rows are frames. For raw BVH data
// the channels are euler degrees / translation units in file order; after
// preprocessing they are exponential-map radians.
struct MotionClip {
  Eigen::MatrixXd frames;  // N x M
  double frame_rate = 0.0;
  std::vector<std::string> channel_names;  // size M, optional labels

  Eigen::Index frame_count() const { return frames.rows(); }
  Eigen::Index dof() const { return frames.cols(); }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Parses a BVH document (HIERARCHY + MOTION). Throws ParseError with the
// offending line on malformed hierarchy, channel-count mismatch or
// non-numeric frame data.
std::pair<Skeleton, MotionClip> parse_bvh(std::istream& in);
std::pair<Skeleton, MotionClip> parse_bvh_string(const std::string& text);
std::pair<Skeleton, MotionClip> parse_bvh_file(const std::string& path);

// Serializes skeleton + motion back to BVH text. Frame values carry six
// decimal places; Frame Time is written with full double precision so the
// rate survives a round trip. Throws std::invalid_argument on clip/skeleton
// width mismatch or an empty clip.
void write_bvh(std::ostream& out, const Skeleton& skeleton, const MotionClip& clip);
std::string write_bvh_string(const Skeleton& skeleton, const MotionClip& clip);
void write_bvh_file(const std::string& path, const Skeleton& skeleton, const MotionClip& clip);

// Channel labels like "Hips.Zrotation" in frame-row order.
std::vector<std::string> skeleton_channel_names(const Skeleton& skeleton);

}  // namespace dvgan
