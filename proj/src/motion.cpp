#include "dvgan/motion.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dvgan {

Eigen::MatrixXd NormalizationStats::normalize(const Eigen::MatrixXd& frames) const {
  if (frames.cols() != mean.size())
    throw std::invalid_argument("normalize: channel count mismatch");
  Eigen::MatrixXd out = frames;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= std.transpose().array();
  return out;
}

Eigen::MatrixXd NormalizationStats::denormalize(const Eigen::MatrixXd& frames) const {
  if (frames.cols() != mean.size())
    throw std::invalid_argument("denormalize: channel count mismatch");
  Eigen::MatrixXd out = frames;
  out.array().rowwise() *= std.transpose().array();
  out.rowwise() += mean.transpose();
  return out;
}

NormalizationStats compute_stats(const std::vector<MotionClip>& clips) {
  if (clips.empty()) throw std::invalid_argument("compute_stats: no clips");
  const Eigen::Index m = clips.front().dof();
  Eigen::Index total = 0;
  for (const MotionClip& clip : clips) {
    if (clip.dof() != m) throw std::invalid_argument("compute_stats: inconsistent channel counts");
    total += clip.frame_count();
  }
  if (total == 0) throw std::invalid_argument("compute_stats: no frames");

  NormalizationStats stats;
  stats.mean = Eigen::VectorXd::Zero(m);
  for (const MotionClip& clip : clips) stats.mean += clip.frames.colwise().sum().transpose();
  stats.mean /= static_cast<double>(total);

  Eigen::VectorXd var = Eigen::VectorXd::Zero(m);
  for (const MotionClip& clip : clips) {
    const Eigen::MatrixXd centered = clip.frames.rowwise() - stats.mean.transpose();
    var += centered.array().square().colwise().sum().matrix().transpose();
  }
  var /= static_cast<double>(total);
  stats.std = var.array().sqrt().max(kStdFloor).matrix();
  return stats;
}

MotionClip resample(const MotionClip& clip, double target_rate) {
  if (!(target_rate > 0.0)) throw std::invalid_argument("resample: target rate must be positive");
  const double ratio = clip.frame_rate / target_rate;
  const auto stride = static_cast<Eigen::Index>(std::llround(ratio));
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9)
    throw std::invalid_argument("resample: source/target ratio " + std::to_string(ratio) +
                                " is not a positive integer stride");
  MotionClip out;
  out.frame_rate = target_rate;
  out.channel_names = clip.channel_names;
  const Eigen::Index n = (clip.frame_count() + stride - 1) / stride;
  out.frames.resize(n, clip.dof());
  for (Eigen::Index i = 0; i < n; ++i) out.frames.row(i) = clip.frames.row(i * stride);
  return out;
}

MotionClip sample_clip(const MotionClip& clip, Eigen::Index length, Rng& rng) {
  if (length < 1) throw std::invalid_argument("sample_clip: length must be >= 1");
  if (clip.frame_count() < length)
    throw std::invalid_argument("sample_clip: clip has " + std::to_string(clip.frame_count()) +
                                " frames, need " + std::to_string(length));
  const auto offset =
      static_cast<Eigen::Index>(rng.uniform_int(0, clip.frame_count() - length));
  MotionClip out;
  out.frame_rate = clip.frame_rate;
  out.channel_names = clip.channel_names;
  out.frames = clip.frames.middleRows(offset, length);
  return out;
}

namespace {

constexpr double kDeg2Rad = M_PI / 180.0;
constexpr double kRad2Deg = 180.0 / M_PI;

// Rotation channel indices of a joint within its own channel list, in file
// order, or empty when the joint has no rotation channels.
std::vector<int> rotation_slots(const Joint& joint) {
  std::vector<int> slots;
  for (int i = 0; i < static_cast<int>(joint.channels.size()); ++i)
    if (is_rotation(joint.channels[i])) slots.push_back(i);
  return slots;
}

EulerOrder joint_euler_order(const Joint& joint, const std::vector<int>& slots) {
  EulerOrder order{};
  for (int i = 0; i < 3; ++i) {
    switch (joint.channels[static_cast<size_t>(slots[static_cast<size_t>(i)])]) {
      case Channel::Xrotation: order.axis[static_cast<size_t>(i)] = 0; break;
      case Channel::Yrotation: order.axis[static_cast<size_t>(i)] = 1; break;
      default: order.axis[static_cast<size_t>(i)] = 2; break;
    }
  }
  return order;
}

}  // namespace

MotionClip clip_to_expmap(const Skeleton& skeleton, const MotionClip& raw) {
  if (raw.dof() != skeleton.total_channels())
    throw std::invalid_argument("clip_to_expmap: channel count mismatch");
  MotionClip out;
  out.frame_rate = raw.frame_rate;
  out.frames.resize(raw.frame_count(), raw.dof());
  out.channel_names = expmap_channel_names(skeleton);

  int base = 0;
  for (const Joint& joint : skeleton.joints) {
    const std::vector<int> slots = rotation_slots(joint);
    if (!slots.empty() && slots.size() != 3)
      throw std::invalid_argument("clip_to_expmap: joint '" + joint.name +
                                  "' has " + std::to_string(slots.size()) +
                                  " rotation channels, need 0 or 3");
    int out_col = base;
    // Translation channels pass through in file order.
    for (int i = 0; i < static_cast<int>(joint.channels.size()); ++i) {
      if (!is_rotation(joint.channels[static_cast<size_t>(i)]))
        out.frames.col(out_col++) = raw.frames.col(base + i);
    }
    if (!slots.empty()) {
      const EulerOrder order = joint_euler_order(joint, slots);
      for (Eigen::Index f = 0; f < raw.frame_count(); ++f) {
        Eigen::Vector3d angles;
        for (int i = 0; i < 3; ++i)
          angles(i) = raw.frames(f, base + slots[static_cast<size_t>(i)]) * kDeg2Rad;
        const Eigen::Vector3d v = rotmat_to_expmap(euler_to_rotmat(angles, order));
        out.frames(f, out_col) = v(0);
        out.frames(f, out_col + 1) = v(1);
        out.frames(f, out_col + 2) = v(2);
      }
    }
    base += static_cast<int>(joint.channels.size());
  }
  return out;
}

MotionClip expmap_to_clip(const Skeleton& skeleton, const MotionClip& processed) {
  if (processed.dof() != skeleton.total_channels())
    throw std::invalid_argument("expmap_to_clip: channel count mismatch");
  MotionClip out;
  out.frame_rate = processed.frame_rate;
  out.frames.resize(processed.frame_count(), processed.dof());
  out.channel_names = skeleton_channel_names(skeleton);

  int base = 0;
  for (const Joint& joint : skeleton.joints) {
    const std::vector<int> slots = rotation_slots(joint);
    int in_col = base;
    for (int i = 0; i < static_cast<int>(joint.channels.size()); ++i) {
      if (!is_rotation(joint.channels[static_cast<size_t>(i)]))
        out.frames.col(base + i) = processed.frames.col(in_col++);
    }
    if (!slots.empty()) {
      const EulerOrder order = joint_euler_order(joint, slots);
      for (Eigen::Index f = 0; f < processed.frame_count(); ++f) {
        const Eigen::Vector3d v(processed.frames(f, in_col), processed.frames(f, in_col + 1),
                                processed.frames(f, in_col + 2));
        const Eigen::Vector3d angles = rotmat_to_euler(expmap_to_rotmat(v), order);
        for (int i = 0; i < 3; ++i)
          out.frames(f, base + slots[static_cast<size_t>(i)]) = angles(i) * kRad2Deg;
      }
    }
    base += static_cast<int>(joint.channels.size());
  }
  return out;
}

std::vector<std::string> expmap_channel_names(const Skeleton& skeleton) {
  std::vector<std::string> names;
  for (const Joint& joint : skeleton.joints) {
    for (Channel c : joint.channels)
      if (!is_rotation(c)) names.push_back(joint.name + "." + channel_name(c));
    const std::vector<int> slots = rotation_slots(joint);
    if (!slots.empty()) {
      names.push_back(joint.name + ".e0");
      names.push_back(joint.name + ".e1");
      names.push_back(joint.name + ".e2");
    }
  }
  return names;
}

void write_csv(std::ostream& out, const MotionClip& clip) {
  for (Eigen::Index c = 0; c < clip.dof(); ++c) {
    const std::string name = c < static_cast<Eigen::Index>(clip.channel_names.size())
                                 ? clip.channel_names[static_cast<size_t>(c)]
                                 : "ch" + std::to_string(c);
    out << (c ? "," : "") << name;
  }
  out << "\n";
  char buf[64];
  for (Eigen::Index f = 0; f < clip.frame_count(); ++f) {
    for (Eigen::Index c = 0; c < clip.dof(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", clip.frames(f, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
}

void write_csv_file(const std::string& path, const MotionClip& clip) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(out, clip);
}

MotionClip read_csv(std::istream& in, double frame_rate) {
  MotionClip clip;
  clip.frame_rate = frame_rate;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
  {
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) clip.channel_names.push_back(field);
  }
  std::vector<double> values;
  Eigen::Index rows = 0;
  const auto cols = static_cast<Eigen::Index>(clip.channel_names.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    Eigen::Index c = 0;
    while (std::getline(row, field, ',')) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size())
        throw std::runtime_error("read_csv: bad number '" + field + "'");
      values.push_back(v);
      ++c;
    }
    if (c != cols) throw std::runtime_error("read_csv: row width mismatch");
    ++rows;
  }
  clip.frames.resize(rows, cols);
  for (Eigen::Index f = 0; f < rows; ++f)
    for (Eigen::Index c = 0; c < cols; ++c)
      clip.frames(f, c) = values[static_cast<size_t>(f * cols + c)];
  return clip;
}

MotionClip read_csv_file(const std::string& path, double frame_rate) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);
  return read_csv(in, frame_rate);
}

}  // namespace dvgan
