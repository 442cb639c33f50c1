#include "dvgan/bvh.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dvgan {

bool is_rotation(Channel c) {
  return c == Channel::Xrotation || c == Channel::Yrotation || c == Channel::Zrotation;
}

std::string channel_name(Channel c) {
  switch (c) {
    case Channel::Xposition: return "Xposition";
    case Channel::Yposition: return "Yposition";
    case Channel::Zposition: return "Zposition";
    case Channel::Xrotation: return "Xrotation";
    case Channel::Yrotation: return "Yrotation";
    default: return "Zrotation";
  }
}

Channel channel_from_name(const std::string& name, int line) {
  if (name == "Xposition") return Channel::Xposition;
  if (name == "Yposition") return Channel::Yposition;
  if (name == "Zposition") return Channel::Zposition;
  if (name == "Xrotation") return Channel::Xrotation;
  if (name == "Yrotation") return Channel::Yrotation;
  if (name == "Zrotation") return Channel::Zrotation;
  throw ParseError(line, "unknown channel label '" + name + "'");
}

int Skeleton::total_channels() const {
  int n = 0;
  for (const auto& j : joints) n += static_cast<int>(j.channels.size());
  return n;
}

int Skeleton::channel_offset(int j) const {
  int n = 0;
  for (int i = 0; i < j; ++i) n += static_cast<int>(joints[i].channels.size());
  return n;
}

bool Skeleton::operator==(const Skeleton& other) const {
  if (joints.size() != other.joints.size()) return false;
  for (size_t i = 0; i < joints.size(); ++i) {
    const Joint& a = joints[i];
    const Joint& b = other.joints[i];
    if (a.name != b.name || a.parent != b.parent || a.channels != b.channels ||
        a.has_end_site != b.has_end_site)
      return false;
    if ((a.offset - b.offset).cwiseAbs().maxCoeff() > 1e-6) return false;
    if (a.has_end_site && (a.end_site - b.end_site).cwiseAbs().maxCoeff() > 1e-6) return false;
  }
  return true;
}

namespace {

// Whitespace-delimited token stream that tracks line numbers for errors.
class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) : in_(in) {}

  int line() const { return line_; }

  bool next(std::string& out) {
    out.clear();
    int c;
    while ((c = in_.get()) != EOF) {
      if (c == '\n') {
        ++line_;
        if (!out.empty()) { pending_newline_ = true; return true; }
      } else if (std::isspace(c)) {
        if (!out.empty()) return true;
      } else {
        out.push_back(static_cast<char>(c));
      }
    }
    return !out.empty();
  }

  std::string expect_any(const char* what) {
    std::string tok;
    if (!next(tok)) throw ParseError(line_, std::string("unexpected end of input, expected ") + what);
    return tok;
  }

  void expect(const std::string& keyword) {
    const std::string tok = expect_any(keyword.c_str());
    if (tok != keyword)
      throw ParseError(line_, "expected '" + keyword + "', got '" + tok + "'");
  }

  double expect_number(const char* what) {
    const std::string tok = expect_any(what);
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
      throw ParseError(line_, std::string("expected a number for ") + what + ", got '" + tok + "'");
    return value;
  }

  int expect_int(const char* what) {
    const double v = expect_number(what);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw ParseError(line_, std::string("expected an integer for ") + what);
    return i;
  }

 private:
  std::istream& in_;
  int line_ = 1;
  bool pending_newline_ = false;
};

void parse_offset(Tokenizer& tok, Eigen::Vector3d& offset) {
  tok.expect("OFFSET");
  for (int i = 0; i < 3; ++i) offset(i) = tok.expect_number("OFFSET component");
}

void parse_joint_body(Tokenizer& tok, Skeleton& skeleton, int joint_index);

void parse_joint(Tokenizer& tok, Skeleton& skeleton, int parent) {
  Joint joint;
  joint.name = tok.expect_any("joint name");
  joint.parent = parent;
  tok.expect("{");
  const int index = static_cast<int>(skeleton.joints.size());
  skeleton.joints.push_back(std::move(joint));
  parse_joint_body(tok, skeleton, index);
}

void parse_joint_body(Tokenizer& tok, Skeleton& skeleton, int joint_index) {
  parse_offset(tok, skeleton.joints[joint_index].offset);
  tok.expect("CHANNELS");
  const int n = tok.expect_int("channel count");
  if (n < 0 || n > 6) throw ParseError(tok.line(), "channel count out of range");
  for (int i = 0; i < n; ++i) {
    const std::string label = tok.expect_any("channel label");
    skeleton.joints[joint_index].channels.push_back(channel_from_name(label, tok.line()));
  }
  while (true) {
    const std::string tok_str = tok.expect_any("JOINT, End Site or '}'");
    if (tok_str == "}") return;
    if (tok_str == "JOINT") {
      parse_joint(tok, skeleton, joint_index);
    } else if (tok_str == "End") {
      tok.expect("Site");
      tok.expect("{");
      skeleton.joints[joint_index].has_end_site = true;
      parse_offset(tok, skeleton.joints[joint_index].end_site);
      tok.expect("}");
    } else {
      throw ParseError(tok.line(), "unexpected token '" + tok_str + "' in joint body");
    }
  }
}

}  // namespace

std::pair<Skeleton, MotionClip> parse_bvh(std::istream& in) {
  Tokenizer tok(in);
  Skeleton skeleton;

  tok.expect("HIERARCHY");
  tok.expect("ROOT");
  parse_joint(tok, skeleton, -1);

  tok.expect("MOTION");
  tok.expect("Frames:");
  const int frames = tok.expect_int("frame count");
  if (frames < 0) throw ParseError(tok.line(), "negative frame count");
  tok.expect("Frame");
  tok.expect("Time:");
  const double frame_time = tok.expect_number("frame time");
  if (!(frame_time > 0.0)) throw ParseError(tok.line(), "frame time must be positive");

  const int channels = skeleton.total_channels();
  MotionClip clip;
  clip.frame_rate = 1.0 / frame_time;
  clip.frames.resize(frames, channels);
  for (int f = 0; f < frames; ++f) {
    for (int c = 0; c < channels; ++c) {
      clip.frames(f, c) = tok.expect_number("frame value");
    }
  }
  std::string trailing;
  if (tok.next(trailing))
    throw ParseError(tok.line(), "trailing data after motion frames: channel-count mismatch?");
  clip.channel_names = skeleton_channel_names(skeleton);
  return {std::move(skeleton), std::move(clip)};
}

std::pair<Skeleton, MotionClip> parse_bvh_string(const std::string& text) {
  std::istringstream is(text);
  return parse_bvh(is);
}

std::pair<Skeleton, MotionClip> parse_bvh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open BVH file: " + path);
  return parse_bvh(in);
}

namespace {

void write_joint(std::ostream& out, const Skeleton& skeleton, int index, int depth) {
  const Joint& joint = skeleton.joints[index];
  const std::string pad(2 * static_cast<size_t>(depth), ' ');
  out << pad << (joint.parent < 0 ? "ROOT " : "JOINT ") << joint.name << "\n";
  out << pad << "{\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f", joint.offset(0), joint.offset(1), joint.offset(2));
  out << pad << "  OFFSET " << buf << "\n";
  out << pad << "  CHANNELS " << joint.channels.size();
  for (Channel c : joint.channels) out << ' ' << channel_name(c);
  out << "\n";
  for (size_t j = 0; j < skeleton.joints.size(); ++j) {
    if (skeleton.joints[j].parent == index) write_joint(out, skeleton, static_cast<int>(j), depth + 1);
  }
  if (joint.has_end_site) {
    out << pad << "  End Site\n" << pad << "  {\n";
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f", joint.end_site(0), joint.end_site(1), joint.end_site(2));
    out << pad << "    OFFSET " << buf << "\n";
    out << pad << "  }\n";
  }
  out << pad << "}\n";
}

}  // namespace

void write_bvh(std::ostream& out, const Skeleton& skeleton, const MotionClip& clip) {
  if (skeleton.joints.empty()) throw std::invalid_argument("write_bvh: empty skeleton");
  if (clip.frame_count() == 0) throw std::invalid_argument("write_bvh: clip has no frames");
  if (clip.dof() != skeleton.total_channels())
    throw std::invalid_argument("write_bvh: clip has " + std::to_string(clip.dof()) +
                                " channels, skeleton expects " +
                                std::to_string(skeleton.total_channels()));
  if (!(clip.frame_rate > 0.0)) throw std::invalid_argument("write_bvh: frame rate must be positive");

  out << "HIERARCHY\n";
  write_joint(out, skeleton, 0, 0);
  out << "MOTION\n";
  out << "Frames: " << clip.frame_count() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", 1.0 / clip.frame_rate);
  out << "Frame Time: " << buf << "\n";
  for (Eigen::Index f = 0; f < clip.frame_count(); ++f) {
    for (Eigen::Index c = 0; c < clip.dof(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.6f", clip.frames(f, c));
      out << (c ? " " : "") << buf;
    }
    out << "\n";
  }
}

std::string write_bvh_string(const Skeleton& skeleton, const MotionClip& clip) {
  std::ostringstream os;
  write_bvh(os, skeleton, clip);
  return os.str();
}

void write_bvh_file(const std::string& path, const Skeleton& skeleton, const MotionClip& clip) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_bvh(out, skeleton, clip);
}

std::vector<std::string> skeleton_channel_names(const Skeleton& skeleton) {
  std::vector<std::string> names;
  names.reserve(static_cast<size_t>(skeleton.total_channels()));
  for (const Joint& j : skeleton.joints)
    for (Channel c : j.channels) names.push_back(j.name + "." + channel_name(c));
  return names;
}

}  // namespace dvgan
