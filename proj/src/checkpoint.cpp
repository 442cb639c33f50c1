#include "dvgan/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dvgan {

namespace {

constexpr char kMagic[4] = {'D', 'V', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t read_u64(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const std::uint64_t n = read_u64(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("checkpoint: truncated string");
  return s;
}

void write_matrix(std::ostream& out, const Mat& m) {
  write_u64(out, static_cast<std::uint64_t>(m.rows()));
  write_u64(out, static_cast<std::uint64_t>(m.cols()));
  // Row-major element order, independent of Eigen's internal layout.
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  }
}

Mat read_matrix(std::istream& in) {
  const auto rows = static_cast<Eigen::Index>(read_u64(in));
  const auto cols = static_cast<Eigen::Index>(read_u64(in));
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof(double));
      if (!in) throw std::runtime_error("checkpoint: truncated matrix");
      m(r, c) = v;
    }
  }
  return m;
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + tmp);
    out.write(kMagic, 4);
    write_u64(out, kVersion);
    write_string(out, config_json);

    write_u64(out, params.all().size());
    for (const auto& [name, value] : params.all()) {
      write_string(out, name);
      write_matrix(out, value);
    }

    write_u64(out, optimizer_state.size());
    for (const auto& [name, slot] : optimizer_state) {
      write_string(out, name);
      write_u64(out, static_cast<std::uint64_t>(slot.t));
      write_matrix(out, slot.m);
      write_matrix(out, slot.v);
    }

    write_string(out, rng_state);
    if (!out) throw std::runtime_error("checkpoint: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("checkpoint: rename to " + path + " failed");
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != std::string(kMagic, 4))
    throw std::runtime_error("checkpoint: bad magic in " + path);
  const std::uint64_t version = read_u64(in);
  if (version != kVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));

  Checkpoint ck;
  ck.config_json = read_string(in);
  const std::uint64_t n_params = read_u64(in);
  for (std::uint64_t i = 0; i < n_params; ++i) {
    const std::string name = read_string(in);
    ck.params.all().emplace(name, read_matrix(in));
  }
  const std::uint64_t n_slots = read_u64(in);
  for (std::uint64_t i = 0; i < n_slots; ++i) {
    const std::string name = read_string(in);
    AdamOptimizer::Slot slot;
    slot.t = static_cast<long>(read_u64(in));
    slot.m = read_matrix(in);
    slot.v = read_matrix(in);
    ck.optimizer_state.emplace(name, std::move(slot));
  }
  ck.rng_state = read_string(in);
  return ck;
}

}  // namespace dvgan
