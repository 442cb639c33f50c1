#pragma once

#include "dvgan/params.hpp"
#include "dvgan/rng.hpp"

#include <string>

namespace dvgan {

// Self-describing training snapshot: a JSON config blob, named parameter
// arrays with shapes, optimizer moments, and the RNG state. Doubles are
// stored as raw little-endian bytes so save/load round-trips bitwise.
struct Checkpoint {
  std::string config_json;
  ParameterStore params;
  std::map<std::string, AdamOptimizer::Slot> optimizer_state;
  std::string rng_state;

  void save(const std::string& path) const;  // write-temp-then-rename
  static Checkpoint load(const std::string& path);
};

}  // namespace dvgan
