#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scengame/types.hpp"

namespace scengame {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Coordinate-wise uniform distribution over a box. Blocks name contiguous
// coordinate ranges (e.g. "P1", "b1"); they document the packing order and do
// not change the draw.
struct UniformBox {
  struct Block {
    std::string name;
    int size = 0;
  };

  std::string id;
  std::vector<Interval> coords;
  std::vector<Block> blocks;

  int dim() const { return static_cast<int>(coords.size()); }

  // Appends `count` coordinates sharing one range under a block name.
  UniformBox& add_block(const std::string& name, int count, Interval range);
};

// Maps a 64-bit generator output to [0, 1) with 53 random bits; the mapping is
// fixed so streams are reproducible across standard libraries.
double unit_uniform(std::uint64_t bits);

// Derives an independent child seed for a named consumer of the root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace scengame
