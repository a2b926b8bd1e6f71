#include "scengame/sampling.hpp"

namespace scengame {

UniformBox& UniformBox::add_block(const std::string& name, int count, Interval range) {
  blocks.push_back(Block{name, count});
  coords.insert(coords.end(), static_cast<std::size_t>(count), range);
  return *this;
}

double unit_uniform(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  // splitmix64 finaliser over the root mixed with the stream index.
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace scengame
