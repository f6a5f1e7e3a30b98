#include "hsisr/random.h"

#include <vector>

namespace hsisr {
namespace {

void push_words(std::vector<std::uint32_t>& words, std::uint64_t value) {
  words.push_back(static_cast<std::uint32_t>(value & 0xffffffffu));
  words.push_back(static_cast<std::uint32_t>(value >> 32));
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  push_words(words, seed);
  // Length marker keeps (s) and (s, 0) apart.
  push_words(words, stream.size());
  for (std::uint64_t s : stream) push_words(words, s);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
  Rng rng = make_rng(seed, {index});
  return rng();
}

}  // namespace hsisr
