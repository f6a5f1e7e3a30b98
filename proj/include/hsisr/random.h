#ifndef HSISR_RANDOM_H_
#define HSISR_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hsisr {

using Rng = std::mt19937_64;

// Seeds a generator from a master seed plus any number of stream indices
// (sample number, epoch, ...). Distinct index tuples give independent streams.
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

// Derives a 64-bit child seed; used where a seed has to be recorded in a file.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace hsisr

#endif  // HSISR_RANDOM_H_
