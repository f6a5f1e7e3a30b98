#ifndef HSISR_DEADLEAVES_H_
#define HSISR_DEADLEAVES_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <variant>
#include <vector>

#include "hsisr/degradation.h"
#include "hsisr/random.h"
#include "hsisr/raster.h"

namespace hsisr {

// One rectangular leaf: sides a (along x) and b (along y), rotation in
// degrees, center (x, y) in pixel units with pixel (row, col) centered at
// (col + 0.5, row + 0.5), and the abundance vector it paints.
struct Leaf {
  double a = 0.0;
  double b = 0.0;
  double theta_deg = 0.0;
  std::vector<double> value;
  double x = 0.0;
  double y = 0.0;

  // True when the point, rotated by -theta about the center, falls inside
  // the axis-aligned a x b box.
  bool contains(double px, double py) const;
};

enum class ValueMode { kEmpirical, kDirichlet };

ValueMode parse_value_mode(std::string_view name);
std::string_view to_string(ValueMode mode);

struct GeneratorConfig {
  int height = 64;
  int width = 64;
  int materials = 6;
  int scale_factor = 2;
  ValueMode value_mode = ValueMode::kEmpirical;
  std::uint64_t seed = 0;
  double noisy_fraction = 0.5;

  // Leaf side interval [2 * scale_factor, min(H, W) / 3], both ends closed.
  double min_side() const { return 2.0 * scale_factor; }
  double max_side() const;

  void validate() const;
};

inline constexpr std::size_t kMaxLeaves = 1'000'000;

// Uniformly chosen pixel vector of `source`, clamped entrywise to [0, 1].
std::vector<double> value_sampler_empirical(const AbundanceMap& source, Rng& rng);

// Uniform draw on the probability simplex (normalized unit exponentials).
std::vector<double> value_sampler_dirichlet(int materials, Rng& rng);

// Where leaf abundance vectors come from.
class ValueSource {
 public:
  static ValueSource empirical(AbundanceMap source);
  static ValueSource dirichlet(int materials);

  ValueMode mode() const;
  int materials() const;
  std::vector<double> draw(Rng& rng) const;
  // Only meaningful for empirical sources.
  const AbundanceMap& source_map() const;

 private:
  struct Dirichlet {
    int materials;
  };
  explicit ValueSource(std::variant<AbundanceMap, Dirichlet> impl)
      : impl_(std::move(impl)) {}

  std::variant<AbundanceMap, Dirichlet> impl_;
};

// Draw order: a, b, theta, x, y, then the value vector.
Leaf sample_leaf(const GeneratorConfig& config, const ValueSource& values,
                 Rng& rng);

// Occlusion canvas. Leaves are laid down beneath the earlier ones: a drop
// only paints pixels that are still uncovered, writing every material of a
// pixel at once.
class DeadLeavesCanvas {
 public:
  DeadLeavesCanvas(int height, int width, int materials);

  // Returns the number of newly covered pixels.
  std::size_t drop(const Leaf& leaf);

  bool complete() const { return covered_ == mask_.size(); }
  std::size_t covered() const { return covered_; }
  std::size_t leaves() const { return leaves_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  const AbundanceMap& map() const { return map_; }
  AbundanceMap take() && { return std::move(map_); }

 private:
  AbundanceMap map_;
  std::vector<std::uint8_t> mask_;
  std::size_t covered_ = 0;
  std::size_t leaves_ = 0;
};

// Drops leaves until every pixel is covered. Throws NumericalError after
// kMaxLeaves leaves.
AbundanceMap generate_abundance(const GeneratorConfig& config,
                                const ValueSource& values, Rng& rng);

struct AbundancePair {
  AbundanceMap hr;
  AbundanceMap lr;
};

AbundancePair generate_pair(const GeneratorConfig& config,
                            const ValueSource& values,
                            const DegradationSpec& spec, Rng& rng);

// Sample i is flagged noisy when floor((i+1) f) > floor(i f); for f = 0.5
// that is every odd index, and exactly floor(n f) of n samples are flagged.
bool is_noisy_index(std::size_t index, double fraction);

// Generator stream for sample `index` of a dataset seeded with `seed`.
Rng sample_rng(std::uint64_t seed, std::size_t index);

// Dataset layout:
//   <dir>/meta.json            config, seed, count, flags array
//   <dir>/hr_%05d.{json,raw}   A_DL,HR
//   <dir>/lr_%05d.{json,raw}   A_DL,LR
struct DatasetInfo {
  std::filesystem::path directory;
  std::size_t count = 0;
  std::vector<bool> noisy;
};

DatasetInfo generate_dataset(const GeneratorConfig& config,
                             const ValueSource& values,
                             const DegradationSpec& spec, std::size_t count,
                             const std::filesystem::path& directory);

struct Dataset {
  GeneratorConfig config;
  DegradationSpec degradation;
  std::vector<AbundancePair> pairs;
  std::vector<bool> noisy;
};

Dataset load_dataset(const std::filesystem::path& directory);

std::filesystem::path dataset_file(const std::filesystem::path& directory,
                                   std::string_view prefix, std::size_t index);

}  // namespace hsisr

#endif  // HSISR_DEADLEAVES_H_
