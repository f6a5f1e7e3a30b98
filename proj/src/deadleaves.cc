#include "hsisr/deadleaves.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "json.hpp"

#include "hsisr/error.h"
#include "hsisr/io.h"

namespace hsisr {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

double uniform_closed(double lo, double hi, Rng& rng) {
  if (lo == hi) return lo;
  std::uniform_real_distribution<double> d(
      lo, std::nextafter(hi, std::numeric_limits<double>::infinity()));
  return std::min(d(rng), hi);
}

ordered_json config_to_json(const GeneratorConfig& c) {
  ordered_json j;
  j["height"] = c.height;
  j["width"] = c.width;
  j["materials"] = c.materials;
  j["scale_factor"] = c.scale_factor;
  j["value_mode"] = std::string(to_string(c.value_mode));
  j["seed"] = c.seed;
  j["noisy_fraction"] = c.noisy_fraction;
  return j;
}

GeneratorConfig config_from_json(const ordered_json& j) {
  GeneratorConfig c;
  c.height = j.at("height").get<int>();
  c.width = j.at("width").get<int>();
  c.materials = j.at("materials").get<int>();
  c.scale_factor = j.at("scale_factor").get<int>();
  c.value_mode = parse_value_mode(j.at("value_mode").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.noisy_fraction = j.at("noisy_fraction").get<double>();
  return c;
}

}  // namespace

bool Leaf::contains(double px, double py) const {
  const double t = theta_deg * std::numbers::pi / 180.0;
  const double c = std::cos(t);
  const double s = std::sin(t);
  const double dx = px - x;
  const double dy = py - y;
  const double u = dx * c + dy * s;
  const double v = -dx * s + dy * c;
  return std::abs(u) <= 0.5 * a && std::abs(v) <= 0.5 * b;
}

ValueMode parse_value_mode(std::string_view name) {
  if (name == "empirical") return ValueMode::kEmpirical;
  if (name == "dirichlet") return ValueMode::kDirichlet;
  throw InvalidArgument("unknown value mode \"" + std::string(name) +
                        "\" (expected empirical or dirichlet)");
}

std::string_view to_string(ValueMode mode) {
  return mode == ValueMode::kEmpirical ? "empirical" : "dirichlet";
}

double GeneratorConfig::max_side() const {
  return std::min(height, width) / 3.0;
}

void GeneratorConfig::validate() const {
  if (height < 1 || width < 1) throw InvalidArgument("generator size must be positive");
  if (materials < 1) throw InvalidArgument("generator needs at least one material");
  if (scale_factor < 1) throw InvalidArgument("scale factor must be >= 1");
  if (max_side() < min_side()) {
    throw InvalidArgument(
        "empty leaf size interval [" + std::to_string(min_side()) + ", " +
        std::to_string(max_side()) + "]: min(H,W)/3 must be >= 2*scale");
  }
  if (height % scale_factor != 0 || width % scale_factor != 0) {
    throw InvalidArgument("generator size must be divisible by the scale factor");
  }
  if (!(noisy_fraction >= 0.0 && noisy_fraction <= 1.0)) {
    throw InvalidArgument("noisy_fraction must lie in [0, 1]");
  }
}

std::vector<double> value_sampler_empirical(const AbundanceMap& source,
                                            Rng& rng) {
  if (source.empty()) throw InvalidArgument("empirical value source is empty");
  std::uniform_int_distribution<std::size_t> pick(0, source.pixel_count() - 1);
  const auto px = source.pixel(pick(rng));
  std::vector<double> v(px.begin(), px.end());
  for (double& e : v) e = std::clamp(e, 0.0, 1.0);
  return v;
}

std::vector<double> value_sampler_dirichlet(int materials, Rng& rng) {
  if (materials < 1) throw InvalidArgument("Dirichlet sampler needs M >= 1");
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> v(materials);
  double sum = 0.0;
  for (double& e : v) {
    e = exp1(rng);
    sum += e;
  }
  // A zero sum needs every draw to be exactly 0; redraw in that case.
  while (sum == 0.0) {
    sum = 0.0;
    for (double& e : v) {
      e = exp1(rng);
      sum += e;
    }
  }
  for (double& e : v) e /= sum;
  return v;
}

ValueSource ValueSource::empirical(AbundanceMap source) {
  if (source.empty()) throw InvalidArgument("empirical value source is empty");
  return ValueSource(std::move(source));
}

ValueSource ValueSource::dirichlet(int materials) {
  if (materials < 1) throw InvalidArgument("Dirichlet sampler needs M >= 1");
  return ValueSource(Dirichlet{materials});
}

ValueMode ValueSource::mode() const {
  return std::holds_alternative<AbundanceMap>(impl_) ? ValueMode::kEmpirical
                                                      : ValueMode::kDirichlet;
}

int ValueSource::materials() const {
  if (const auto* map = std::get_if<AbundanceMap>(&impl_)) return map->channels();
  return std::get<Dirichlet>(impl_).materials;
}

std::vector<double> ValueSource::draw(Rng& rng) const {
  if (const auto* map = std::get_if<AbundanceMap>(&impl_)) {
    return value_sampler_empirical(*map, rng);
  }
  return value_sampler_dirichlet(std::get<Dirichlet>(impl_).materials, rng);
}

const AbundanceMap& ValueSource::source_map() const {
  if (const auto* map = std::get_if<AbundanceMap>(&impl_)) return *map;
  throw InvalidArgument("Dirichlet value source has no source map");
}

Leaf sample_leaf(const GeneratorConfig& config, const ValueSource& values,
                 Rng& rng) {
  config.validate();
  if (values.materials() != config.materials) {
    throw InvalidArgument("value source has " +
                          std::to_string(values.materials()) +
                          " materials, generator expects " +
                          std::to_string(config.materials));
  }
  Leaf leaf;
  leaf.a = uniform_closed(config.min_side(), config.max_side(), rng);
  leaf.b = uniform_closed(config.min_side(), config.max_side(), rng);
  leaf.theta_deg = uniform_closed(0.0, 45.0, rng);
  leaf.x = std::uniform_real_distribution<double>(0.0, config.width)(rng);
  leaf.y = std::uniform_real_distribution<double>(0.0, config.height)(rng);
  leaf.value = values.draw(rng);
  return leaf;
}

DeadLeavesCanvas::DeadLeavesCanvas(int height, int width, int materials)
    : map_(height, width, materials),
      mask_(static_cast<std::size_t>(height) * width, 0) {}

std::size_t DeadLeavesCanvas::drop(const Leaf& leaf) {
  if (static_cast<int>(leaf.value.size()) != map_.channels()) {
    throw InvalidArgument("leaf value length does not match canvas materials");
  }
  ++leaves_;
  const double t = leaf.theta_deg * std::numbers::pi / 180.0;
  const double c = std::abs(std::cos(t));
  const double s = std::abs(std::sin(t));
  const double ex = 0.5 * leaf.a * c + 0.5 * leaf.b * s;
  const double ey = 0.5 * leaf.a * s + 0.5 * leaf.b * c;

  const int h = map_.height();
  const int w = map_.width();
  // Bounding box padded by one pixel; contains() has the final say.
  const int col0 = std::max(0, static_cast<int>(std::floor(leaf.x - ex - 0.5)) - 1);
  const int col1 = std::min(w - 1, static_cast<int>(std::ceil(leaf.x + ex - 0.5)) + 1);
  const int row0 = std::max(0, static_cast<int>(std::floor(leaf.y - ey - 0.5)) - 1);
  const int row1 = std::min(h - 1, static_cast<int>(std::ceil(leaf.y + ey - 0.5)) + 1);

  std::size_t painted = 0;
  for (int r = row0; r <= row1; ++r) {
    for (int col = col0; col <= col1; ++col) {
      const std::size_t p = static_cast<std::size_t>(r) * w + col;
      if (mask_[p]) continue;
      if (!leaf.contains(col + 0.5, r + 0.5)) continue;
      std::copy(leaf.value.begin(), leaf.value.end(), map_.pixel(p).begin());
      mask_[p] = 1;
      ++painted;
    }
  }
  covered_ += painted;
  return painted;
}

AbundanceMap generate_abundance(const GeneratorConfig& config,
                                const ValueSource& values, Rng& rng) {
  config.validate();
  DeadLeavesCanvas canvas(config.height, config.width, config.materials);
  while (!canvas.complete()) {
    if (canvas.leaves() >= kMaxLeaves) {
      throw NumericalError("dead leaves generation did not cover the image after " +
                           std::to_string(kMaxLeaves) + " leaves (" +
                           std::to_string(canvas.covered()) + " of " +
                           std::to_string(canvas.mask().size()) +
                           " pixels covered)");
    }
    canvas.drop(sample_leaf(config, values, rng));
  }
  return std::move(canvas).take();
}

AbundancePair generate_pair(const GeneratorConfig& config,
                            const ValueSource& values,
                            const DegradationSpec& spec, Rng& rng) {
  if (spec.scale != config.scale_factor) {
    throw InvalidArgument("degradation scale " + std::to_string(spec.scale) +
                          " differs from generator scale factor " +
                          std::to_string(config.scale_factor));
  }
  AbundancePair pair;
  pair.hr = generate_abundance(config, values, rng);
  pair.lr = degrade(pair.hr, spec);
  return pair;
}

bool is_noisy_index(std::size_t index, double fraction) {
  const auto before = static_cast<long long>(std::floor(index * fraction));
  const auto after = static_cast<long long>(std::floor((index + 1) * fraction));
  return after > before;
}

Rng sample_rng(std::uint64_t seed, std::size_t index) {
  return make_rng(child_seed(seed, index));
}

fs::path dataset_file(const fs::path& directory, std::string_view prefix,
                      std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof(name), "%.*s_%05zu", static_cast<int>(prefix.size()),
                prefix.data(), index);
  return directory / name;
}

DatasetInfo generate_dataset(const GeneratorConfig& config,
                             const ValueSource& values,
                             const DegradationSpec& spec, std::size_t count,
                             const fs::path& directory) {
  config.validate();
  spec.validate();
  if (count < 1) throw InvalidArgument("dataset size must be >= 1");
  if (values.mode() != config.value_mode) {
    throw InvalidArgument("value source mode does not match generator config");
  }
  fs::create_directories(directory);

  DatasetInfo info;
  info.directory = directory;
  info.count = count;
  ordered_json seeds = ordered_json::array();
  ordered_json flags = ordered_json::array();
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = sample_rng(config.seed, i);
    AbundancePair pair = generate_pair(config, values, spec, rng);
    try {
      save_abundance(pair.hr, dataset_file(directory, "hr", i));
      save_abundance(pair.lr, dataset_file(directory, "lr", i));
    } catch (const Error& e) {
      throw InvalidArgument("dataset sample " + std::to_string(i) + ": " + e.what());
    }
    const bool noisy = is_noisy_index(i, config.noisy_fraction);
    info.noisy.push_back(noisy);
    flags.push_back(noisy);
    seeds.push_back(child_seed(config.seed, i));
  }

  ordered_json meta;
  meta["generator"] = config_to_json(config);
  meta["degradation"] = {{"scale", spec.scale}, {"blur_sigma", spec.blur_sigma}};
  meta["count"] = count;
  meta["noisy"] = flags;
  meta["sample_seeds"] = seeds;
  write_text_file(directory / "meta.json", meta.dump(2) + "\n");
  return info;
}

Dataset load_dataset(const fs::path& directory) {
  const fs::path meta_path = directory / "meta.json";
  const std::string text = read_text_file(meta_path);

  ordered_json meta;
  try {
    meta = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(meta_path.string(), e.byte, "invalid dataset manifest");
  }

  Dataset ds;
  try {
    ds.config = config_from_json(meta.at("generator"));
    ds.degradation.scale = meta.at("degradation").at("scale").get<int>();
    ds.degradation.blur_sigma = meta.at("degradation").at("blur_sigma").get<double>();
    const auto count = meta.at("count").get<std::size_t>();
    for (const auto& flag : meta.at("noisy")) ds.noisy.push_back(flag.get<bool>());
    if (ds.noisy.size() != count) {
      throw FormatError(meta_path.string(), 0, "flags array length differs from count");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(meta_path.string(), 0, std::string("bad manifest: ") + e.what());
  }

  for (std::size_t i = 0; i < ds.noisy.size(); ++i) {
    AbundancePair pair{load_abundance(dataset_file(directory, "hr", i)),
                       load_abundance(dataset_file(directory, "lr", i))};
    if (pair.hr.height() != pair.lr.height() * ds.degradation.scale ||
        pair.hr.width() != pair.lr.width() * ds.degradation.scale ||
        pair.hr.channels() != pair.lr.channels()) {
      throw FormatError(header_path(dataset_file(directory, "lr", i)).string(), 0,
                        "sample " + std::to_string(i) +
                            ": LR/HR shapes are inconsistent with the scale");
    }
    ds.pairs.push_back(std::move(pair));
  }
  return ds;
}

}  // namespace hsisr
