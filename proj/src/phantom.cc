#include "hsisr/phantom.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsisr/deadleaves.h"
#include "hsisr/error.h"
#include "hsisr/io.h"
#include "hsisr/random.h"

namespace hsisr {
namespace {

constexpr std::uint64_t kSpectraStream = 0;
constexpr std::uint64_t kAbundanceStream = 1;

}  // namespace

void PhantomConfig::validate() const {
  if (height < 1 || width < 1 || bands < 1 || materials < 1) {
    throw InvalidArgument("phantom dimensions must be positive");
  }
  if (materials > bands) {
    throw InvalidArgument("phantom needs materials <= bands (got M=" +
                          std::to_string(materials) +
                          ", L=" + std::to_string(bands) + ")");
  }
  if (materials > height * width) {
    throw InvalidArgument("phantom has fewer pixels than materials");
  }
  DegradationSpec::for_scale(scale).validate();
  check_degradable(height, width, DegradationSpec::for_scale(scale));
}

Eigen::MatrixXd phantom_spectra(int materials, int bands, std::uint64_t seed) {
  Rng rng = make_rng(seed, {kSpectraStream});
  const double last = std::max(1, bands - 1);
  std::uniform_int_distribution<int> bump_count(2, 3);
  std::uniform_real_distribution<double> center(0.0, last);
  std::uniform_real_distribution<double> width(0.05 * last + 0.5, 0.25 * last + 1.0);
  std::uniform_real_distribution<double> height(0.2, 1.0);

  Eigen::MatrixXd s(materials, bands);
  for (int m = 0; m < materials; ++m) {
    const int n = bump_count(rng);
    std::vector<double> c(n), w(n), h(n);
    for (int k = 0; k < n; ++k) {
      c[k] = center(rng);
      w[k] = width(rng);
      h[k] = height(rng);
    }
    Eigen::VectorXd g(bands);
    for (int l = 0; l < bands; ++l) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) {
        const double t = (l - c[k]) / w[k];
        v += h[k] * std::exp(-0.5 * t * t);
      }
      g(l) = v;
    }
    s.row(m) = (0.05 + 0.95 * (g / g.maxCoeff()).array()).matrix().transpose();
  }
  return s;
}

std::vector<std::pair<int, int>> pure_pixel_sites(int height, int width,
                                                  int materials) {
  std::vector<std::pair<int, int>> sites;
  for (int k = 0; k < materials; ++k) {
    const int row = static_cast<int>((2LL * k + 1) * height / (2LL * materials));
    const int col = static_cast<int>((2LL * k + 1) * width / (2LL * materials));
    sites.emplace_back(row, col);
  }
  // Tiny images can collapse two sites onto one pixel; fall back to scan order.
  std::sort(sites.begin(), sites.end());
  if (std::adjacent_find(sites.begin(), sites.end()) != sites.end()) {
    sites.clear();
    for (int k = 0; k < materials; ++k) sites.emplace_back(k / width, k % width);
  }
  return sites;
}

Phantom make_phantom(const PhantomConfig& config) {
  config.validate();
  EndmemberMatrix spectra(phantom_spectra(config.materials, config.bands, config.seed));

  GeneratorConfig gen;
  gen.height = config.height;
  gen.width = config.width;
  gen.materials = config.materials;
  gen.scale_factor = config.scale;
  gen.value_mode = ValueMode::kDirichlet;
  gen.seed = config.seed;
  // Leaves no larger than a third of the short side; for very small phantoms
  // the side interval degenerates, so clamp it to stay valid.
  if (gen.max_side() < gen.min_side()) gen.scale_factor = 1;
  Rng rng = make_rng(config.seed, {kAbundanceStream});
  AbundanceMap a = generate_abundance(gen, ValueSource::dirichlet(config.materials), rng);

  const auto sites = pure_pixel_sites(config.height, config.width, config.materials);
  for (int m = 0; m < config.materials; ++m) {
    auto px = a.pixel(sites[m].first, sites[m].second);
    std::fill(px.begin(), px.end(), 0.0);
    px[m] = 1.0;
  }

  SpectralCube hr = reconstruct(a, spectra);
  SpectralCube lr = degrade(hr, DegradationSpec::for_scale(config.scale));
  return Phantom{std::move(hr), std::move(lr), std::move(a), std::move(spectra),
                 sites};
}

void save_phantom(const Phantom& phantom, const std::filesystem::path& directory) {
  save_cube(phantom.hsi_hr, directory / "hsi_hr");
  save_cube(phantom.hsi_lr, directory / "hsi_lr");
  save_abundance(phantom.a_hr, directory / "a_hr_gt");
  save_endmembers(phantom.spectra, directory / "s_gt.csv");
}

}  // namespace hsisr
