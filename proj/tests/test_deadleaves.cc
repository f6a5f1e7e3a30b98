#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

#include "hsisr/deadleaves.h"
#include "hsisr/error.h"
#include "hsisr/io.h"
#include "test_support.h"

using namespace hsisr;
using hsisr::testing::random_raster;
using hsisr::testing::ScratchDir;

namespace {

GeneratorConfig small_config(int h = 32, int w = 32, int m = 3) {
  GeneratorConfig c;
  c.height = h;
  c.width = w;
  c.materials = m;
  c.scale_factor = 2;
  return c;
}

std::string file_bytes(const std::filesystem::path& p) { return read_text_file(p); }

}  // namespace

TEST_CASE("leaf containment rotates the pixel center by -theta") {
  Leaf leaf{4.0, 2.0, 0.0, {1.0}, 10.0, 10.0};
  CHECK(leaf.contains(11.9, 10.9));
  CHECK_FALSE(leaf.contains(12.1, 10.0));
  CHECK_FALSE(leaf.contains(10.0, 11.1));
  leaf.theta_deg = 90.0;
  CHECK(leaf.contains(10.0, 11.9));
  CHECK_FALSE(leaf.contains(11.5, 10.0));
  leaf.theta_deg = 45.0;
  // (1.2, 1.2) from the center lies on the rotated long axis at distance 1.7.
  CHECK(leaf.contains(11.2, 11.2));
  CHECK_FALSE(leaf.contains(11.2, 8.8));
}

TEST_CASE("generator config rejects an empty side interval") {
  GeneratorConfig c = small_config(10, 10);
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = small_config(12, 12);
  CHECK_NOTHROW(c.validate());
  CHECK(c.max_side() == 4.0);
  c = small_config(33, 32);
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("sample_leaf: ranges and the uniform side mean") {
  const GeneratorConfig c = small_config(64, 64);
  const ValueSource values = ValueSource::dirichlet(3);
  Rng rng = make_rng(1);
  const int n = 100000;
  double sum_a = 0.0;
  for (int i = 0; i < n; ++i) {
    const Leaf leaf = sample_leaf(c, values, rng);
    REQUIRE(leaf.a >= c.min_side());
    REQUIRE(leaf.a <= c.max_side());
    REQUIRE(leaf.b >= c.min_side());
    REQUIRE(leaf.b <= c.max_side());
    REQUIRE(leaf.theta_deg >= 0.0);
    REQUIRE(leaf.theta_deg <= 45.0);
    REQUIRE(leaf.x >= 0.0);
    REQUIRE(leaf.x < 64.0);
    REQUIRE(leaf.y >= 0.0);
    REQUIRE(leaf.y < 64.0);
    sum_a += leaf.a;
  }
  const double expect = (c.min_side() + c.max_side()) / 2.0;
  CHECK(std::abs(sum_a / n - expect) / expect < 0.01);
}

TEST_CASE("empirical sampler: single pixel, clamping, and the binomial split") {
  AbundanceMap one(1, 1, 3, {0.2, 0.5, 0.3});
  Rng rng = make_rng(2);
  for (int i = 0; i < 100; ++i) {
    CHECK(value_sampler_empirical(one, rng) == std::vector<double>{0.2, 0.5, 0.3});
  }
  AbundanceMap wild(1, 1, 3, {1.3, -0.2, 0.4});
  CHECK(value_sampler_empirical(wild, rng) == std::vector<double>{1.0, 0.0, 0.4});

  AbundanceMap two(1, 2, 1, {0.0, 1.0});
  const int n = 10000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += value_sampler_empirical(two, rng)[0] == 1.0;
  // 3 sigma binomial band around n / 2.
  CHECK(std::abs(ones - n / 2) <= 3.0 * std::sqrt(n * 0.25));
}

TEST_CASE("dirichlet sampler: simplex, M=1, uniform marginal for M=2") {
  Rng rng = make_rng(3);
  CHECK(value_sampler_dirichlet(1, rng) == std::vector<double>{1.0});
  for (int i = 0; i < 1000; ++i) {
    const auto v = value_sampler_dirichlet(5, rng);
    double s = 0.0;
    for (double x : v) {
      CHECK(x >= 0.0);
      s += x;
    }
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
  const int n = 100000;
  std::vector<double> first(n);
  for (double& x : first) x = value_sampler_dirichlet(2, rng)[0];
  std::sort(first.begin(), first.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    ks = std::max({ks, std::abs((i + 1.0) / n - first[i]), std::abs(first[i] - double(i) / n)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("generate_abundance: single-pixel source gives a constant map") {
  AbundanceMap one(1, 1, 2, {0.25, 0.75});
  Rng rng = make_rng(4);
  const AbundanceMap a = generate_abundance(small_config(16, 16, 2), ValueSource::empirical(one), rng);
  for (std::size_t p = 0; p < a.pixel_count(); ++p) {
    CHECK(a.pixel(p)[0] == 0.25);
    CHECK(a.pixel(p)[1] == 0.75);
  }
}

TEST_CASE("generate_abundance: every pixel written once, values from the source") {
  const auto source = random_raster<AbundanceTag>(5, 5, 3, 5, -0.3, 1.3);
  const ValueSource values = ValueSource::empirical(source);
  std::set<std::vector<double>> allowed;
  for (std::size_t p = 0; p < source.pixel_count(); ++p) {
    std::vector<double> v(source.pixel(p).begin(), source.pixel(p).end());
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    allowed.insert(v);
  }
  const GeneratorConfig c = small_config();
  Rng rng = make_rng(6);
  DeadLeavesCanvas canvas(c.height, c.width, c.materials);
  std::size_t painted = 0;
  while (!canvas.complete()) painted += canvas.drop(sample_leaf(c, values, rng));
  CHECK(painted == static_cast<std::size_t>(c.height * c.width));
  for (std::size_t p = 0; p < canvas.map().pixel_count(); ++p) {
    const auto px = canvas.map().pixel(p);
    CHECK(allowed.count(std::vector<double>(px.begin(), px.end())) == 1);
  }
}

TEST_CASE("occlusion: stopping one leaf early covers a subset with equal values") {
  const GeneratorConfig c = small_config();
  const ValueSource values = ValueSource::dirichlet(3);
  std::vector<Leaf> leaves;
  {
    Rng rng = make_rng(7);
    DeadLeavesCanvas canvas(c.height, c.width, c.materials);
    while (!canvas.complete()) {
      leaves.push_back(sample_leaf(c, values, rng));
      canvas.drop(leaves.back());
    }
  }
  REQUIRE(leaves.size() > 2);
  DeadLeavesCanvas full(c.height, c.width, c.materials), early(c.height, c.width, c.materials);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    full.drop(leaves[i]);
    if (i + 1 < leaves.size()) early.drop(leaves[i]);
  }
  CHECK(early.covered() < full.covered());
  for (std::size_t p = 0; p < early.mask().size(); ++p) {
    if (!early.mask()[p]) continue;
    CHECK(full.mask()[p]);
    const auto a = early.map().pixel(p);
    const auto b = full.map().pixel(p);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST_CASE("generate_pair: LR is degrade(HR) and shapes follow the scale") {
  const GeneratorConfig c = small_config(16, 16, 3);
  const DegradationSpec spec = DegradationSpec::for_scale(2);
  Rng rng = make_rng(8);
  const AbundancePair pair = generate_pair(c, ValueSource::dirichlet(3), spec, rng);
  CHECK(pair.lr.height() == 8);
  CHECK(pair.lr.width() == 8);
  CHECK(pair.lr == degrade(pair.hr, spec));
  CHECK_THROWS_AS(generate_pair(c, ValueSource::dirichlet(3), DegradationSpec::for_scale(4), rng),
                  InvalidArgument);

  AbundanceMap one(1, 1, 3, {0.1, 0.2, 0.7});
  const AbundancePair flat = generate_pair(c, ValueSource::empirical(one), spec, rng);
  for (std::size_t p = 0; p < flat.lr.pixel_count(); ++p) {
    CHECK(std::abs(flat.lr.pixel(p)[2] - 0.7) < 1e-14);
  }
}

TEST_CASE("noisy flags: exact fractions") {
  int flagged = 0;
  for (std::size_t i = 0; i < 10; ++i) flagged += is_noisy_index(i, 0.5);
  CHECK(flagged == 5);
  flagged = 0;
  for (std::size_t i = 0; i < 200; ++i) flagged += is_noisy_index(i, 0.25);
  CHECK(flagged == 50);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK_FALSE(is_noisy_index(i, 0.0));
    CHECK(is_noisy_index(i, 1.0));
  }
}

TEST_CASE("generate_dataset: layout, determinism, reload") {
  ScratchDir a("dl_a"), b("dl_b");
  GeneratorConfig c = small_config(16, 16, 3);
  c.seed = 99;
  c.value_mode = ValueMode::kDirichlet;
  const DegradationSpec spec = DegradationSpec::for_scale(2);
  const ValueSource values = ValueSource::dirichlet(3);
  const DatasetInfo info = generate_dataset(c, values, spec, 4, a.path());
  generate_dataset(c, values, spec, 4, b.path());
  CHECK(info.count == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (const char* prefix : {"hr", "lr"}) {
      const auto f = dataset_file(a.path(), prefix, i);
      CHECK(std::filesystem::exists(header_path(f)));
      CHECK(file_bytes(payload_path(f)) == file_bytes(payload_path(dataset_file(b.path(), prefix, i))));
    }
    const RasterHeader hr = read_raster_header(dataset_file(a.path(), "hr", i));
    const RasterHeader lr = read_raster_header(dataset_file(a.path(), "lr", i));
    CHECK(hr.height == 16);
    CHECK(hr.channels == 3);
    CHECK(lr.height == 8);
    CHECK(lr.width == 8);
  }
  CHECK(file_bytes(a / "meta.json") == file_bytes(b / "meta.json"));
  CHECK(dataset_file(a.path(), "hr", 3).filename() == "hr_00003");

  const Dataset ds = load_dataset(a.path());
  CHECK(ds.pairs.size() == 4);
  CHECK(ds.noisy == std::vector<bool>{false, true, false, true});
  CHECK(ds.degradation.scale == 2);
  CHECK(ds.config.seed == 99);

  // A sample regenerated from its recorded stream matches the file.
  Rng rng = sample_rng(99, 2);
  const AbundancePair again = generate_pair(c, values, spec, rng);
  AbundanceMap rounded = again.hr;
  for (double& v : rounded.data()) v = static_cast<float>(v);
  CHECK(rounded == ds.pairs[2].hr);
}

TEST_CASE("generate_abundance: 200 empirical generations terminate with full coverage") {
  const auto source = random_raster<AbundanceTag>(8, 8, 3, 9);
  const ValueSource values = ValueSource::empirical(source);
  const GeneratorConfig c = small_config();
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng = make_rng(10, {s});
    DeadLeavesCanvas canvas(c.height, c.width, c.materials);
    while (!canvas.complete() && canvas.leaves() < kMaxLeaves) canvas.drop(sample_leaf(c, values, rng));
    CHECK(canvas.complete());
  }
}
