// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass criterion numbers as arguments to run a subset. The
// lines are also written to acceptance_report.txt in the working directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gradcheck.h"
#include "hsisr/checkpoint.h"
#include "hsisr/deadleaves.h"
#include "hsisr/degradation.h"
#include "hsisr/endmembers.h"
#include "hsisr/io.h"
#include "hsisr/metrics.h"
#include "hsisr/noise.h"
#include "hsisr/phantom.h"
#include "hsisr/pipeline.h"
#include "hsisr/trainer.h"
#include "hsisr/unmixing.h"
#include "test_support.h"

using namespace hsisr;
using namespace hsisr::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  double budget_s = 0.0;
  double extra_s = 0.0;  // time spent elsewhere that counts toward the budget
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1: LS(X + N) - LS(X) = N S+.
Outcome criterion_ls_identity() {
  const EndmemberMatrix s(random_matrix(4, 20, 101));
  const auto a = random_raster<AbundanceTag>(32, 32, 4, 102);
  const SpectralCube x = reconstruct(a, s);
  const auto n = random_raster<SpectralTag>(32, 32, 20, 103, -0.1, 0.1);
  SpectralCube xn = x;
  for (std::size_t i = 0; i < xn.size(); ++i) xn.data()[i] += n.data()[i];
  const AbundanceMap d1 = estimate_abundances_ls(xn, s);
  const AbundanceMap d0 = estimate_abundances_ls(x, s);
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < n.pixel_count(); ++p) {
    for (int m = 0; m < 4; ++m) {
      double expect = 0.0;
      for (int l = 0; l < 20; ++l) expect += n.pixel(p)[l] * s.pinv()(l, m);
      num = std::max(num, std::abs(d1.pixel(p)[m] - d0.pixel(p)[m] - expect));
      den = std::max(den, std::abs(expect));
    }
  }
  const double rel = num / den;
  return {rel <= 1e-12, "max relative error " + fmt("%.3e", rel) + " (limit 1e-12)", 1.0};
}

// 2: minvol on the phantom recovers S_gt up to permutation.
Outcome criterion_endmembers() {
  PhantomConfig c;
  c.height = 64;
  c.width = 64;
  c.bands = 30;
  c.materials = 4;
  c.seed = 7;
  const Phantom ph = make_phantom(c);
  const EndmemberMatrix got = extract_endmembers_minvol(ph.hsi_hr, 4);
  std::vector<int> perm(4);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int m = 0; m < 4; ++m) {
      worst = std::max(worst, (got.spectra().row(m) - ph.spectra.spectra().row(perm[m]))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best < 1e-6, "max elementwise error " + fmt("%.3e", best) + " (limit 1e-6)", 5.0};
}

// 3: finite-difference checks on 20 seeds.
Outcome criterion_gradients() {
  double conv = 0.0, relu = 0.0, l1 = 0.0, net = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(1000 + s);
    conv = std::max(conv, conv_gradcheck(seed));
    relu = std::max(relu, relu_gradcheck(seed));
    l1 = std::max(l1, l1_gradcheck(seed));
    const NetworkCheck n = network_gradcheck(seed);
    net = std::max({net, n.params, n.input, n.jvp});
  }
  const double worst = std::max({conv, relu, l1, net});
  return {worst < 1e-5,
          "20 seeds, worst relative error conv " + fmt("%.2e", conv) + ", relu " +
              fmt("%.2e", relu) + ", l1 " + fmt("%.2e", l1) + ", network " +
              fmt("%.2e", net) + " (limit 1e-5)",
          30.0};
}

// 4: 1000 empirical dead-leaves generations at 32x32, scale 2.
Outcome criterion_dead_leaves() {
  const auto source = random_raster<AbundanceTag>(16, 16, 4, 201, -0.25, 1.25);
  const ValueSource values = ValueSource::empirical(source);
  std::set<std::vector<double>> allowed;
  for (std::size_t p = 0; p < source.pixel_count(); ++p) {
    std::vector<double> v(source.pixel(p).begin(), source.pixel(p).end());
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    allowed.insert(v);
  }
  GeneratorConfig c;
  c.height = 32;
  c.width = 32;
  c.materials = 4;
  c.scale_factor = 2;
  c.validate();

  auto run = [&](std::uint64_t i, DeadLeavesCanvas& canvas) {
    Rng rng = make_rng(202, {i});
    while (!canvas.complete() && canvas.leaves() < kMaxLeaves) {
      canvas.drop(sample_leaf(c, values, rng));
    }
  };
  int terminated = 0, covered = 0, in_source = 0, reproduced = 0;
  const int runs = 1000;
  for (int i = 0; i < runs; ++i) {
    DeadLeavesCanvas a(c.height, c.width, c.materials), b(c.height, c.width, c.materials);
    run(static_cast<std::uint64_t>(i), a);
    run(static_cast<std::uint64_t>(i), b);
    terminated += a.complete() && a.leaves() <= kMaxLeaves;
    covered += a.covered() == static_cast<std::size_t>(c.height * c.width);
    bool all_in = true;
    for (std::size_t p = 0; p < a.map().pixel_count(); ++p) {
      const auto px = a.map().pixel(p);
      all_in = all_in && allowed.count(std::vector<double>(px.begin(), px.end())) == 1;
    }
    in_source += all_in;
    reproduced += a.map() == b.map();
  }
  const bool ok = terminated == runs && covered == runs && in_source == runs && reproduced == runs;
  return {ok,
          std::to_string(terminated) + "/1000 terminated, " + std::to_string(covered) +
              " fully covered, " + std::to_string(in_source) + " all-source values, " +
              std::to_string(reproduced) + " reproduced",
          60.0};
}

double truncated_mean(double sigma_max, double lambda) {
  const int n = 20000;
  const double h = sigma_max / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double e = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double pdf = lambda * std::exp(-lambda * e);
    num += w * (sigma_max - e) * pdf;
    den += w * pdf;
  }
  return num / den;
}

// 5: sigma law and abundance-noise covariance.
Outcome criterion_noise_law() {
  NoiseConfig cfg;
  cfg.sigma_max = 1e-3;
  cfg.lambda = 2e3;
  Rng rng = make_rng(301);
  const int draws = 100000;
  bool in_range = true;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double s = sample_sigma(cfg, rng);
    in_range = in_range && s > 0.0 && s <= cfg.sigma_max;
    sum += s;
  }
  const double truth = truncated_mean(cfg.sigma_max, cfg.lambda);
  const double mean_err = std::abs(sum / draws - truth) / truth;

  const EndmemberMatrix s(random_matrix(4, 20, 302));
  const double sigma = 1e-3;
  const AbundanceMap n = abundance_noise(400, 250, sigma, s.pinv(), rng);
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  for (std::size_t p = 0; p < n.pixel_count(); ++p) {
    const Eigen::Vector4d v(n.pixel(p)[0], n.pixel(p)[1], n.pixel(p)[2], n.pixel(p)[3]);
    cov += v * v.transpose();
  }
  cov /= static_cast<double>(n.pixel_count());
  const Eigen::MatrixXd expect = sigma * sigma * s.pinv().transpose() * s.pinv();
  const double cov_err = (cov - expect).norm() / expect.norm();
  return {in_range && mean_err < 0.01 && cov_err < 0.05,
          std::string(in_range ? "all" : "not all") + " draws in (0, sigma_max], mean error " +
              fmt("%.3f%%", 100 * mean_err) + " (limit 1%), covariance error " +
              fmt("%.3f%%", 100 * cov_err) + " (limit 5%)",
          30.0};
}

// 6: metric identities.
Outcome criterion_metrics() {
  const auto x = random_raster<SpectralTag>(16, 16, 10, 401, 0.1, 1.0);
  const MetricReport id = evaluate(x, x, 2);
  const bool identity = std::isinf(id.psnr) && id.psnr > 0 && id.sam_deg == 0.0 && id.ergas == 0.0;

  SpectralCube zero(8, 8, 5), offset(8, 8, 5, std::vector<double>(320, 0.1));
  const double p20 = psnr(zero, offset);

  SpectralCube twice = x;
  for (double& v : twice.data()) v *= 2.0;
  const double sam2x = sam(x, twice).degrees;

  SpectralCube e1(1, 1, 2, {1.0, 0.0}), diag(1, 1, 2, {1.0, 1.0});
  const double s45 = sam(e1, diag).degrees;

  const bool ok = identity && std::abs(p20 - 20.0) < 1e-12 && sam2x == 0.0 &&
                  std::abs(s45 - 45.0) < 1e-9;
  return {ok,
          std::string("identity ") + (identity ? "(inf, 0, 0)" : "wrong") + ", offset PSNR " +
              fmt("%.15f", p20) + ", SAM(X,2X) " + fmt("%.3e", sam2x) + ", 45-degree case " +
              fmt("%.12f", s45),
          1.0};
}

// 7: degradation operator oracles.
Outcome criterion_degradation() {
  double norm_err = 0.0;
  for (double sigma : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    const std::vector<double> k = gaussian_kernel(sigma);
    norm_err = std::max(norm_err, std::abs(std::accumulate(k.begin(), k.end(), 0.0) - 1.0));
  }
  AbundanceMap c(24, 24, 2, std::vector<double>(24 * 24 * 2, 0.6));
  double const_err = 0.0;
  for (int s : {2, 3, 4}) {
    const AbundanceMap d = degrade(c, DegradationSpec::for_scale(s));
    for (double v : d.data()) {
      const_err = std::max(const_err, std::abs(v - 0.6));
    }
  }
  const std::vector<double> k = gaussian_kernel(2.0);
  const int r = static_cast<int>(k.size() / 2), n = 41, mid = 20;
  AbundanceMap impulse(n, n, 1);
  impulse(mid, mid, 0) = 1.0;
  const AbundanceMap b = blur(impulse, 2.0);
  double imp_err = 0.0;
  for (int y = 0; y < n; ++y) {
    for (int xx = 0; xx < n; ++xx) {
      const int dy = y - mid, dx = xx - mid;
      const double e = (std::abs(dy) <= r && std::abs(dx) <= r) ? k[dy + r] * k[dx + r] : 0.0;
      imp_err = std::max(imp_err, std::abs(b(y, xx, 0) - e));
    }
  }
  const auto a = random_raster<AbundanceTag>(13, 17, 3, 501);
  const double id_err = max_abs_diff(bicubic_resample(a, 13, 17).data(), a.data());
  const bool ok = norm_err <= 1e-15 && const_err < 1e-12 && imp_err < 1e-12 && id_err < 1e-12;
  return {ok,
          "kernel sum error " + fmt("%.1e", norm_err) + ", constant error " +
              fmt("%.1e", const_err) + ", impulse error " + fmt("%.1e", imp_err) +
              ", bicubic identity error " + fmt("%.1e", id_err),
          1.0};
}

// Shared state for criteria 8 and 9.
struct EndToEnd {
  fs::path root;
  std::optional<Phantom> phantom;
  PipelineResult result;
  double seconds = 0.0;
  bool charged = false;  // already counted in an earlier criterion's runtime
};

PhantomConfig end_to_end_phantom() {
  PhantomConfig c;
  c.height = 64;
  c.width = 64;
  c.bands = 20;
  c.materials = 3;
  c.scale = 2;
  c.seed = 2024;
  return c;
}

PipelineConfig end_to_end_config(const fs::path& root) {
  PipelineConfig c;
  c.scale = 2;
  c.materials = 3;
  c.dataset_size = 200;
  c.seed = 2024;
  c.dl_height = 64;
  c.dl_width = 64;
  c.noise.mode = NoiseMode::kStdAware;
  c.train.epochs = 50;
  c.input = root / "phantom" / "hsi_lr";
  c.reference = root / "phantom" / "hsi_hr";
  c.out = root / "run";
  return c;
}

EndToEnd& end_to_end(const fs::path& root) {
  static std::optional<EndToEnd> state;
  if (!state) {
    const auto start = std::chrono::steady_clock::now();
    EndToEnd e;
    e.root = root;
    e.phantom = make_phantom(end_to_end_phantom());
    save_phantom(*e.phantom, root / "phantom");
    int last = -1;
    e.result = run_pipeline(end_to_end_config(root), [&](const EpochLog& log) {
      if (log.epoch / 10 != last) {
        last = log.epoch / 10;
        std::printf("  [stdaware] epoch %d mean L1 %.6f\n", log.epoch, log.mean_l1);
        std::fflush(stdout);
      }
    });
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    state = std::move(e);
  }
  return *state;
}

// 8: pipeline vs bicubic on the phantom.
Outcome criterion_end_to_end(const fs::path& root) {
  EndToEnd& e = end_to_end(root);
  e.charged = true;
  const MetricReport& p = *e.result.report;
  const MetricReport& b = *e.result.baseline;
  const double gain = p.psnr - b.psnr;
  const double sam_rise = p.sam_deg - b.sam_deg;
  Outcome o{gain >= 0.3 && sam_rise <= 0.1,
            "PSNR " + fmt("%.3f", p.psnr) + " dB vs bicubic " + fmt("%.3f", b.psnr) +
                " dB (gain " + fmt("%+.3f", gain) + ", need >= 0.3), SAM " +
                fmt("%.4f", p.sam_deg) + " vs " + fmt("%.4f", b.sam_deg) + " deg (change " +
                fmt("%+.4f", sam_rise) + ", need <= 0.1)",
            900.0};
  return o;
}

double noisy_cube_psnr(const Phantom& ph, const EndmemberMatrix& s, const NetworkParams& params,
                       const AbundanceMap& a_noisy, double hint) {
  const AbundanceMap a_sr = super_resolve(params, a_noisy, hint, 2);
  return psnr(ph.hsi_hr, reconstruct(a_sr, s));
}

// 9: StdAware vs Clean on LR abundances from a 60 dB noisy cube.
Outcome criterion_noise_ordering(const fs::path& root) {
  EndToEnd& e = end_to_end(root);
  const double earlier = e.charged ? e.seconds : 0.0;
  const fs::path run = root / "run";
  const Checkpoint stdaware = load_checkpoint(run / "train" / "checkpoint");
  const Dataset ds = load_dataset(run / "dataset");
  const EndmemberMatrix s = load_endmembers(run / "unmix" / "endmembers.csv");

  NoiseConfig clean_noise = stdaware.noise;
  clean_noise.mode = NoiseMode::kClean;
  int last = -1;
  const TrainResult clean = train(ds, stdaware.train, clean_noise, s.pinv(), [&](const EpochLog& log) {
    if (log.epoch / 10 != last) {
      last = log.epoch / 10;
      std::printf("  [clean] epoch %d mean L1 %.6f\n", log.epoch, log.mean_l1);
      std::fflush(stdout);
    }
  });

  // 60 dB on unit-range data: sigma = 10^(-60/20) = 1e-3.
  const double sigma = 1e-3;
  SpectralCube noisy = load_cube(root / "phantom" / "hsi_lr");
  Rng rng = make_rng(909);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& v : noisy.data()) v += gauss(rng);
  const double spectral_psnr = psnr(load_cube(root / "phantom" / "hsi_lr"), noisy);
  const AbundanceMap a_noisy = estimate_abundances_ls(noisy, s);

  const double p_std = noisy_cube_psnr(*e.phantom, s, stdaware.params, a_noisy, sigma);
  const double p_clean = noisy_cube_psnr(*e.phantom, s, clean.params, a_noisy, 0.0);
  Outcome o{p_std >= p_clean,
            "input spectral PSNR " + fmt("%.2f", spectral_psnr) + " dB; cube PSNR StdAware " +
                fmt("%.3f", p_std) + " dB vs Clean " + fmt("%.3f", p_clean) + " dB",
            1200.0};
  o.extra_s = earlier;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const fs::path root = fs::temp_directory_path() /
                        ("hsisr_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(root);

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion_ls_identity},
      {2, criterion_endmembers},
      {3, criterion_gradients},
      {4, criterion_dead_leaves},
      {5, criterion_noise_law},
      {6, criterion_metrics},
      {7, criterion_degradation},
      {8, [&] { return criterion_end_to_end(root); }},
      {9, [&] { return criterion_noise_ordering(root); }},
  };

  std::FILE* report = std::fopen("acceptance_report.txt", "w");
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!wanted.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("threw: ") + ex.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double counted = secs;
    if (id == 9) counted += o.extra_s;
    const bool in_time = o.budget_s <= 0.0 || counted < o.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    for (std::FILE* f : {stdout, report}) {
      if (!f) continue;
      std::fprintf(f, "%s criterion %d: %s; runtime %.1f s (limit %.0f s)\n",
                   pass ? "PASS" : "FAIL", id, o.detail.c_str(), counted, o.budget_s);
      std::fflush(f);
    }
  }
  if (report) std::fclose(report);
  std::error_code ec;
  fs::remove_all(root, ec);
  return failures == 0 ? 0 : 1;
}
