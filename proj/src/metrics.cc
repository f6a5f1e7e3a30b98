#include "hsisr/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hsisr/error.h"

namespace hsisr {
namespace {

void check_same_shape(const SpectralCube& x, const SpectralCube& y) {
  if (!x.same_shape(y)) {
    throw InvalidArgument("metric inputs differ in shape: " + x.shape_string() +
                          " vs " + y.shape_string());
  }
}

}  // namespace

double psnr(const SpectralCube& x, const SpectralCube& y, double max_value) {
  check_same_shape(x, y);
  if (!(max_value > 0.0)) throw InvalidArgument("PSNR max_value must be positive");
  const auto xs = x.data();
  const auto ys = y.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - ys[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(xs.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(max_value) - 10.0 * std::log10(mse);
}

SamResult sam(const SpectralCube& x, const SpectralCube& y) {
  check_same_shape(x, y);
  SamResult result;
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t p = 0; p < x.pixel_count(); ++p) {
    const auto xp = x.pixel(p);
    const auto yp = y.pixel(p);
    double nx = 0.0, ny = 0.0;
    for (std::size_t l = 0; l < xp.size(); ++l) {
      nx += xp[l] * xp[l];
      ny += yp[l] * yp[l];
    }
    if (nx == 0.0 || ny == 0.0) {
      ++result.excluded_pixels;
      continue;
    }
    // 2 atan2(|u - v|, |u + v|) on the unit vectors; unlike acos of the
    // cosine it stays accurate near 0 and gives exactly 0 for parallel pixels.
    const double sx = std::sqrt(nx), sy = std::sqrt(ny);
    double diff = 0.0, sum = 0.0;
    for (std::size_t l = 0; l < xp.size(); ++l) {
      const double u = xp[l] / sx, v = yp[l] / sy;
      diff += (u - v) * (u - v);
      sum += (u + v) * (u + v);
    }
    total += 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
    ++counted;
  }
  if (counted > 0) {
    result.degrees = total / static_cast<double>(counted) * 180.0 / std::numbers::pi;
  }
  return result;
}

double ergas(const SpectralCube& x, const SpectralCube& y, int scale) {
  check_same_shape(x, y);
  if (scale < 1) throw InvalidArgument("ERGAS scale must be >= 1");
  const int bands = x.channels();
  const auto pixels = static_cast<double>(x.pixel_count());
  std::vector<double> sq_err(bands, 0.0);
  std::vector<double> mean(bands, 0.0);
  for (std::size_t p = 0; p < x.pixel_count(); ++p) {
    const auto xp = x.pixel(p);
    const auto yp = y.pixel(p);
    for (int l = 0; l < bands; ++l) {
      const double d = xp[l] - yp[l];
      sq_err[l] += d * d;
      mean[l] += yp[l];
    }
  }
  double acc = 0.0;
  for (int l = 0; l < bands; ++l) {
    const double mu = mean[l] / pixels;
    if (mu == 0.0) {
      throw InvalidArgument("ERGAS undefined: band " + std::to_string(l) +
                            " of the reconstruction has zero mean");
    }
    const double rmse = std::sqrt(sq_err[l] / pixels);
    acc += (rmse / mu) * (rmse / mu);
  }
  return 100.0 / scale * std::sqrt(acc / bands);
}

MetricReport evaluate(const SpectralCube& reference, const SpectralCube& test,
                      int scale, double max_value) {
  MetricReport r;
  r.psnr = psnr(reference, test, max_value);
  const SamResult s = sam(reference, test);
  r.sam_deg = s.degrees;
  r.sam_excluded_pixels = s.excluded_pixels;
  r.ergas = ergas(reference, test, scale);
  r.scale = scale;
  return r;
}

nlohmann::ordered_json to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  if (std::isinf(report.psnr)) {
    j["psnr"] = report.psnr > 0 ? "inf" : "-inf";
  } else {
    j["psnr"] = report.psnr;
  }
  j["sam_deg"] = report.sam_deg;
  j["ergas"] = report.ergas;
  j["scale"] = report.scale;
  j["sam_excluded_pixels"] = report.sam_excluded_pixels;
  return j;
}

MetricReport metric_report_from_json(const nlohmann::ordered_json& j) {
  MetricReport r;
  const auto& p = j.at("psnr");
  if (p.is_string()) {
    const std::string s = p.get<std::string>();
    r.psnr = s == "-inf" ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  } else {
    r.psnr = p.get<double>();
  }
  r.sam_deg = j.at("sam_deg").get<double>();
  r.ergas = j.at("ergas").get<double>();
  r.scale = j.at("scale").get<int>();
  r.sam_excluded_pixels = j.value("sam_excluded_pixels", std::size_t{0});
  return r;
}

}  // namespace hsisr
