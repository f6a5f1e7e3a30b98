#include <cmath>
#include <fstream>
#include <string>

#include "doctest.h"

#include "hsisr/endmembers.h"
#include "hsisr/error.h"
#include "hsisr/io.h"
#include "test_support.h"

using namespace hsisr;
using hsisr::testing::max_abs_diff;
using hsisr::testing::random_matrix;
using hsisr::testing::random_raster;
using hsisr::testing::ScratchDir;

namespace {

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("reconstruct: single material of ones copies the spectrum") {
  Eigen::MatrixXd s(1, 4);
  s << 0.1, 0.4, 0.7, 0.2;
  AbundanceMap a(3, 2, 1, std::vector<double>(6, 1.0));
  const SpectralCube x = reconstruct(a, EndmemberMatrix(s));
  for (std::size_t p = 0; p < x.pixel_count(); ++p) {
    for (int l = 0; l < 4; ++l) CHECK(x.pixel(p)[l] == s(0, l));
  }
}

TEST_CASE("reconstruct: zero abundances give a zero cube") {
  const EndmemberMatrix s(random_matrix(3, 7, 1));
  const SpectralCube x = reconstruct(AbundanceMap(4, 5, 3), s);
  CHECK(hsisr::testing::max_abs(x.data()) == 0.0);
  CHECK(x.channels() == 7);
}

TEST_CASE("reconstruct: hand multiply on a 2x2 map") {
  Eigen::MatrixXd s(2, 3);
  s << 1, 0, 0, 0, 1, 0;
  AbundanceMap a(2, 2, 2);
  a(0, 0, 0) = 0.5;
  a(0, 0, 1) = 0.5;
  const SpectralCube x = reconstruct(a, EndmemberMatrix(s));
  CHECK(x(0, 0, 0) == 0.5);
  CHECK(x(0, 0, 1) == 0.5);
  CHECK(x(0, 0, 2) == 0.0);
}

TEST_CASE("reconstruct: material count mismatch is rejected") {
  const EndmemberMatrix s(random_matrix(3, 7, 2));
  CHECK_THROWS_AS(reconstruct(AbundanceMap(2, 2, 2), s), InvalidArgument);
}

TEST_CASE("reconstruct is linear") {
  const EndmemberMatrix s(random_matrix(4, 9, 3));
  const auto a1 = random_raster<AbundanceTag>(5, 6, 4, 10, -1.0, 1.0);
  const auto a2 = random_raster<AbundanceTag>(5, 6, 4, 11, -1.0, 1.0);
  const double alpha = 0.7, beta = -1.3;
  AbundanceMap mix(5, 6, 4);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    mix.data()[i] = alpha * a1.data()[i] + beta * a2.data()[i];
  }
  const SpectralCube lhs = reconstruct(mix, s);
  const SpectralCube r1 = reconstruct(a1, s);
  const SpectralCube r2 = reconstruct(a2, s);
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double rhs = alpha * r1.data()[i] + beta * r2.data()[i];
    worst = std::max(worst, std::abs(lhs.data()[i] - rhs) / std::max(1.0, std::abs(rhs)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("pseudo_inverse: identity and scaled identity") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);
  CHECK(rel_err(pseudo_inverse(eye), eye) < 1e-15);
  CHECK(rel_err(pseudo_inverse(2.0 * eye), 0.5 * eye) < 1e-15);
}

TEST_CASE("pseudo_inverse: Moore-Penrose conditions on random full-rank matrices") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int m = 1 + static_cast<int>(seed % 6);
    const int l = m + static_cast<int>(seed % 5) + 2;
    const Eigen::MatrixXd s = random_matrix(m, l, 100 + seed);
    const Eigen::MatrixXd p = pseudo_inverse(s);
    REQUIRE(p.rows() == l);
    REQUIRE(p.cols() == m);
    CHECK(rel_err(s * p * s, s) < 1e-9);
    CHECK(rel_err(p * s * p, p) < 1e-9);
    CHECK(rel_err((s * p).transpose(), s * p) < 1e-9);
    CHECK(rel_err((p * s).transpose(), p * s) < 1e-9);
  }
}

TEST_CASE("pseudo_inverse: ill-conditioned input still satisfies S S+ S = S") {
  Eigen::MatrixXd s = random_matrix(3, 10, 7);
  s.row(2) = s.row(1) + 1e-6 * random_matrix(1, 10, 70);
  const Eigen::MatrixXd p = pseudo_inverse(s);
  CHECK(rel_err(s * p * s, s) < 1e-9);
}

TEST_CASE("EndmemberMatrix rejects rank deficiency, zero rows and M > L") {
  Eigen::MatrixXd s = random_matrix(3, 6, 8);
  s.row(2) = 2.0 * s.row(0);
  CHECK_THROWS_AS(EndmemberMatrix{s}, NumericalError);
  Eigen::MatrixXd z = random_matrix(2, 6, 9);
  z.row(1).setZero();
  CHECK_THROWS_AS(EndmemberMatrix{z}, Error);
  CHECK_THROWS_AS(EndmemberMatrix{random_matrix(4, 3, 10)}, Error);
}

TEST_CASE("raster invariants") {
  CHECK_THROWS_AS(SpectralCube(0, 2, 2), InvalidArgument);
  CHECK_THROWS_AS(SpectralCube(2, 2, 2, std::vector<double>(7, 0.0)), InvalidArgument);
  std::vector<double> bad(8, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(SpectralCube(2, 2, 2, bad), InvalidArgument);
}

TEST_CASE("cube file round trip is bit exact") {
  ScratchDir dir("core_io");
  auto cube = random_raster<SpectralTag>(4, 4, 3, 5);
  // Restrict to float32 values so the stored form is exact.
  for (double& v : cube.data()) v = static_cast<float>(v);
  save_cube(cube, dir / "cube");
  const SpectralCube back = load_cube(dir / "cube.json");
  CHECK(back == cube);
  CHECK(load_cube(dir / "cube.raw") == cube);
  CHECK(load_cube(dir / "cube") == cube);
}

TEST_CASE("abundance file round trip keeps out-of-range values") {
  ScratchDir dir("core_abund");
  auto a = random_raster<AbundanceTag>(3, 5, 2, 6, -0.5, 1.5);
  for (double& v : a.data()) v = static_cast<float>(v);
  save_abundance(a, dir / "a");
  CHECK(load_abundance(dir / "a") == a);
  const RasterHeader h = read_raster_header(dir / "a");
  CHECK(h.channel_key == "channels");
  CHECK(h.range_lo < 0.0);
  CHECK(h.range_hi > 1.0);
}

TEST_CASE("cube value_range rescales on load") {
  ScratchDir dir("core_range");
  std::ofstream(dir / "c.json") << R"({"height":1,"width":2,"bands":1,"dtype":"f32","layout":"bip","value_range":[0,1000]})";
  const float vals[2] = {0.0f, 500.0f};
  std::ofstream(dir / "c.raw", std::ios::binary)
      .write(reinterpret_cast<const char*>(vals), sizeof(vals));
  const SpectralCube c = load_cube(dir / "c");
  CHECK(c(0, 0, 0) == 0.0);
  CHECK(c(0, 1, 0) == 0.5);
}

TEST_CASE("size mismatch between header and payload is a format error") {
  ScratchDir dir("core_size");
  std::ofstream(dir / "c.json") << R"({"height":4,"width":4,"bands":3,"dtype":"f32","layout":"bip","value_range":[0,1]})";
  std::vector<float> vals(47, 0.25f);
  std::ofstream(dir / "c.raw", std::ios::binary)
      .write(reinterpret_cast<const char*>(vals.data()), vals.size() * sizeof(float));
  try {
    load_cube(dir / "c");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 47 * 4);
    CHECK(std::string(e.what()).find("48") != std::string::npos);
  }
}

TEST_CASE("non-finite payload values report their byte offset") {
  ScratchDir dir("core_nan");
  std::ofstream(dir / "c.json") << R"({"height":1,"width":3,"bands":1,"dtype":"f32","layout":"bip","value_range":[0,1]})";
  const float vals[3] = {0.1f, std::nanf(""), 0.2f};
  std::ofstream(dir / "c.raw", std::ios::binary)
      .write(reinterpret_cast<const char*>(vals), sizeof(vals));
  try {
    load_cube(dir / "c");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("malformed headers are format errors") {
  ScratchDir dir("core_hdr");
  const std::vector<std::string> headers = {
      R"({"height":4,"width":4,"bands":3,"dtype":"f32","layout":"bip")",
      R"({"height":4,"width":4,"bands":3,"dtype":"f64","layout":"bip"})",
      R"({"height":4,"width":4,"bands":3,"dtype":"f32","layout":"bsq"})",
      R"({"height":-1,"width":4,"bands":3,"dtype":"f32","layout":"bip"})",
      R"({"height":4,"width":4,"dtype":"f32","layout":"bip"})",
      R"({"height":4,"width":4,"bands":3,"dtype":"f32","layout":"bip","value_range":[1,0]})",
  };
  for (const std::string& h : headers) {
    std::ofstream(dir / "c.json") << h;
    CHECK_THROWS_AS(load_cube(dir / "c"), FormatError);
  }
  std::ofstream(dir / "d.json") << R"({"height":2,"width":2,"bands":3,"dtype":"f64","layout":"bip"})";
  try {
    read_raster_header(dir / "d");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.offset() == std::string(R"({"height":2,"width":2,"bands":3,)").size());
  }
}

TEST_CASE("endmember CSV: 2 x 5 loads as M=2, L=5 and round trips exactly") {
  ScratchDir dir("core_csv");
  std::ofstream(dir / "s.csv") << "0.1,0.2,0.3,0.4,0.5\n0.5, 0.4 ,0.3,0.2,0.11\n";
  const EndmemberMatrix s = load_endmembers(dir / "s.csv");
  CHECK(s.materials() == 2);
  CHECK(s.bands() == 5);
  CHECK(s.spectra()(1, 4) == 0.11);

  const EndmemberMatrix r(random_matrix(3, 8, 44));
  save_endmembers(r, dir / "r.csv");
  CHECK(load_endmembers(dir / "r.csv").spectra() == r.spectra());
}

TEST_CASE("endmember CSV errors carry byte offsets") {
  ScratchDir dir("core_csv_bad");
  std::ofstream(dir / "s.csv") << "0.1,0.2\n0.3,abc\n";
  try {
    load_matrix_csv(dir / "s.csv");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 12);
  }
  std::ofstream(dir / "t.csv") << "0.1,0.2\n0.3\n";
  CHECK_THROWS_AS(load_matrix_csv(dir / "t.csv"), FormatError);
}
