#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "skinlab/errors.hpp"
#include "skinlab/spectra.hpp"

using namespace skinlab;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

std::vector<Complex> to_vec(const Eigen::VectorXcd& v) {
  return {v.data(), v.data() + v.size()};
}

std::vector<Complex> cloud_energies(const std::vector<CloudPoint>& cloud) {
  std::vector<Complex> out;
  out.reserve(cloud.size());
  for (const CloudPoint& p : cloud) out.push_back(p.energy);
  return out;
}

double class_mean(const WDistribution& w, const LatticeGeometry& g,
                  BoundaryClass c) {
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < g.site_count(); ++i)
    if (g.site(i).boundary == c) {
      sum += w.values[static_cast<size_t>(i)];
      ++count;
    }
  REQUIRE(count > 0);
  return sum / count;
}
}  // namespace

TEST_CASE("single-cell square: eigenvalues +-sqrt(5) - i, twice each") {
  ModelParams p;
  ObcHamiltonian H = assemble_obc(p, build_geometry(Shape::square, 1));
  SpectrumResult s = obc_spectrum(H, true);
  const double r = std::sqrt(5.0);
  // each pair is exactly defective (the 2-site y-factor is a Jordan block
  // at gamma = 2t), so individual eigenvalues carry the sqrt(eps) splitting
  // intrinsic to defective points; the pair means are well conditioned
  std::vector<Complex> expect = {{-r, -1}, {-r, -1}, {r, -1}, {r, -1}};
  CHECK(oracle::multiset_distance(to_vec(s.eigenvalues), expect) <= 1e-6);
  CHECK(std::abs(0.5 * (s.eigenvalues(0) + s.eigenvalues(1)) -
                 Complex(-r, -1.0)) <= 1e-12);
  CHECK(std::abs(0.5 * (s.eigenvalues(2) + s.eigenvalues(3)) -
                 Complex(r, -1.0)) <= 1e-12);
  // sorted by (re, im)
  CHECK(s.eigenvalues(0).real() == doctest::Approx(-r));
  CHECK(s.eigenvalues(3).real() == doctest::Approx(r));
  REQUIRE(s.residuals.size() == 4);
  for (double res : s.residuals) CHECK(res <= 1e-12);
}

TEST_CASE("Hermitian control: gamma = 0 square L=4 spectrum is real") {
  ModelParams p;
  p.gamma = 0.0;
  SpectrumResult s =
      obc_spectrum(assemble_obc(p, build_geometry(Shape::square, 4)), false);
  for (int j = 0; j < s.eigenvalues.size(); ++j)
    CHECK(std::fabs(s.eigenvalues(j).imag()) <= 1e-10);
}

TEST_CASE("Minkowski-sum oracle: square L=6 OBC spectrum") {
  ModelParams p;
  SpectrumResult s =
      obc_spectrum(assemble_obc(p, build_geometry(Shape::square, 6)), false);
  CHECK(oracle::multiset_distance(to_vec(s.eigenvalues),
                                  oracle::minkowski_spectrum(p, 6)) <= 1e-8);
}

TEST_CASE("capacity cap rejects oversized problems") {
  ModelParams p;
  ObcHamiltonian H = assemble_obc(p, build_geometry(Shape::square, 40));
  CHECK_THROWS_AS(obc_spectrum(H, false), CapacityError);
  try {
    obc_spectrum(H, false);
  } catch (const CapacityError& e) {
    CHECK(std::string(e.what()).find("lower L") != std::string::npos);
  }
}

TEST_CASE("obc_spectrum residual enforcement produces residuals") {
  ModelParams p;
  SpectrumResult s =
      obc_spectrum(assemble_obc(p, build_geometry(Shape::triangle, 6)), true);
  const int N = static_cast<int>(s.eigenvalues.size());
  REQUIRE(static_cast<int>(s.residuals.size()) == N);
  // enforced bound: 1e-8 * max|H| * N, with max|H| = |m - i gamma| here
  const double bound = 1e-8 * std::hypot(p.m, p.gamma) * N;
  for (double r : s.residuals) CHECK(r <= bound);
  // eigenvector columns are unit norm
  for (int j = 0; j < N; ++j)
    CHECK(s.right_eigenvectors.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pbc cloud") {
  ModelParams p;
  const int n = 101;
  auto cloud = pbc_cloud(p, n);
  REQUIRE(static_cast<int>(cloud.size()) == 4 * n * n);

  SUBCASE("matches the closed form pointwise to 1e-10") {
    double worst = 0.0;
    for (size_t q = 0; q < cloud.size(); q += 4) {
      Momentum k(cloud[q].kx, cloud[q].ky);
      auto closed = closed_form_bands(p, k);
      std::vector<Complex> got = {cloud[q].energy, cloud[q + 1].energy,
                                  cloud[q + 2].energy, cloud[q + 3].energy};
      worst = std::max(worst, oracle::multiset_distance(
                                  got, {closed.begin(), closed.end()}));
    }
    CHECK(worst <= 1e-10);
  }

  SUBCASE("real extent and imaginary range") {
    double max_re = -1e9, min_im = 0.0, max_im = -1e9;
    for (const CloudPoint& pt : cloud) {
      max_re = std::max(max_re, pt.energy.real());
      min_im = std::min(min_im, pt.energy.imag());
      max_im = std::max(max_im, pt.energy.imag());
    }
    CHECK(std::fabs(max_re - (std::sqrt(8.0) + std::sqrt(3.0))) <= 2e-3);
    CHECK(min_im >= -2.0 - 1e-9);
    CHECK(max_im <= 1e-9);
  }

  SUBCASE("gamma = 0 collapses onto the real axis") {
    ModelParams h = p;
    h.gamma = 0.0;
    for (const CloudPoint& pt : pbc_cloud(h, 31))
      CHECK(std::fabs(pt.energy.imag()) <= 1e-12);
  }

  SUBCASE("grid preconditions") {
    CHECK_THROWS_AS(pbc_cloud(p, 1), PreconditionError);
  }

  SUBCASE("cloud does not depend on the worker count") {
    setenv("SKINLAB_THREADS", "1", 1);
    auto serial = pbc_cloud(p, 31);
    setenv("SKINLAB_THREADS", "7", 1);
    auto threaded = pbc_cloud(p, 31);
    unsetenv("SKINLAB_THREADS");
    REQUIRE(serial.size() == threaded.size());
    for (size_t i = 0; i < serial.size(); ++i) {
      CHECK(serial[i].energy == threaded[i].energy);
      CHECK(serial[i].band == threaded[i].band);
    }
  }
}

TEST_CASE("spectral area box counting") {
  ModelParams p;
  ModelParams h = p;
  h.gamma = 0.0;

  SUBCASE("empty cloud has zero area") {
    CHECK(spectral_area(std::vector<Complex>{}, 0.05) == 0.0);
  }

  SUBCASE("gamma = 0 cloud is a one-box-thick strip") {
    // closed-form cloud: exactly real for gamma = 0
    const int n = 201;
    std::vector<Complex> cloud;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Momentum k(-kPi + i * 2 * kPi / n, -kPi + j * 2 * kPi / n);
        for (const Complex& e : closed_form_bands(h, k)) cloud.push_back(e);
      }
    double re_min = 1e9, re_max = -1e9;
    for (const Complex& e : cloud) {
      CHECK(e.imag() == 0.0);
      re_min = std::min(re_min, e.real());
      re_max = std::max(re_max, e.real());
    }
    const double cell = 0.05;
    double area = spectral_area(cloud, cell);
    CHECK(area <= cell * ((re_max - re_min) + 2 * cell));
  }

  SUBCASE("frozen raster census at gridN = 201, defaults") {
    const int n = 201;
    std::vector<Complex> closed_cloud, closed_line;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Momentum k(-kPi + i * 2 * kPi / n, -kPi + j * 2 * kPi / n);
        for (const Complex& e : closed_form_bands(p, k))
          closed_cloud.push_back(e);
        for (const Complex& e : closed_form_bands(h, k))
          closed_line.push_back(e);
      }
    // clean-route census (no eigenvalues perturbed off box boundaries)
    double a05 = spectral_area(closed_cloud, 0.05);
    double a025 = spectral_area(closed_cloud, 0.025);
    CHECK(a05 == doctest::Approx(3.1475).epsilon(0.01));
    CHECK(a025 == doctest::Approx(2.1569).epsilon(0.01));

    // the solver cloud sees the same region; with defaults entire manifolds
    // sit exactly on box boundaries (Im = 0 and Im = -gamma/2 rows), so
    // solver roundoff may populate the adjacent row as well
    auto cloud = pbc_cloud(p, 201);
    double a_solver = spectral_area(cloud, 0.05);
    CHECK(a_solver >= a05 - 0.01);
    CHECK(a_solver <= a05 + 0.8);

    // lossy cloud covers far more than the Hermitian line
    CHECK(a_solver > 5.0 * spectral_area(closed_line, 0.05));
  }

  SUBCASE("nested grid refinement never shrinks the area") {
    double a101 = spectral_area(pbc_cloud(p, 101), 0.05);
    double a202 = spectral_area(pbc_cloud(p, 202), 0.05);
    double a404 = spectral_area(pbc_cloud(p, 404), 0.05);
    CHECK(a101 <= a202);
    CHECK(a202 <= a404);
  }

  SUBCASE("cell must be positive") {
    CHECK_THROWS_AS(spectral_area(std::vector<Complex>{{1, 0}}, 0.0),
                    PreconditionError);
  }
}

TEST_CASE("w distribution") {
  ModelParams p;
  LatticeGeometry g = build_geometry(Shape::triangle, 8);
  SpectrumResult s = obc_spectrum(assemble_obc(p, g), true);
  WDistribution w = w_distribution(s, g);

  SUBCASE("normalization and positivity") {
    double sum = 0.0;
    for (double v : w.values) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }

  SUBCASE("invariant under random eigenvector phases") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uphi(0.0, 2 * kPi);
    SpectrumResult rotated = s;
    for (int j = 0; j < rotated.right_eigenvectors.cols(); ++j)
      rotated.right_eigenvectors.col(j) *=
          std::polar(1.0, uphi(rng));
    WDistribution w2 = w_distribution(rotated, g);
    double worst = 0.0;
    for (size_t i = 0; i < w.values.size(); ++i)
      worst = std::max(worst, std::fabs(w.values[i] - w2.values[i]));
    CHECK(worst <= 1e-12);
  }

  SUBCASE("missing vectors are rejected") {
    SpectrumResult bare = obc_spectrum(assemble_obc(p, g), false);
    CHECK_THROWS_AS(w_distribution(bare, g), PreconditionError);
  }

  SUBCASE("empty energy window is rejected") {
    CHECK_THROWS_AS(w_distribution(s, g, EnergyWindow{50.0, 60.0}),
                    PreconditionError);
  }

  SUBCASE("windowed distribution still sums to one") {
    WDistribution ww = w_distribution(s, g, EnergyWindow{2.0, 2.83});
    double sum = 0.0;
    for (double v : ww.values) sum += v;
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("OBC spectra live inside the fattened PBC region") {
  ModelParams p;
  const double cell = 0.05;
  std::set<std::pair<long, long>> boxes;
  for (const CloudPoint& pt : pbc_cloud(p, 401))
    boxes.insert({static_cast<long>(std::floor(pt.energy.real() / cell)),
                  static_cast<long>(std::floor(pt.energy.imag() / cell))});
  auto inside_fattened = [&](Complex e) {
    long bx = static_cast<long>(std::floor(e.real() / cell));
    long by = static_cast<long>(std::floor(e.imag() / cell));
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy)
        if (boxes.count({bx + dx, by + dy})) return true;
    return false;
  };
  for (Shape shape : {Shape::square, Shape::triangle}) {
    for (int L : {4, 8, 12}) {
      SpectrumResult s =
          obc_spectrum(assemble_obc(p, build_geometry(shape, L)), false);
      int outside = 0;
      for (int j = 0; j < s.eigenvalues.size(); ++j)
        if (!inside_fattened(s.eigenvalues(j))) ++outside;
      CAPTURE(shape_name(shape));
      CAPTURE(L);
      CHECK(outside == 0);
    }
  }
}

TEST_CASE("hermitian control: class means are flat") {
  ModelParams p;
  p.gamma = 0.0;
  LatticeGeometry g = build_geometry(Shape::square, 6);
  WDistribution w = w_distribution(obc_spectrum(assemble_obc(p, g), true), g);
  double lo = 1e9, hi = -1e9;
  for (BoundaryClass c :
       {BoundaryClass::bulk, BoundaryClass::edge_bottom, BoundaryClass::edge_left,
        BoundaryClass::edge_right, BoundaryClass::edge_top, BoundaryClass::corner}) {
    double mean = class_mean(w, g, c);
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
  }
  CHECK(hi / lo <= 2.0);
}

TEST_CASE("triangle oblique edge carries excess weight") {
  ModelParams p;
  LatticeGeometry g = build_geometry(Shape::triangle, 16);
  WDistribution w = w_distribution(obc_spectrum(assemble_obc(p, g), true), g);
  CHECK(class_mean(w, g, BoundaryClass::edge_oblique) >
        class_mean(w, g, BoundaryClass::bulk));
}

TEST_CASE("gdse report") {
  ModelParams p;

  SUBCASE("hermitian triangle L=12: every class no-skin") {
    ModelParams h = p;
    h.gamma = 0.0;
    LatticeGeometry g = build_geometry(Shape::triangle, 12);
    WDistribution w = w_distribution(obc_spectrum(assemble_obc(h, g), true), g);
    GdseReport report = gdse_report(w, g);
    CHECK(report.threshold == 2.0);
    for (const auto& stat : report.classes) {
      CHECK_FALSE(stat.skin);
      CHECK(stat.ratio >= 0.0);
    }
  }

  SUBCASE("square L=10: flat to within a factor two, no skin verdicts") {
    LatticeGeometry g = build_geometry(Shape::square, 10);
    WDistribution w = w_distribution(obc_spectrum(assemble_obc(p, g), true), g);
    GdseReport report = gdse_report(w, g);
    for (BoundaryClass c : {BoundaryClass::edge_bottom, BoundaryClass::edge_left,
                            BoundaryClass::edge_right, BoundaryClass::edge_top}) {
      const auto* stat = report.find(c);
      REQUIRE(stat != nullptr);
      CHECK(stat->ratio >= 0.5);
      CHECK(stat->ratio <= 2.0);
      CHECK_FALSE(stat->skin);
    }
    CHECK(report.find(BoundaryClass::edge_oblique) == nullptr);
  }

  SUBCASE("threshold semantics: verdict flips with the configured ratio") {
    LatticeGeometry g = build_geometry(Shape::triangle, 16);
    WDistribution w = w_distribution(obc_spectrum(assemble_obc(p, g), true), g);
    GdseReport strict = gdse_report(w, g, 1.3);
    const auto* oblique = strict.find(BoundaryClass::edge_oblique);
    REQUIRE(oblique != nullptr);
    CHECK(oblique->skin);
    CHECK(oblique->ratio > 1.3);
    CHECK_FALSE(strict.find(BoundaryClass::edge_bottom)->skin);
    CHECK_FALSE(strict.find(BoundaryClass::edge_left)->skin);
    GdseReport loose = gdse_report(w, g, 1e9);
    for (const auto& stat : loose.classes) CHECK_FALSE(stat.skin);
  }
}

TEST_CASE("csv writers are stable") {
  ModelParams p;
  SpectrumResult s =
      obc_spectrum(assemble_obc(p, build_geometry(Shape::square, 1)), true);
  std::ostringstream a, b;
  write_obc_csv(s, a);
  write_obc_csv(s, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("index,re,im,residual\n", 0) == 0);
  // four rows + header
  int lines = 0;
  for (char ch : a.str())
    if (ch == '\n') ++lines;
  CHECK(lines == 5);
}
