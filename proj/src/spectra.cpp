#include "skinlab/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "skinlab/errors.hpp"
#include "skinlab/io_util.hpp"

namespace skinlab {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

bool energy_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}
}  // namespace

SpectrumResult obc_spectrum(const ObcHamiltonian& H, bool want_vectors,
                            int dense_cap) {
  const int N = H.dim;
  if (N > dense_cap)
    throw CapacityError("OBC Hamiltonian dimension " + std::to_string(N) +
                        " exceeds the dense-solver cap " +
                        std::to_string(dense_cap) +
                        "; lower L or raise dense_cap");

  Eigen::MatrixXcd dense = H.dense();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dense, want_vectors);
  if (solver.info() != Eigen::Success)
    throw SolverError("dense eigensolver did not converge (dim " +
                      std::to_string(N) + ")");

  // deterministic (re, im) ordering with a stable index tiebreak
  std::vector<int> order(static_cast<size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() < ev(b).real();
    if (ev(a).imag() != ev(b).imag()) return ev(a).imag() < ev(b).imag();
    return a < b;
  });

  SpectrumResult result;
  result.eigenvalues.resize(N);
  for (int j = 0; j < N; ++j) result.eigenvalues(j) = ev(order[j]);

  if (want_vectors) {
    result.right_eigenvectors.resize(N, N);
    for (int j = 0; j < N; ++j)
      result.right_eigenvectors.col(j) = solver.eigenvectors().col(order[j]);

    double hmax = 0.0;
    for (int c = 0; c < dense.cols(); ++c)
      for (int r = 0; r < dense.rows(); ++r)
        hmax = std::max(hmax, std::abs(dense(r, c)));
    const double bound = 1e-8 * hmax * N;

    result.residuals.resize(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) {
      double res = (dense * result.right_eigenvectors.col(j) -
                    result.eigenvalues(j) * result.right_eigenvectors.col(j))
                       .norm();
      result.residuals[static_cast<size_t>(j)] = res;
      if (res > bound)
        throw SolverError("eigenpair " + std::to_string(j) + " residual " +
                              fmt(res) + " exceeds bound " + fmt(bound),
                          j);
    }
  }
  return result;
}

std::vector<CloudPoint> pbc_cloud(const ModelParams& params, int gridN) {
  params.validate();
  if (gridN < 2) throw PreconditionError("pbc_cloud: gridN must be >= 2");
  const double h = kTwoPi / gridN;

  std::vector<CloudPoint> cloud(static_cast<size_t>(gridN) * gridN * 4);
  parallel_for(gridN, [&](int j) {
    const double ky = -kPi + j * h;
    for (int i = 0; i < gridN; ++i) {
      const double kx = -kPi + i * h;
      Eigen::ComplexEigenSolver<BlochMatrix> solver(
          build_bloch(params, Momentum(kx, ky)), false);
      std::array<Complex, 4> e;
      for (int b = 0; b < 4; ++b) e[static_cast<size_t>(b)] = solver.eigenvalues()(b);
      std::sort(e.begin(), e.end(), energy_less);
      size_t base = (static_cast<size_t>(j) * gridN + i) * 4;
      for (int b = 0; b < 4; ++b)
        cloud[base + static_cast<size_t>(b)] = {kx, ky, b, e[static_cast<size_t>(b)]};
    }
  });
  return cloud;
}

double spectral_area(const std::vector<Complex>& cloud, double cell) {
  if (!(cell > 0.0)) throw PreconditionError("spectral_area: cell must be > 0");
  if (cloud.empty()) return 0.0;
  std::set<std::pair<long, long>> boxes;
  for (const Complex& e : cloud)
    boxes.insert({static_cast<long>(std::floor(e.real() / cell)),
                  static_cast<long>(std::floor(e.imag() / cell))});
  return static_cast<double>(boxes.size()) * cell * cell;
}

double spectral_area(const std::vector<CloudPoint>& cloud, double cell) {
  std::vector<Complex> energies;
  energies.reserve(cloud.size());
  for (const CloudPoint& p : cloud) energies.push_back(p.energy);
  return spectral_area(energies, cell);
}

WDistribution w_distribution(const SpectrumResult& spectrum,
                             const LatticeGeometry& geometry,
                             std::optional<EnergyWindow> window) {
  if (!spectrum.has_vectors())
    throw PreconditionError("w_distribution: eigenvectors are required");
  const int N = static_cast<int>(spectrum.eigenvalues.size());
  if (geometry.site_count() != N)
    throw PreconditionError("w_distribution: geometry/spectrum size mismatch");

  WDistribution w;
  w.window = window;
  w.values.assign(static_cast<size_t>(N), 0.0);
  int selected = 0;
  for (int j = 0; j < N; ++j) {
    if (window) {
      double re = spectrum.eigenvalues(j).real();
      if (re < window->re_min || re > window->re_max) continue;
    }
    ++selected;
    for (int n = 0; n < N; ++n)
      w.values[static_cast<size_t>(n)] +=
          std::norm(spectrum.right_eigenvectors(n, j));
  }
  if (selected == 0)
    throw PreconditionError("w_distribution: energy window selects no states");
  for (double& v : w.values) v /= selected;
  return w;
}

const GdseReport::ClassStat* GdseReport::find(BoundaryClass c) const {
  for (const ClassStat& s : classes)
    if (s.cls == c) return &s;
  return nullptr;
}

GdseReport gdse_report(const WDistribution& w, const LatticeGeometry& geometry,
                       double threshold) {
  if (static_cast<int>(w.values.size()) != geometry.site_count())
    throw PreconditionError("gdse_report: W/geometry size mismatch");

  double sum[kNumBoundaryClasses] = {};
  int count[kNumBoundaryClasses] = {};
  for (int i = 0; i < geometry.site_count(); ++i) {
    int c = static_cast<int>(geometry.site(i).boundary);
    sum[c] += w.values[static_cast<size_t>(i)];
    count[c] += 1;
  }
  if (count[0] == 0)
    throw PreconditionError("gdse_report: geometry has no bulk sites");

  GdseReport report;
  report.shape = geometry.shape();
  report.L = geometry.L();
  report.threshold = threshold;
  report.bulk_count = count[0];
  report.bulk_mean = sum[0] / count[0];
  for (int c = 1; c < kNumBoundaryClasses; ++c) {
    if (count[c] == 0) continue;
    GdseReport::ClassStat stat;
    stat.cls = static_cast<BoundaryClass>(c);
    stat.count = count[c];
    stat.mean = sum[c] / count[c];
    stat.ratio = stat.mean / report.bulk_mean;
    stat.skin = stat.ratio >= threshold;
    report.classes.push_back(stat);
  }
  return report;
}

void write_obc_csv(const SpectrumResult& spectrum, std::ostream& os) {
  os << "index,re,im,residual\n";
  const bool have_res = !spectrum.residuals.empty();
  for (int j = 0; j < spectrum.eigenvalues.size(); ++j) {
    os << j << ',' << fmt(spectrum.eigenvalues(j).real()) << ','
       << fmt(spectrum.eigenvalues(j).imag()) << ',';
    if (have_res) os << fmt(spectrum.residuals[static_cast<size_t>(j)]);
    os << '\n';
  }
}

void write_cloud_csv(const std::vector<CloudPoint>& cloud, std::ostream& os) {
  os << "kx,ky,band,re,im\n";
  for (const CloudPoint& p : cloud)
    os << fmt(p.kx) << ',' << fmt(p.ky) << ',' << p.band << ','
       << fmt(p.energy.real()) << ',' << fmt(p.energy.imag()) << '\n';
}

void write_w_csv(const WDistribution& w, const LatticeGeometry& geometry,
                 std::ostream& os) {
  os << "site_index,ix,iy,sublattice,x,y,boundary_class,w\n";
  for (int i = 0; i < geometry.site_count(); ++i) {
    const SiteInfo& st = geometry.site(i);
    os << i << ',' << st.ix << ',' << st.iy << ',' << sublattice_name(st.sub)
       << ',' << fmt(st.x) << ',' << fmt(st.y) << ','
       << boundary_class_name(st.boundary) << ','
       << fmt(w.values[static_cast<size_t>(i)]) << '\n';
  }
}

void write_gdse_txt(const GdseReport& report, const ModelParams& params,
                    std::ostream& os) {
  os << "[gdse]\n";
  os << "shape = " << shape_name(report.shape) << '\n';
  os << "L = " << report.L << '\n';
  os << "t = " << fmt(params.t) << '\n';
  os << "m = " << fmt(params.m) << '\n';
  os << "gamma = " << fmt(params.gamma) << '\n';
  os << "skin_ratio_threshold = " << fmt(report.threshold) << '\n';
  os << "bulk_count = " << report.bulk_count << '\n';
  os << "bulk_mean = " << fmt(report.bulk_mean) << '\n';
  for (const auto& stat : report.classes) {
    std::string name = boundary_class_name(stat.cls);
    os << name << "_count = " << stat.count << '\n';
    os << name << "_mean = " << fmt(stat.mean) << '\n';
    os << name << "_ratio = " << fmt(stat.ratio) << '\n';
    os << name << "_verdict = " << (stat.skin ? "skin" : "no-skin") << '\n';
  }
}

}  // namespace skinlab
