#pragma once

#include <Eigen/Dense>

#include <optional>
#include <ostream>
#include <vector>

#include "skinlab/lattice.hpp"
#include "skinlab/model.hpp"

namespace skinlab {

/// One dense non-symmetric eigendecomposition. Eigenvalues are sorted by
/// (re, im) for determinism; eigenvector columns (when requested) are
/// unit 2-norm and permuted consistently. residuals[j] = |H v_j - e_j v_j|_2,
/// present exactly when eigenvectors are.
struct SpectrumResult {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right_eigenvectors;  // 0x0 when not requested
  std::vector<double> residuals;

  bool has_vectors() const { return right_eigenvectors.size() > 0; }
};

constexpr int kDefaultDenseCap = 6000;

/// Full complex eigendecomposition of an OBC Hamiltonian.
/// Throws CapacityError when dim exceeds `dense_cap`, SolverError on
/// non-convergence or when a residual exceeds 1e-8 * max|H_ij| * dim.
SpectrumResult obc_spectrum(const ObcHamiltonian& H, bool want_vectors,
                            int dense_cap = kDefaultDenseCap);

/// One PBC eigenvalue with its grid metadata. `band` is the position of the
/// eigenvalue in the (re, im)-sorted quadruple at this k.
struct CloudPoint {
  double kx = 0.0;
  double ky = 0.0;
  int band = 0;
  Complex energy;
};

/// All 4 * gridN^2 eigenvalues of H(k) on the uniform gridN x gridN mesh
/// over [-pi, pi)^2 (endpoints -pi inclusive, +pi exclusive), by dense
/// diagonalization of the 4x4 Bloch matrix. Requires gridN >= 2.
std::vector<CloudPoint> pbc_cloud(const ModelParams& params, int gridN);

/// Box-counting area of a point cloud in the complex plane: rasterizes into
/// cell x cell boxes and returns (occupied boxes) * cell^2. Zero for an
/// empty cloud. Requires cell > 0.
double spectral_area(const std::vector<Complex>& cloud, double cell);
double spectral_area(const std::vector<CloudPoint>& cloud, double cell);

/// Optional real-energy window used to restrict W to eigenstates with
/// Re(e) in [re_min, re_max].
struct EnergyWindow {
  double re_min = 0.0;
  double re_max = 0.0;
};

/// Eigenstate-averaged sitewise intensity W(n) = (1/N) sum_m |psi_m(n)|^2
/// over unit-norm right eigenvectors. Sums to 1 within roundoff. With a
/// window, the average runs over the selected states only (and still sums
/// to 1).
struct WDistribution {
  std::vector<double> values;
  std::optional<EnergyWindow> window;
};

/// Throws PreconditionError when eigenvectors are missing or the window
/// selects no states.
WDistribution w_distribution(const SpectrumResult& spectrum,
                             const LatticeGeometry& geometry,
                             std::optional<EnergyWindow> window = {});

/// Per-boundary-class W statistics with skin verdicts.
/// verdict = skin iff (class mean / bulk mean) >= threshold.
struct GdseReport {
  struct ClassStat {
    BoundaryClass cls = BoundaryClass::bulk;
    int count = 0;
    double mean = 0.0;
    double ratio = 0.0;  // class mean / bulk mean
    bool skin = false;
  };

  Shape shape = Shape::square;
  int L = 0;
  double threshold = 2.0;
  double bulk_mean = 0.0;
  int bulk_count = 0;
  std::vector<ClassStat> classes;  // non-bulk classes present, enum order

  const ClassStat* find(BoundaryClass c) const;
};

constexpr double kDefaultSkinRatio = 2.0;

/// Throws PreconditionError when the geometry has no bulk sites.
GdseReport gdse_report(const WDistribution& w, const LatticeGeometry& geometry,
                       double threshold = kDefaultSkinRatio);

/// OBC spectrum CSV: index,re,im,residual (residual empty when absent).
void write_obc_csv(const SpectrumResult& spectrum, std::ostream& os);

/// PBC cloud CSV: kx,ky,band,re,im.
void write_cloud_csv(const std::vector<CloudPoint>& cloud, std::ostream& os);

/// W CSV: geometry columns plus the W value.
void write_w_csv(const WDistribution& w, const LatticeGeometry& geometry,
                 std::ostream& os);

/// GdseReport as a structured-text document with stable key order.
void write_gdse_txt(const GdseReport& report, const ModelParams& params,
                    std::ostream& os);

}  // namespace skinlab
