#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

namespace skinlab {

using Complex = std::complex<double>;
using BlochMatrix = Eigen::Matrix4cd;

/// The four scalars that fix every computation, in units of the hopping t.
/// Defaults are the reference parameter set m = 2t, gamma = 2t with a
/// resolvent broadening eta = 0.05 t.
struct ModelParams {
  double t = 1.0;      ///< nearest-neighbor coupling, > 0
  double m = 2.0;      ///< on-site detuning (+m / -m sublattices)
  double gamma = 2.0;  ///< on-site loss rate, >= 0
  double eta = 0.05;   ///< resolvent broadening, > 0

  /// Throws std::invalid_argument unless t > 0, gamma >= 0, eta > 0.
  void validate() const;
};

/// A Bloch momentum, reduced into the fundamental zone [-pi, pi)^2 on
/// construction.
struct Momentum {
  double kx = 0.0;
  double ky = 0.0;

  Momentum() = default;
  Momentum(double kx_raw, double ky_raw)
      : kx(reduce(kx_raw)), ky(reduce(ky_raw)) {}

  /// Reduces k into [-pi, pi). Uses IEEE remainder, which is exact, so
  /// values already in range pass through unchanged.
  static double reduce(double k);
};

/// Sublattice labels in basis order. Intra-cell offsets in lattice-constant
/// units: A(0,0), B(1/2,0), D(0,1/2), C(1/2,1/2). The order (A,B,D,C) makes
/// the Bloch matrix a Kronecker sum of a kx-only and a ky-only 2x2 factor.
enum class Sublattice : int { A = 0, B = 1, D = 2, C = 3 };

constexpr int kNumSublattices = 4;

/// Half-lattice intra-cell offset of a sublattice, in units of a/2.
constexpr std::array<int, 4> kSubOffsetX = {0, 1, 0, 1};
constexpr std::array<int, 4> kSubOffsetY = {0, 0, 1, 1};

char sublattice_name(Sublattice s);

/// On-site energy of a sublattice: A -> -m, B -> +m, D -> -m - i*gamma,
/// C -> +m - i*gamma.
Complex onsite_energy(const ModelParams& params, Sublattice s);

/// e^{i a} built so that phase(-a) is bit-exactly conj(phase(a)). This is
/// what makes the reciprocity identity H(k)^T == H(-k) hold entrywise with
/// zero tolerance.
Complex unit_phase(double a);

/// Momentum-space Hamiltonian H(k) in the (A,B,D,C) basis, cell-position
/// gauge: hopping phases carry only the integer lattice vector separating
/// the two cells, so H is exactly 2*pi-periodic in each component.
BlochMatrix build_bloch(const ModelParams& params, Momentum k);

/// Eigenvalue of the 2x2 kx-factor: sign * sqrt(m^2 + 2 t^2 (1 + cos kx)).
double x_factor_energy(const ModelParams& params, double kx, int sign);

/// Eigenvalue of the 2x2 ky-factor:
/// -i*gamma/2 + sign * sqrt(2 t^2 (1 + cos ky) - gamma^2/4), principal
/// square-root branch (the root turns imaginary where the argument is
/// negative).
Complex y_factor_energy(const ModelParams& params, double ky, int sign);

/// Branch labels (sx, sy) for band index 0..3 in fixed order
/// (+,+), (+,-), (-,+), (-,-).
constexpr int branch_sign_x(int band) { return band < 2 ? +1 : -1; }
constexpr int branch_sign_y(int band) { return band % 2 == 0 ? +1 : -1; }

/// Closed-form band energy eps_x^{sx}(kx) + eps_y^{sy}(ky) for one branch.
Complex band_energy(const ModelParams& params, Momentum k, int band);

/// All four closed-form band energies, indexed by branch.
std::array<Complex, 4> closed_form_bands(const ModelParams& params,
                                         Momentum k);

/// ky solutions of 2 t^2 (1 + cos ky) = gamma^2/4 in [-pi, pi), sorted
/// ascending: full lines kx in [-pi, pi) where H(k) is defective. Empty for
/// gamma = 0 (Hermitian) and for gamma^2/4 > 4 t^2.
std::vector<double> exceptional_lines(const ModelParams& params);

/// Distance from ky to the nearest exceptional line (infinity when none).
double exceptional_distance(const ModelParams& params, double ky);

}  // namespace skinlab
