#include "skinlab/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace skinlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void ModelParams::validate() const {
  if (!(t > 0.0)) throw std::invalid_argument("ModelParams: t must be > 0");
  if (!(gamma >= 0.0))
    throw std::invalid_argument("ModelParams: gamma must be >= 0");
  if (!(eta > 0.0)) throw std::invalid_argument("ModelParams: eta must be > 0");
  if (!std::isfinite(m)) throw std::invalid_argument("ModelParams: m not finite");
}

double Momentum::reduce(double k) {
  double r = std::remainder(k, kTwoPi);
  // remainder lands in [-pi, pi]; fold the closed upper endpoint.
  if (r >= kTwoPi / 2.0) r -= kTwoPi;
  return r;
}

char sublattice_name(Sublattice s) {
  switch (s) {
    case Sublattice::A: return 'A';
    case Sublattice::B: return 'B';
    case Sublattice::D: return 'D';
    case Sublattice::C: return 'C';
  }
  return '?';
}

Complex onsite_energy(const ModelParams& p, Sublattice s) {
  switch (s) {
    case Sublattice::A: return Complex(-p.m, 0.0);
    case Sublattice::B: return Complex(+p.m, 0.0);
    case Sublattice::D: return Complex(-p.m, -p.gamma);
    case Sublattice::C: return Complex(+p.m, -p.gamma);
  }
  return Complex(0.0, 0.0);
}

Complex unit_phase(double a) {
  // Evaluate sin/cos on |a| and restore the sign by hand, so that
  // unit_phase(-a) == conj(unit_phase(a)) bit-for-bit regardless of libm.
  // The zone boundary is pinned to the exact real value -1: sin(fl(pi))
  // is ~1.2e-16 rather than 0, and that residue would break the exact
  // reciprocity and periodicity identities at k = +-pi.
  double aa = std::fabs(a);
  double c, s;
  if (aa == kTwoPi / 2.0) {
    c = -1.0;
    s = 0.0;
  } else {
    c = std::cos(aa);
    s = std::sin(aa);
  }
  return Complex(c, std::signbit(a) ? -s : s);
}

BlochMatrix build_bloch(const ModelParams& p, Momentum k) {
  p.validate();
  const int A = 0, B = 1, D = 2, C = 3;
  const Complex px = unit_phase(k.kx);  // e^{+i kx}
  const Complex py = unit_phase(k.ky);

  // Horizontal bonds A-B and D-C: the partner at -x/2 sits in the same
  // cell, the one at +x/2 in the cell at +x. Vertical bonds A-D and B-C
  // likewise along y. Cell-position gauge: only those integer lattice
  // vectors enter the phases.
  const Complex hx = p.t * (1.0 + std::conj(px));
  const Complex hxT = p.t * (1.0 + px);
  const Complex hy = p.t * (1.0 + std::conj(py));
  const Complex hyT = p.t * (1.0 + py);

  BlochMatrix H = BlochMatrix::Zero();
  H(A, A) = onsite_energy(p, Sublattice::A);
  H(B, B) = onsite_energy(p, Sublattice::B);
  H(D, D) = onsite_energy(p, Sublattice::D);
  H(C, C) = onsite_energy(p, Sublattice::C);
  H(A, B) = hx;
  H(B, A) = hxT;
  H(D, C) = hx;
  H(C, D) = hxT;
  H(A, D) = hy;
  H(D, A) = hyT;
  H(B, C) = hy;
  H(C, B) = hyT;
  return H;
}

double x_factor_energy(const ModelParams& p, double kx, int sign) {
  return sign * std::sqrt(p.m * p.m + 2.0 * p.t * p.t * (1.0 + std::cos(kx)));
}

Complex y_factor_energy(const ModelParams& p, double ky, int sign) {
  Complex disc(2.0 * p.t * p.t * (1.0 + std::cos(ky)) -
                   p.gamma * p.gamma / 4.0,
               0.0);
  return Complex(0.0, -p.gamma / 2.0) + double(sign) * std::sqrt(disc);
}

Complex band_energy(const ModelParams& p, Momentum k, int band) {
  return Complex(x_factor_energy(p, k.kx, branch_sign_x(band)), 0.0) +
         y_factor_energy(p, k.ky, branch_sign_y(band));
}

std::array<Complex, 4> closed_form_bands(const ModelParams& p, Momentum k) {
  p.validate();
  std::array<Complex, 4> bands;
  for (int j = 0; j < 4; ++j) bands[j] = band_energy(p, k, j);
  return bands;
}

std::vector<double> exceptional_lines(const ModelParams& p) {
  p.validate();
  if (p.gamma == 0.0) return {};  // Hermitian: degeneracies are diabolic
  double c = p.gamma * p.gamma / (8.0 * p.t * p.t) - 1.0;
  if (c > 1.0) return {};  // y-factor discriminant never vanishes
  double a = std::acos(c);
  if (a == 0.0) return {0.0};
  return {-a, a};
}

double exceptional_distance(const ModelParams& p, double ky) {
  auto lines = exceptional_lines(p);
  double best = std::numeric_limits<double>::infinity();
  for (double line : lines)
    best = std::min(best, std::fabs(Momentum::reduce(ky) - line));
  return best;
}

}  // namespace skinlab
