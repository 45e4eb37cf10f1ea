#pragma once

#include <ostream>
#include <vector>

#include "skinlab/model.hpp"

namespace skinlab {

/// Momentum-resolved spectral function
///   A(E, k) = -Im Tr[(E + i*eta - H(k))^{-1}],
/// evaluated by direct LU solve of the 4x4 resolvent. Strictly positive for
/// eta > 0 since every eigenvalue has Im <= 0.
double spectral_function(const ModelParams& params, double E, Momentum k);

/// A(E, k) sampled on the uniform gridN x gridN BZ mesh. values is
/// row-major with ky as the row index: values[j * gridN + i] = A(kx_i, ky_j).
struct SpectralGrid {
  double energy = 0.0;
  double eta = 0.0;
  int gridN = 0;
  std::vector<double> values;

  double at(int i, int j) const {
    return values[static_cast<size_t>(j) * gridN + i];
  }
  double max_value() const;
};

/// Requires gridN >= 16.
SpectralGrid afunc_grid(const ModelParams& params, double E, int gridN);

/// One connected equal-frequency polyline of a single closed-form band:
/// the marching-squares isocontour of Re eps_band(k) = E. Vertices carry the
/// band lifetime Im eps_band and the spectral function A at that momentum.
/// near_exceptional flags vertices within 1e-6 of an exceptional line, where
/// the branch labels swap and interpolation across is unreliable.
struct EfcContour {
  int band = 0;
  double energy = 0.0;
  bool closed = false;
  std::vector<Momentum> polyline;
  std::vector<double> lifetimes;
  std::vector<double> dos;
  std::vector<char> near_exceptional;

  size_t size() const { return polyline.size(); }
};

/// Extracts the EFC of every band at E on a gridN x gridN mesh. Bands are
/// processed in fixed branch order; an empty result means no band crosses E.
/// Requires gridN >= 64.
std::vector<EfcContour> extract_efc(const ModelParams& params, double E,
                                    int gridN);

/// Dynamical-degeneracy-splitting metrics on the EFC at energy E.
/// delta = spread of Im eps over all contour vertices; dos_ratio = max/min
/// of A over the same vertices; verdict = (delta > threshold) and contours
/// exist.
struct DdsReport {
  double energy = 0.0;
  int gridN = 0;
  double threshold = 0.0;
  double delta = 0.0;
  double dos_ratio = 0.0;
  bool verdict = false;
  std::vector<EfcContour> contours;
};

/// threshold <= 0 selects the default 0.1 * gamma.
DdsReport dds_metric(const ModelParams& params, double E, int gridN,
                     double threshold = -1.0);

enum class EdgeOrientation : int { vertical = 0, horizontal = 1, oblique = 2 };

std::string edge_name(EdgeOrientation e);

constexpr double kDefaultOpenFraction = 0.1;

/// Elastic scattering channels for a wave packet at k_i hitting an edge.
/// The incident point is snapped to the nearest contour vertex; partners are
/// contour vertices (any band) that conserve the edge's parallel momentum
/// within tolerance and whose momentum transfer along the edge normal
/// exceeds tolerance. A partner is open when A(partner) >= f * A(incident).
/// The edge is skin-accumulating when no partner is open.
struct ChannelReport {
  double energy = 0.0;
  int gridN = 0;
  EdgeOrientation edge = EdgeOrientation::vertical;
  double tolerance = 0.0;      // conservation / separation tolerance
  double open_fraction = 0.0;  // f

  Momentum requested;  // k_i as given
  Momentum incident;   // snapped contour vertex
  int incident_band = 0;
  double incident_dos = 0.0;
  double incident_lifetime = 0.0;

  struct Partner {
    Momentum k;
    int band = 0;
    double lifetime = 0.0;
    double dos = 0.0;
    double mismatch = 0.0;  // conserved-component violation
    bool open = false;
  };
  std::vector<Partner> partners;  // sorted by dos descending
  bool skin_accumulating = false;
};

/// Conservation laws: vertical edge conserves ky, horizontal conserves kx,
/// oblique (staircase along (1,-1)) conserves kx - ky, all modulo 2*pi.
/// Throws PreconditionError (naming the nearest contour point) when k_i is
/// farther than 2 * (2*pi/gridN) from every contour vertex.
ChannelReport scattering_channels(const ModelParams& params, double E,
                                  Momentum k_i, EdgeOrientation edge,
                                  int gridN,
                                  double open_fraction = kDefaultOpenFraction);

/// SpectralGrid CSV: kx,ky,a row-major (ky rows ascending, kx fastest).
void write_afunc_csv(const SpectralGrid& grid, std::ostream& os);

/// 8-bit binary PGM heatmap, linear scaling with the grid maximum mapped to
/// white. Rows run from ky = +pi - h at the top down to ky = -pi.
void write_afunc_pgm(const SpectralGrid& grid, std::ostream& os);

/// Contours as structured text: one polyline block per contour with
/// kx ky im_eps a per vertex.
void write_contours_txt(const std::vector<EfcContour>& contours,
                        std::ostream& os);

void write_dds_txt(const DdsReport& report, const ModelParams& params,
                   std::ostream& os);

void write_channels_txt(const ChannelReport& report, const ModelParams& params,
                        std::ostream& os);

}  // namespace skinlab
