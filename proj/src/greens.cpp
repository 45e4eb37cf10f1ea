#include "skinlab/greens.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "skinlab/errors.hpp"
#include "skinlab/io_util.hpp"

namespace skinlab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kExceptionalFlagDistance = 1e-6;

double wrap_pi(double x) { return Momentum::reduce(x); }

}  // namespace

double spectral_function(const ModelParams& params, double E, Momentum k) {
  if (!(params.eta > 0.0))
    throw PreconditionError("spectral_function: eta must be > 0");
  BlochMatrix M = -build_bloch(params, k);
  M.diagonal().array() += Complex(E, params.eta);
  Eigen::PartialPivLU<BlochMatrix> lu(M);
  Complex trace = lu.solve(BlochMatrix::Identity()).trace();
  double a = -trace.imag();
  if (!std::isfinite(a))
    throw Error("spectral_function: non-finite resolvent trace");
  return a;
}

double SpectralGrid::max_value() const {
  double best = 0.0;
  for (double v : values) best = std::max(best, v);
  return best;
}

SpectralGrid afunc_grid(const ModelParams& params, double E, int gridN) {
  params.validate();
  if (gridN < 16) throw PreconditionError("afunc_grid: gridN must be >= 16");
  SpectralGrid grid;
  grid.energy = E;
  grid.eta = params.eta;
  grid.gridN = gridN;
  grid.values.assign(static_cast<size_t>(gridN) * gridN, 0.0);
  const double h = kTwoPi / gridN;
  parallel_for(gridN, [&](int j) {
    const double ky = -kPi + j * h;
    for (int i = 0; i < gridN; ++i) {
      const double kx = -kPi + i * h;
      grid.values[static_cast<size_t>(j) * gridN + i] =
          spectral_function(params, E, Momentum(kx, ky));
    }
  });
  return grid;
}

namespace {

// Marching squares over one band's field f(k) = Re eps_band(k) - E.
// Edge-crossing vertices are interpolated once per mesh edge and chained
// into polylines through cell segments; saddles are split by the sign of
// the cell-center average.
class ContourTracer {
 public:
  ContourTracer(const ModelParams& params, double E, int gridN, int band)
      : params_(params), energy_(E), n_(gridN), band_(band) {
    field_.resize(static_cast<size_t>(n_) * n_);
    const double h = kTwoPi / n_;
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < n_; ++i)
        field_[static_cast<size_t>(j) * n_ + i] =
            band_energy(params_, Momentum(-kPi + i * h, -kPi + j * h), band_)
                .real() -
            energy_;

    const size_t edges = num_edges();
    vertex_kx_.assign(edges, 0.0);
    vertex_ky_.assign(edges, 0.0);
    crossed_.assign(edges, 0);
    neighbor_[0].assign(edges, -1);
    neighbor_[1].assign(edges, -1);
    visited_.assign(edges, 0);

    find_crossings();
    link_cells();
  }

  std::vector<EfcContour> trace() {
    std::vector<EfcContour> out;
    // open paths first (edges with exactly one linked neighbor)
    for (size_t e = 0; e < crossed_.size(); ++e)
      if (crossed_[e] && !visited_[e] && degree(e) == 1)
        out.push_back(walk(static_cast<long>(e), false));
    // remaining closed loops
    for (size_t e = 0; e < crossed_.size(); ++e)
      if (crossed_[e] && !visited_[e] && degree(e) > 0)
        out.push_back(walk(static_cast<long>(e), true));
    return out;
  }

 private:
  size_t num_edges() const {
    return 2 * static_cast<size_t>(n_) * (n_ - 1);
  }
  // horizontal edge (i, j): node (i,j) -> (i+1,j), i in [0, n-2]
  long hedge(int i, int j) const {
    return static_cast<long>(j) * (n_ - 1) + i;
  }
  // vertical edge (i, j): node (i,j) -> (i,j+1), j in [0, n-2]
  long vedge(int i, int j) const {
    return static_cast<long>(n_) * (n_ - 1) + static_cast<long>(j) * n_ + i;
  }
  double f(int i, int j) const { return field_[static_cast<size_t>(j) * n_ + i]; }
  static bool positive(double v) { return v > 0.0; }

  void find_crossings() {
    const double h = kTwoPi / n_;
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i + 1 < n_; ++i) {
        double fa = f(i, j), fb = f(i + 1, j);
        if (positive(fa) == positive(fb)) continue;
        long e = hedge(i, j);
        double tau = fa / (fa - fb);
        crossed_[static_cast<size_t>(e)] = 1;
        vertex_kx_[static_cast<size_t>(e)] = -kPi + i * h + tau * h;
        vertex_ky_[static_cast<size_t>(e)] = -kPi + j * h;
      }
    for (int j = 0; j + 1 < n_; ++j)
      for (int i = 0; i < n_; ++i) {
        double fa = f(i, j), fb = f(i, j + 1);
        if (positive(fa) == positive(fb)) continue;
        long e = vedge(i, j);
        double tau = fa / (fa - fb);
        crossed_[static_cast<size_t>(e)] = 1;
        vertex_kx_[static_cast<size_t>(e)] = -kPi + i * h;
        vertex_ky_[static_cast<size_t>(e)] = -kPi + j * h + tau * h;
      }
  }

  void link(long a, long b) {
    for (long e : {a, b}) {
      size_t idx = static_cast<size_t>(e);
      if (neighbor_[0][idx] < 0)
        neighbor_[0][idx] = (e == a) ? b : a;
      else
        neighbor_[1][idx] = (e == a) ? b : a;
    }
  }

  void link_cells() {
    for (int j = 0; j + 1 < n_; ++j)
      for (int i = 0; i + 1 < n_; ++i) {
        bool bl = positive(f(i, j)), br = positive(f(i + 1, j));
        bool tl = positive(f(i, j + 1)), tr = positive(f(i + 1, j + 1));
        int config = (bl ? 1 : 0) | (br ? 2 : 0) | (tl ? 4 : 0) | (tr ? 8 : 0);
        if (config == 0 || config == 15) continue;
        long bottom = hedge(i, j), top = hedge(i, j + 1);
        long left = vedge(i, j), right = vedge(i + 1, j);
        switch (config) {
          case 1: case 14: link(bottom, left); break;
          case 2: case 13: link(bottom, right); break;
          case 4: case 11: link(left, top); break;
          case 8: case 7:  link(right, top); break;
          case 3: case 12: link(left, right); break;
          case 5: case 10: link(bottom, top); break;
          case 6: case 9: {
            // saddle: split by the center average
            double fc = 0.25 * (f(i, j) + f(i + 1, j) + f(i, j + 1) +
                                f(i + 1, j + 1));
            bool center = positive(fc);
            if (center == bl) {
              link(bottom, right);
              link(left, top);
            } else {
              link(bottom, left);
              link(right, top);
            }
            break;
          }
        }
      }
  }

  int degree(size_t e) const {
    return (neighbor_[0][e] >= 0 ? 1 : 0) + (neighbor_[1][e] >= 0 ? 1 : 0);
  }

  EfcContour walk(long start, bool closed) {
    EfcContour contour;
    contour.band = band_;
    contour.energy = energy_;
    contour.closed = closed;

    long prev = -1;
    long cur = start;
    while (cur >= 0) {
      size_t idx = static_cast<size_t>(cur);
      visited_[idx] = 1;
      append_vertex(contour, idx);
      long n0 = neighbor_[0][idx], n1 = neighbor_[1][idx];
      long next = (n0 != prev && n0 >= 0 && !visited_[static_cast<size_t>(n0)])
                      ? n0
                      : (n1 != prev && n1 >= 0 &&
                                 !visited_[static_cast<size_t>(n1)]
                             ? n1
                             : -1);
      prev = cur;
      cur = next;
    }
    return contour;
  }

  void append_vertex(EfcContour& contour, size_t e) {
    Momentum k(vertex_kx_[e], vertex_ky_[e]);
    contour.polyline.push_back(k);
    contour.lifetimes.push_back(band_energy(params_, k, band_).imag());
    contour.dos.push_back(spectral_function(params_, energy_, k));
    contour.near_exceptional.push_back(
        exceptional_distance(params_, k.ky) < kExceptionalFlagDistance ? 1 : 0);
  }

  const ModelParams& params_;
  double energy_;
  int n_;
  int band_;
  std::vector<double> field_;
  std::vector<double> vertex_kx_, vertex_ky_;
  std::vector<char> crossed_, visited_;
  std::vector<long> neighbor_[2];
};

}  // namespace

std::vector<EfcContour> extract_efc(const ModelParams& params, double E,
                                    int gridN) {
  params.validate();
  if (gridN < 64) throw PreconditionError("extract_efc: gridN must be >= 64");
  std::vector<EfcContour> contours;
  for (int band = 0; band < 4; ++band) {
    ContourTracer tracer(params, E, gridN, band);
    for (EfcContour& c : tracer.trace()) contours.push_back(std::move(c));
  }
  return contours;
}

DdsReport dds_metric(const ModelParams& params, double E, int gridN,
                     double threshold) {
  DdsReport report;
  report.energy = E;
  report.gridN = gridN;
  report.threshold = threshold > 0 ? threshold : 0.1 * params.gamma;
  report.contours = extract_efc(params, E, gridN);

  double im_min = std::numeric_limits<double>::infinity();
  double im_max = -std::numeric_limits<double>::infinity();
  double dos_min = std::numeric_limits<double>::infinity();
  double dos_max = 0.0;
  bool any = false;
  for (const EfcContour& c : report.contours)
    for (size_t v = 0; v < c.size(); ++v) {
      any = true;
      im_min = std::min(im_min, c.lifetimes[v]);
      im_max = std::max(im_max, c.lifetimes[v]);
      dos_min = std::min(dos_min, c.dos[v]);
      dos_max = std::max(dos_max, c.dos[v]);
    }
  if (any) {
    report.delta = im_max - im_min;
    report.dos_ratio = dos_max / dos_min;
  }
  report.verdict = any && report.delta > report.threshold;
  return report;
}

std::string edge_name(EdgeOrientation e) {
  switch (e) {
    case EdgeOrientation::vertical: return "vertical";
    case EdgeOrientation::horizontal: return "horizontal";
    case EdgeOrientation::oblique: return "oblique";
  }
  return "?";
}

ChannelReport scattering_channels(const ModelParams& params, double E,
                                  Momentum k_i, EdgeOrientation edge,
                                  int gridN, double open_fraction) {
  auto contours = extract_efc(params, E, gridN);
  const double tol = 2.0 * (kTwoPi / gridN);

  struct Vertex {
    Momentum k;
    int band;
    double lifetime;
    double dos;
  };
  std::vector<Vertex> verts;
  for (const EfcContour& c : contours)
    for (size_t v = 0; v < c.size(); ++v)
      verts.push_back({c.polyline[v], c.band, c.lifetimes[v], c.dos[v]});

  // snap the incident momentum to the nearest contour vertex (torus metric)
  long best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t v = 0; v < verts.size(); ++v) {
    double d = std::hypot(wrap_pi(verts[v].k.kx - k_i.kx),
                          wrap_pi(verts[v].k.ky - k_i.ky));
    if (d < best_d) {
      best_d = d;
      best = static_cast<long>(v);
    }
  }
  if (best < 0)
    throw PreconditionError("scattering_channels: no contour at E = " + fmt(E));
  if (best_d > tol) {
    const Vertex& nv = verts[static_cast<size_t>(best)];
    throw PreconditionError(
        "scattering_channels: k_i = (" + fmt(k_i.kx) + ", " + fmt(k_i.ky) +
        ") is off-contour; nearest contour point is (" + fmt(nv.k.kx) + ", " +
        fmt(nv.k.ky) + ") at distance " + fmt(best_d));
  }
  const Vertex& inc = verts[static_cast<size_t>(best)];

  auto conserved = [edge](const Momentum& k) {
    switch (edge) {
      case EdgeOrientation::vertical: return k.ky;
      case EdgeOrientation::horizontal: return k.kx;
      case EdgeOrientation::oblique: return k.kx - k.ky;
    }
    return 0.0;
  };
  // momentum transfer along the edge normal; a genuine reflection channel
  // must change the normal component, not merely sit near the incident point
  auto normal_shift = [edge](double dkx, double dky) {
    switch (edge) {
      case EdgeOrientation::vertical: return std::fabs(dkx);
      case EdgeOrientation::horizontal: return std::fabs(dky);
      case EdgeOrientation::oblique:
        return std::fabs(dkx + dky) / std::sqrt(2.0);
    }
    return 0.0;
  };

  ChannelReport report;
  report.energy = E;
  report.gridN = gridN;
  report.edge = edge;
  report.tolerance = tol;
  report.open_fraction = open_fraction;
  report.requested = k_i;
  report.incident = inc.k;
  report.incident_band = inc.band;
  report.incident_dos = inc.dos;
  report.incident_lifetime = inc.lifetime;

  const double target = conserved(inc.k);
  for (const Vertex& v : verts) {
    double mismatch = wrap_pi(conserved(v.k) - target);
    if (std::fabs(mismatch) > tol) continue;
    double dkx = wrap_pi(v.k.kx - inc.k.kx);
    double dky = wrap_pi(v.k.ky - inc.k.ky);
    if (normal_shift(dkx, dky) <= tol) continue;
    ChannelReport::Partner partner;
    partner.k = v.k;
    partner.band = v.band;
    partner.lifetime = v.lifetime;
    partner.dos = v.dos;
    partner.mismatch = mismatch;
    partner.open = v.dos >= open_fraction * inc.dos;
    report.partners.push_back(partner);
  }
  std::sort(report.partners.begin(), report.partners.end(),
            [](const ChannelReport::Partner& a, const ChannelReport::Partner& b) {
              if (a.dos != b.dos) return a.dos > b.dos;
              if (a.k.kx != b.k.kx) return a.k.kx < b.k.kx;
              if (a.k.ky != b.k.ky) return a.k.ky < b.k.ky;
              return a.band < b.band;
            });
  report.skin_accumulating = std::none_of(
      report.partners.begin(), report.partners.end(),
      [](const ChannelReport::Partner& p) { return p.open; });
  return report;
}

void write_afunc_csv(const SpectralGrid& grid, std::ostream& os) {
  os << "kx,ky,a\n";
  const double h = kTwoPi / grid.gridN;
  for (int j = 0; j < grid.gridN; ++j) {
    const double ky = -kPi + j * h;
    for (int i = 0; i < grid.gridN; ++i) {
      const double kx = -kPi + i * h;
      os << fmt(kx) << ',' << fmt(ky) << ',' << fmt(grid.at(i, j)) << '\n';
    }
  }
}

void write_afunc_pgm(const SpectralGrid& grid, std::ostream& os) {
  const double vmax = grid.max_value();
  os << "P5\n" << grid.gridN << ' ' << grid.gridN << "\n255\n";
  for (int j = grid.gridN - 1; j >= 0; --j) {
    for (int i = 0; i < grid.gridN; ++i) {
      double scaled = vmax > 0 ? 255.0 * grid.at(i, j) / vmax : 0.0;
      int pixel = static_cast<int>(std::floor(scaled + 0.5));
      pixel = std::clamp(pixel, 0, 255);
      os.put(static_cast<char>(static_cast<unsigned char>(pixel)));
    }
  }
}

void write_contours_txt(const std::vector<EfcContour>& contours,
                        std::ostream& os) {
  os << "[contours]\n";
  os << "count = " << contours.size() << '\n';
  for (size_t c = 0; c < contours.size(); ++c) {
    const EfcContour& contour = contours[c];
    os << "\n[contour " << c << "]\n";
    os << "band = " << contour.band << '\n';
    os << "energy = " << fmt(contour.energy) << '\n';
    os << "closed = " << (contour.closed ? "yes" : "no") << '\n';
    os << "vertices = " << contour.size() << '\n';
    os << "# kx ky im_eps a\n";
    for (size_t v = 0; v < contour.size(); ++v) {
      os << fmt(contour.polyline[v].kx) << ' ' << fmt(contour.polyline[v].ky)
         << ' ' << fmt(contour.lifetimes[v]) << ' ' << fmt(contour.dos[v]);
      if (contour.near_exceptional[v]) os << " near-exceptional";
      os << '\n';
    }
  }
}

void write_dds_txt(const DdsReport& report, const ModelParams& params,
                   std::ostream& os) {
  os << "[dds]\n";
  os << "energy = " << fmt(report.energy) << '\n';
  os << "eta = " << fmt(params.eta) << '\n';
  os << "grid = " << report.gridN << '\n';
  os << "threshold = " << fmt(report.threshold) << '\n';
  os << "contour_count = " << report.contours.size() << '\n';
  size_t vertices = 0;
  for (const EfcContour& c : report.contours) vertices += c.size();
  os << "vertex_count = " << vertices << '\n';
  os << "delta = " << fmt(report.delta) << '\n';
  os << "dos_ratio = " << fmt(report.dos_ratio) << '\n';
  os << "verdict = " << (report.verdict ? "dds" : "no-dds") << '\n';
}

void write_channels_txt(const ChannelReport& report, const ModelParams& params,
                        std::ostream& os) {
  os << "[scattering]\n";
  os << "energy = " << fmt(report.energy) << '\n';
  os << "eta = " << fmt(params.eta) << '\n';
  os << "grid = " << report.gridN << '\n';
  os << "edge = " << edge_name(report.edge) << '\n';
  os << "tolerance = " << fmt(report.tolerance) << '\n';
  os << "open_fraction = " << fmt(report.open_fraction) << '\n';
  os << "k_requested = " << fmt(report.requested.kx) << ' '
     << fmt(report.requested.ky) << '\n';
  os << "k_incident = " << fmt(report.incident.kx) << ' '
     << fmt(report.incident.ky) << '\n';
  os << "incident_band = " << report.incident_band << '\n';
  os << "incident_dos = " << fmt(report.incident_dos) << '\n';
  os << "incident_lifetime = " << fmt(report.incident_lifetime) << '\n';
  os << "partner_count = " << report.partners.size() << '\n';
  os << "# kx ky band im_eps a mismatch status\n";
  for (const auto& p : report.partners) {
    os << fmt(p.k.kx) << ' ' << fmt(p.k.ky) << ' ' << p.band << ' '
       << fmt(p.lifetime) << ' ' << fmt(p.dos) << ' ' << fmt(p.mismatch) << ' '
       << (p.open ? "open" : "closed") << '\n';
  }
  os << "verdict = "
     << (report.skin_accumulating ? "skin-accumulating" : "reflective") << '\n';
}

}  // namespace skinlab
