#include "skinlab/lattice.hpp"

#include <algorithm>
#include <vector>

#include "skinlab/errors.hpp"
#include "skinlab/io_util.hpp"

namespace skinlab {

namespace {

std::uint64_t half_key(int X, int Y) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(X)) << 32) |
         static_cast<std::uint32_t>(Y);
}

}  // namespace

// Classifies every site by its missing nearest neighbors. The staircase
// rule: on a triangle, a boundary site whose missing neighbors all point in
// +x or +y while its cell sits on the diagonal ix + iy = L - 1 belongs to
// the oblique edge (this covers the two-missing C corners of each step).
void LatticeGeometry::classify() {
  for (SiteInfo& st : sites_) {
    int X = 2 * st.ix + kSubOffsetX[static_cast<int>(st.sub)];
    int Y = 2 * st.iy + kSubOffsetY[static_cast<int>(st.sub)];
    bool miss_xm = !site_at(X - 1, Y).has_value();
    bool miss_xp = !site_at(X + 1, Y).has_value();
    bool miss_ym = !site_at(X, Y - 1).has_value();
    bool miss_yp = !site_at(X, Y + 1).has_value();
    int missing = miss_xm + miss_xp + miss_ym + miss_yp;

    if (missing == 0) {
      st.boundary = BoundaryClass::bulk;
    } else if (shape_ == Shape::triangle && !miss_xm && !miss_ym &&
               st.ix + st.iy == L_ - 1) {
      st.boundary = BoundaryClass::edge_oblique;
    } else if (missing >= 2) {
      st.boundary = BoundaryClass::corner;
    } else if (miss_ym) {
      st.boundary = BoundaryClass::edge_bottom;
    } else if (miss_xm) {
      st.boundary = BoundaryClass::edge_left;
    } else if (miss_xp) {
      st.boundary = BoundaryClass::edge_right;
    } else {
      st.boundary = BoundaryClass::edge_top;
    }
  }
}

LatticeGeometry LatticeGeometry::from_cells(Shape shape, int L,
                                            std::vector<CellCoord> cells) {
  if (cells.empty()) throw GeometryError("geometry has no cells");
  std::sort(cells.begin(), cells.end(), [](CellCoord a, CellCoord b) {
    return a.iy != b.iy ? a.iy < b.iy : a.ix < b.ix;
  });

  LatticeGeometry g;
  g.shape_ = shape;
  g.L_ = L;
  g.cell_count_ = static_cast<int>(cells.size());
  g.sites_.reserve(cells.size() * kNumSublattices);
  for (const CellCoord& c : cells) {
    for (int s = 0; s < kNumSublattices; ++s) {
      SiteInfo st;
      st.ix = c.ix;
      st.iy = c.iy;
      st.sub = static_cast<Sublattice>(s);
      st.x = c.ix + 0.5 * kSubOffsetX[s];
      st.y = c.iy + 0.5 * kSubOffsetY[s];
      int idx = static_cast<int>(g.sites_.size());
      g.index_[half_key(2 * c.ix + kSubOffsetX[s], 2 * c.iy + kSubOffsetY[s])] =
          idx;
      g.sites_.push_back(st);
    }
  }
  g.classify();
  return g;
}

std::string shape_name(Shape s) {
  switch (s) {
    case Shape::square: return "square";
    case Shape::triangle: return "triangle";
    case Shape::polygon: return "polygon";
  }
  return "?";
}

std::string boundary_class_name(BoundaryClass c) {
  switch (c) {
    case BoundaryClass::bulk: return "bulk";
    case BoundaryClass::edge_bottom: return "edge_bottom";
    case BoundaryClass::edge_left: return "edge_left";
    case BoundaryClass::edge_right: return "edge_right";
    case BoundaryClass::edge_top: return "edge_top";
    case BoundaryClass::edge_oblique: return "edge_oblique";
    case BoundaryClass::corner: return "corner";
  }
  return "?";
}

std::optional<int> LatticeGeometry::site_at(int X, int Y) const {
  auto it = index_.find(half_key(X, Y));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::pair<int, int> LatticeGeometry::half_coords(int i) const {
  const SiteInfo& st = sites_[static_cast<size_t>(i)];
  return {2 * st.ix + kSubOffsetX[static_cast<int>(st.sub)],
          2 * st.iy + kSubOffsetY[static_cast<int>(st.sub)]};
}

LatticeGeometry build_geometry(Shape shape, int L) {
  if (L < 1) throw GeometryError("invalid geometry: L must be >= 1");
  std::vector<CellCoord> cells;
  switch (shape) {
    case Shape::square:
      for (int iy = 0; iy < L; ++iy)
        for (int ix = 0; ix < L; ++ix) cells.push_back({ix, iy});
      break;
    case Shape::triangle:
      for (int iy = 0; iy < L; ++iy)
        for (int ix = 0; ix + iy <= L - 1; ++ix) cells.push_back({ix, iy});
      break;
    case Shape::polygon:
      throw GeometryError(
          "invalid geometry: polygon requires an explicit cell list "
          "(build_polygon)");
  }
  return LatticeGeometry::from_cells(shape, L, std::move(cells));
}

LatticeGeometry build_polygon(int L, const std::vector<CellCoord>& cells) {
  if (L < 1) throw GeometryError("invalid geometry: L must be >= 1");
  return LatticeGeometry::from_cells(Shape::polygon, L, cells);
}

std::vector<BoundaryClass> classify_boundary(const LatticeGeometry& geometry) {
  std::vector<BoundaryClass> table;
  table.reserve(geometry.sites().size());
  for (const SiteInfo& st : geometry.sites()) table.push_back(st.boundary);
  return table;
}

ObcHamiltonian assemble_obc(const ModelParams& params,
                            const LatticeGeometry& geometry) {
  params.validate();
  const int N = geometry.site_count();
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<size_t>(N) * 5);
  for (int i = 0; i < N; ++i) {
    const SiteInfo& st = geometry.site(i);
    trips.emplace_back(i, i, onsite_energy(params, st.sub));
    auto [X, Y] = geometry.half_coords(i);
    // +x and +y neighbors only; the symmetric entry closes each bond.
    for (auto [dX, dY] : {std::pair<int, int>{1, 0}, std::pair<int, int>{0, 1}}) {
      if (auto j = geometry.site_at(X + dX, Y + dY)) {
        trips.emplace_back(i, *j, Complex(params.t, 0.0));
        trips.emplace_back(*j, i, Complex(params.t, 0.0));
      }
    }
  }
  ObcHamiltonian H;
  H.dim = N;
  H.matrix.resize(N, N);
  H.matrix.setFromTriplets(trips.begin(), trips.end());
  return H;
}

void write_geometry_csv(const LatticeGeometry& geometry, std::ostream& os) {
  os << "site_index,ix,iy,sublattice,x,y,boundary_class\n";
  for (int i = 0; i < geometry.site_count(); ++i) {
    const SiteInfo& st = geometry.site(i);
    os << i << ',' << st.ix << ',' << st.iy << ','
       << sublattice_name(st.sub) << ',' << fmt(st.x) << ',' << fmt(st.y)
       << ',' << boundary_class_name(st.boundary) << '\n';
  }
}

}  // namespace skinlab
