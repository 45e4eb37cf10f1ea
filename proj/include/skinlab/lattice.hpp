#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "skinlab/model.hpp"

namespace skinlab {

enum class Shape : int { square = 0, triangle = 1, polygon = 2 };

std::string shape_name(Shape s);

enum class BoundaryClass : int {
  bulk = 0,
  edge_bottom = 1,
  edge_left = 2,
  edge_right = 3,
  edge_top = 4,
  edge_oblique = 5,
  corner = 6,
};

constexpr int kNumBoundaryClasses = 7;

std::string boundary_class_name(BoundaryClass c);

struct SiteInfo {
  int ix = 0;  ///< cell column
  int iy = 0;  ///< cell row
  Sublattice sub = Sublattice::A;
  double x = 0.0;  ///< position in lattice-constant units
  double y = 0.0;
  BoundaryClass boundary = BoundaryClass::bulk;
};

struct CellCoord {
  int ix = 0;
  int iy = 0;
};

/// A finite open-boundary geometry. Sites are stored in the deterministic
/// order (iy, ix, sublattice) with sublattices in (A,B,D,C) order, so
/// indices are stable across runs. Immutable after construction.
class LatticeGeometry {
 public:
  Shape shape() const { return shape_; }
  int L() const { return L_; }
  int cell_count() const { return cell_count_; }
  int site_count() const { return static_cast<int>(sites_.size()); }
  const std::vector<SiteInfo>& sites() const { return sites_; }
  const SiteInfo& site(int i) const { return sites_[static_cast<size_t>(i)]; }

  /// Site index at half-lattice coordinates (X, Y) = (2 ix + sx, 2 iy + sy),
  /// or nullopt when that site is outside the geometry.
  std::optional<int> site_at(int X, int Y) const;

  /// Half-lattice coordinates of site i.
  std::pair<int, int> half_coords(int i) const;

  friend LatticeGeometry build_geometry(Shape shape, int L);
  friend LatticeGeometry build_polygon(int L,
                                       const std::vector<CellCoord>& cells);

 private:
  LatticeGeometry() = default;

  static LatticeGeometry from_cells(Shape shape, int L,
                                    std::vector<CellCoord> cells);
  void classify();

  Shape shape_ = Shape::square;
  int L_ = 0;
  int cell_count_ = 0;
  std::vector<SiteInfo> sites_;
  std::unordered_map<std::uint64_t, int> index_;  // (X,Y) -> site index
};

/// Builds the square (cells 0 <= ix, iy < L) or triangle (cells with
/// ix + iy <= L - 1, staircase hypotenuse) geometry.
/// Throws GeometryError for L < 1 or shape == polygon (use build_polygon).
LatticeGeometry build_geometry(Shape shape, int L);

/// Builds a geometry from an explicit kept-cell list. L is the bounding
/// characteristic length (used for bookkeeping only). Boundary sites get
/// the generic missing-neighbor classification; edge_oblique is assigned
/// only by the triangle rule.
LatticeGeometry build_polygon(int L, const std::vector<CellCoord>& cells);

/// Boundary class per site, in site order. The classes are also stored in
/// SiteInfo; this is the standalone classification table.
std::vector<BoundaryClass> classify_boundary(const LatticeGeometry& geometry);

/// Real-space Hamiltonian on a finite geometry: on-site energies on the
/// diagonal, t on every nearest-neighbor bond interior to the geometry.
/// Complex symmetric (reciprocal); Hermitian when gamma = 0.
struct ObcHamiltonian {
  int dim = 0;
  Eigen::SparseMatrix<Complex> matrix;

  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix); }
};

ObcHamiltonian assemble_obc(const ModelParams& params,
                            const LatticeGeometry& geometry);

/// Geometry CSV: site_index,ix,iy,sublattice,x,y,boundary_class.
void write_geometry_csv(const LatticeGeometry& geometry, std::ostream& os);

}  // namespace skinlab
