#pragma once

#include <array>
#include <string>
#include <vector>

#include "skinlab/greens.hpp"
#include "skinlab/lattice.hpp"
#include "skinlab/model.hpp"
#include "skinlab/spectra.hpp"

namespace skinlab {

/// Run configuration parsed from the canonical JSON config file. Parsing is
/// strict: unknown keys and out-of-range values are rejected with the
/// offending key named. Physics defaults are the reference parameter set
/// (t = 1, m = 2, gamma = 2, eta = 0.05); everything else has the defaults
/// below.
struct RunConfig {
  ModelParams model;

  Shape shape = Shape::square;
  int L = 16;

  int pbc_grid = 201;
  int afunc_grid = 301;
  double raster_cell = 0.05;

  double skin_ratio = kDefaultSkinRatio;
  double dds_split = -1.0;  // <= 0: use 0.1 * gamma
  double open_fraction = kDefaultOpenFraction;

  std::string output_dir = "out";
  int dense_cap = kDefaultDenseCap;

  // command-specific arguments
  std::vector<double> energies = {2.7, -3.3, -1.7, 4.5};
  std::array<double, 2> k_incident = {0.86, -3.141592653589793};
  EdgeOrientation edge = EdgeOrientation::oblique;
  bool want_pbc = true;                 // `spectrum`: also emit PBC cloud
  std::vector<double> w_window;         // `wn`: optional [re_min, re_max]
  double report_window = 0.4;           // `report`: half-width of Re window

  double dds_threshold() const {
    return dds_split > 0 ? dds_split : 0.1 * model.gamma;
  }
};

/// Loads and validates a config file. Throws ConfigError with line/key
/// diagnostics on malformed JSON, unknown keys, wrong types, or
/// out-of-range values.
RunConfig load_config(const std::string& path);

}  // namespace skinlab
