// skinlab command-line front end: parses a JSON run configuration,
// dispatches the analysis commands, and emits CSV / structured-text /
// graymap artifacts. All outputs are deterministic byte-for-byte for a
// fixed config.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "skinlab/config.hpp"
#include "skinlab/errors.hpp"
#include "skinlab/greens.hpp"
#include "skinlab/io_util.hpp"
#include "skinlab/lattice.hpp"
#include "skinlab/model.hpp"
#include "skinlab/spectra.hpp"

namespace {

using namespace skinlab;

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

std::string energy_tag(double e) { return "E" + fmt(e); }

void echo_params(const RunConfig& cfg, std::ostream& os) {
  os << "t = " << fmt(cfg.model.t) << '\n';
  os << "m = " << fmt(cfg.model.m) << '\n';
  os << "gamma = " << fmt(cfg.model.gamma) << '\n';
  os << "eta = " << fmt(cfg.model.eta) << '\n';
  os << "L = " << cfg.L << '\n';
}

int cmd_spectrum(const RunConfig& cfg) {
  LatticeGeometry geometry = build_geometry(cfg.shape, cfg.L);
  ObcHamiltonian H = assemble_obc(cfg.model, geometry);
  SpectrumResult spectrum = obc_spectrum(H, /*want_vectors=*/true, cfg.dense_cap);

  std::ostringstream geo;
  write_geometry_csv(geometry, geo);
  atomic_write(out_path(cfg, "geometry.csv"), geo.str());

  std::ostringstream obc;
  write_obc_csv(spectrum, obc);
  atomic_write(out_path(cfg, "obc_spectrum.csv"), obc.str());

  std::ostringstream summary;
  summary << "[spectrum]\n";
  echo_params(cfg, summary);
  summary << "shape = " << shape_name(cfg.shape) << '\n';
  summary << "sites = " << geometry.site_count() << '\n';

  if (cfg.want_pbc) {
    auto cloud = pbc_cloud(cfg.model, cfg.pbc_grid);
    std::ostringstream cloud_csv;
    write_cloud_csv(cloud, cloud_csv);
    atomic_write(out_path(cfg, "pbc_cloud.csv"), cloud_csv.str());
    summary << "pbc_grid = " << cfg.pbc_grid << '\n';
    summary << "raster_cell = " << fmt(cfg.raster_cell) << '\n';
    summary << "spectral_area = " << fmt(spectral_area(cloud, cfg.raster_cell))
            << '\n';
  }
  atomic_write(out_path(cfg, "spectrum.txt"), summary.str());
  return 0;
}

int cmd_wn(const RunConfig& cfg) {
  LatticeGeometry geometry = build_geometry(cfg.shape, cfg.L);
  ObcHamiltonian H = assemble_obc(cfg.model, geometry);
  SpectrumResult spectrum = obc_spectrum(H, /*want_vectors=*/true, cfg.dense_cap);

  std::optional<EnergyWindow> window;
  if (cfg.w_window.size() == 2)
    window = EnergyWindow{cfg.w_window[0], cfg.w_window[1]};
  WDistribution w = w_distribution(spectrum, geometry, window);

  std::ostringstream w_csv;
  write_w_csv(w, geometry, w_csv);
  atomic_write(out_path(cfg, "w_distribution.csv"), w_csv.str());

  std::ostringstream gdse;
  write_gdse_txt(gdse_report(w, geometry, cfg.skin_ratio), cfg.model, gdse);
  atomic_write(out_path(cfg, "gdse.txt"), gdse.str());
  return 0;
}

int cmd_afunc(const RunConfig& cfg) {
  for (double E : cfg.energies) {
    SpectralGrid grid = afunc_grid(cfg.model, E, cfg.afunc_grid);
    std::ostringstream csv;
    write_afunc_csv(grid, csv);
    atomic_write(out_path(cfg, "afunc_" + energy_tag(E) + ".csv"), csv.str());
    std::ostringstream pgm;
    write_afunc_pgm(grid, pgm);
    atomic_write(out_path(cfg, "afunc_" + energy_tag(E) + ".pgm"), pgm.str());
  }
  return 0;
}

int cmd_dds(const RunConfig& cfg) {
  for (double E : cfg.energies) {
    DdsReport report =
        dds_metric(cfg.model, E, cfg.afunc_grid, cfg.dds_threshold());
    std::ostringstream txt;
    write_dds_txt(report, cfg.model, txt);
    atomic_write(out_path(cfg, "dds_" + energy_tag(E) + ".txt"), txt.str());

    std::ostringstream contours;
    write_contours_txt(report.contours, contours);
    atomic_write(out_path(cfg, "contours_" + energy_tag(E) + ".txt"),
                 contours.str());
  }
  return 0;
}

int cmd_scatter(const RunConfig& cfg) {
  double E = cfg.energies.front();
  ChannelReport report = scattering_channels(
      cfg.model, E, Momentum(cfg.k_incident[0], cfg.k_incident[1]), cfg.edge,
      cfg.afunc_grid, cfg.open_fraction);
  std::ostringstream txt;
  write_channels_txt(report, cfg.model, txt);
  atomic_write(out_path(cfg, "channels_" + energy_tag(E) + ".txt"), txt.str());
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  const std::vector<double> energies = {2.7, -3.3, -1.7, 4.5};

  std::ostringstream os;
  os << "[report]\n";
  echo_params(cfg, os);
  os << "afunc_grid = " << cfg.afunc_grid << '\n';
  os << "dds_threshold = " << fmt(cfg.dds_threshold()) << '\n';
  os << "skin_ratio = " << fmt(cfg.skin_ratio) << '\n';
  os << "report_window = " << fmt(cfg.report_window) << '\n';

  // full-spectrum GDSE for both geometries
  SpectrumResult tri_spectrum;
  LatticeGeometry tri_geometry = build_geometry(Shape::triangle, cfg.L);
  for (Shape shape : {Shape::square, Shape::triangle}) {
    LatticeGeometry geometry = build_geometry(shape, cfg.L);
    ObcHamiltonian H = assemble_obc(cfg.model, geometry);
    SpectrumResult spectrum =
        obc_spectrum(H, /*want_vectors=*/true, cfg.dense_cap);
    WDistribution w = w_distribution(spectrum, geometry);
    os << "\n[gdse " << shape_name(shape) << "]\n";
    GdseReport gdse = gdse_report(w, geometry, cfg.skin_ratio);
    os << "bulk_mean = " << fmt(gdse.bulk_mean) << '\n';
    for (const auto& stat : gdse.classes) {
      std::string name = boundary_class_name(stat.cls);
      os << name << "_ratio = " << fmt(stat.ratio) << '\n';
      os << name << "_verdict = " << (stat.skin ? "skin" : "no-skin") << '\n';
    }
    if (shape == Shape::triangle) tri_spectrum = std::move(spectrum);
  }

  // per-energy DDS metrics and energy-windowed triangle localization
  std::vector<bool> dds_verdicts, skin_verdicts;
  for (double E : energies) {
    DdsReport dds =
        dds_metric(cfg.model, E, cfg.afunc_grid, cfg.dds_threshold());
    dds_verdicts.push_back(dds.verdict);
    os << "\n[dds " << energy_tag(E) << "]\n";
    os << "delta = " << fmt(dds.delta) << '\n';
    os << "dos_ratio = " << fmt(dds.dos_ratio) << '\n';
    os << "verdict = " << (dds.verdict ? "dds" : "no-dds") << '\n';

    EnergyWindow window{E - cfg.report_window, E + cfg.report_window};
    int states = 0;
    for (int j = 0; j < tri_spectrum.eigenvalues.size(); ++j) {
      double re = tri_spectrum.eigenvalues(j).real();
      if (re >= window.re_min && re <= window.re_max) ++states;
    }
    os << "\n[window " << energy_tag(E) << " triangle]\n";
    os << "re_window = " << fmt(window.re_min) << ' ' << fmt(window.re_max)
       << '\n';
    os << "states = " << states << '\n';
    bool skin = false;
    if (states > 0) {
      WDistribution w = w_distribution(tri_spectrum, tri_geometry, window);
      GdseReport gdse = gdse_report(w, tri_geometry, cfg.skin_ratio);
      const auto* oblique = gdse.find(BoundaryClass::edge_oblique);
      skin = oblique && oblique->skin;
      os << "oblique_ratio = " << fmt(oblique ? oblique->ratio : 0.0) << '\n';
    } else {
      os << "oblique_ratio = n/a\n";
    }
    os << "oblique_verdict = " << (skin ? "skin" : "no-skin") << '\n';
    skin_verdicts.push_back(skin);
  }

  os << "\n[correspondence]\n";
  os << "# E dds triangle_oblique_skin\n";
  for (size_t i = 0; i < energies.size(); ++i)
    os << fmt(energies[i]) << ' ' << (dds_verdicts[i] ? "yes" : "no") << ' '
       << (skin_verdicts[i] ? "yes" : "no") << '\n';

  atomic_write(out_path(cfg, "report.txt"), os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skinlab: non-Hermitian lattice spectra, skin-effect "
               "diagnostics, and spectral-function analysis"};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string config_path;
  std::string output_override;
  app.add_option("-c,--config", config_path, "JSON run configuration")
      ->required();
  app.add_option("-o,--output", output_override,
                 "override the config's output_dir");

  app.add_subcommand("spectrum",
                     "OBC spectrum, optional PBC cloud and spectral area");
  app.add_subcommand("wn", "eigenstate-averaged W(n) and GDSE report");
  app.add_subcommand("afunc", "spectral-function grids and PGM heatmaps");
  app.add_subcommand("dds", "equal-frequency contours and DDS metrics");
  app.add_subcommand("scatter", "edge scattering-channel analysis");
  app.add_subcommand("report",
                     "full pipeline: DDS vs GDSE summary over the four "
                     "reference energies and both geometries");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (!output_override.empty()) cfg.output_dir = output_override;
    std::string command = app.get_subcommands().front()->get_name();
    if (command == "spectrum") return cmd_spectrum(cfg);
    if (command == "wn") return cmd_wn(cfg);
    if (command == "afunc") return cmd_afunc(cfg);
    if (command == "dds") return cmd_dds(cfg);
    if (command == "scatter") return cmd_scatter(cfg);
    if (command == "report") return cmd_report(cfg);
    std::cerr << "skinlab: unknown command " << command << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "skinlab: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "skinlab: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "skinlab: " << e.what() << "\n";
    return 4;
  }
}
