#include "skinlab/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "skinlab/errors.hpp"

namespace skinlab {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key \"" + path + it.key() + "\"");
  }
}

double get_number(const json& obj, const std::string& path,
                  const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError("config: key \"" + path + key + "\" must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError("config: key \"" + path + key + "\" must be an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean())
    throw ConfigError("config: key \"" + path + key + "\" must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path,
                       const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string())
    throw ConfigError("config: key \"" + path + key + "\" must be a string");
  return v.get<std::string>();
}

void require_range(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("config: key \"" + key + "\" " + what);
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open file: " + path);

  json root;
  try {
    root = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  if (!root.is_object())
    throw ConfigError("config: top level must be a JSON object");

  reject_unknown(root, "",
                 {"model", "geometry", "grids", "thresholds", "output_dir",
                  "dense_cap", "run"});

  RunConfig cfg;

  if (root.contains("model")) {
    const json& m = root.at("model");
    if (!m.is_object()) throw ConfigError("config: \"model\" must be an object");
    reject_unknown(m, "model.", {"t", "m", "gamma", "eta"});
    cfg.model.t = get_number(m, "model.", "t", cfg.model.t);
    cfg.model.m = get_number(m, "model.", "m", cfg.model.m);
    cfg.model.gamma = get_number(m, "model.", "gamma", cfg.model.gamma);
    cfg.model.eta = get_number(m, "model.", "eta", cfg.model.eta);
    require_range(cfg.model.t > 0, "model.t", "must be > 0");
    require_range(cfg.model.gamma >= 0, "model.gamma", "must be >= 0");
    require_range(cfg.model.eta > 0, "model.eta", "must be > 0");
  }

  if (root.contains("geometry")) {
    const json& g = root.at("geometry");
    if (!g.is_object())
      throw ConfigError("config: \"geometry\" must be an object");
    reject_unknown(g, "geometry.", {"shape", "L"});
    std::string shape = get_string(g, "geometry.", "shape", "square");
    if (shape == "square")
      cfg.shape = Shape::square;
    else if (shape == "triangle")
      cfg.shape = Shape::triangle;
    else
      throw ConfigError("config: key \"geometry.shape\" has unsupported value \"" +
                        shape + "\" (expected square or triangle)");
    cfg.L = get_int(g, "geometry.", "L", cfg.L);
    require_range(cfg.L >= 1, "geometry.L", "must be >= 1");
  }

  if (root.contains("grids")) {
    const json& g = root.at("grids");
    if (!g.is_object()) throw ConfigError("config: \"grids\" must be an object");
    reject_unknown(g, "grids.", {"pbc", "afunc", "raster_cell"});
    cfg.pbc_grid = get_int(g, "grids.", "pbc", cfg.pbc_grid);
    cfg.afunc_grid = get_int(g, "grids.", "afunc", cfg.afunc_grid);
    cfg.raster_cell = get_number(g, "grids.", "raster_cell", cfg.raster_cell);
    require_range(cfg.pbc_grid >= 2, "grids.pbc", "must be >= 2");
    require_range(cfg.afunc_grid >= 64, "grids.afunc", "must be >= 64");
    require_range(cfg.raster_cell > 0, "grids.raster_cell", "must be > 0");
  }

  if (root.contains("thresholds")) {
    const json& t = root.at("thresholds");
    if (!t.is_object())
      throw ConfigError("config: \"thresholds\" must be an object");
    reject_unknown(t, "thresholds.",
                   {"skin_ratio", "dds_split", "open_fraction"});
    cfg.skin_ratio = get_number(t, "thresholds.", "skin_ratio", cfg.skin_ratio);
    cfg.dds_split = get_number(t, "thresholds.", "dds_split", cfg.dds_split);
    cfg.open_fraction =
        get_number(t, "thresholds.", "open_fraction", cfg.open_fraction);
    require_range(cfg.skin_ratio > 0, "thresholds.skin_ratio", "must be > 0");
    require_range(cfg.open_fraction > 0 && cfg.open_fraction <= 1,
                  "thresholds.open_fraction", "must be in (0, 1]");
  }

  cfg.output_dir = get_string(root, "", "output_dir", cfg.output_dir);
  cfg.dense_cap = get_int(root, "", "dense_cap", cfg.dense_cap);
  require_range(cfg.dense_cap >= 4, "dense_cap", "must be >= 4");

  if (root.contains("run")) {
    const json& r = root.at("run");
    if (!r.is_object()) throw ConfigError("config: \"run\" must be an object");
    reject_unknown(r, "run.",
                   {"energies", "k_incident", "edge", "want_pbc", "w_window",
                    "report_window"});
    if (r.contains("energies")) {
      const json& es = r.at("energies");
      if (!es.is_array() || es.empty())
        throw ConfigError(
            "config: key \"run.energies\" must be a non-empty array");
      cfg.energies.clear();
      for (const json& e : es) {
        if (!e.is_number())
          throw ConfigError("config: key \"run.energies\" must hold numbers");
        cfg.energies.push_back(e.get<double>());
      }
    }
    if (r.contains("k_incident")) {
      const json& k = r.at("k_incident");
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() ||
          !k[1].is_number())
        throw ConfigError(
            "config: key \"run.k_incident\" must be an array of two numbers");
      cfg.k_incident = {k[0].get<double>(), k[1].get<double>()};
    }
    if (r.contains("edge")) {
      std::string edge = get_string(r, "run.", "edge", "oblique");
      if (edge == "vertical")
        cfg.edge = EdgeOrientation::vertical;
      else if (edge == "horizontal")
        cfg.edge = EdgeOrientation::horizontal;
      else if (edge == "oblique")
        cfg.edge = EdgeOrientation::oblique;
      else
        throw ConfigError("config: key \"run.edge\" has unsupported value \"" +
                          edge + "\"");
    }
    cfg.want_pbc = get_bool(r, "run.", "want_pbc", cfg.want_pbc);
    if (r.contains("w_window")) {
      const json& w = r.at("w_window");
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() ||
          !w[1].is_number())
        throw ConfigError(
            "config: key \"run.w_window\" must be an array of two numbers");
      cfg.w_window = {w[0].get<double>(), w[1].get<double>()};
      require_range(cfg.w_window[0] <= cfg.w_window[1], "run.w_window",
                    "must satisfy re_min <= re_max");
    }
    cfg.report_window =
        get_number(r, "run.", "report_window", cfg.report_window);
    require_range(cfg.report_window > 0, "run.report_window", "must be > 0");
  }

  return cfg;
}

}  // namespace skinlab
