#pragma once
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "carpet/model.hpp"

namespace carpet {

// Config document:
//   { "maps": [ [ {"height":h, "y_offset":d, "cells":[{"width":a, "x_offset":c}, ...]}, ... ], ... ],
//     "env_probs": [p_1, ..., p_m] }
//
// env_probs must sum to 1 within 1e-12; they are renormalized after the check
// so downstream root solves can rely on an exact unit mass.
inline RandomCarpetSystem parse_system(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }

  auto schema_error = [](const std::string& what) {
    throw std::invalid_argument("config schema error: " + what);
  };
  if (!doc.is_object()) schema_error("top level must be an object");
  if (!doc.contains("maps") || !doc["maps"].is_array() || doc["maps"].empty())
    schema_error("'maps' must be a nonempty list");
  if (!doc.contains("env_probs") || !doc["env_probs"].is_array())
    schema_error("'env_probs' must be a list of reals");

  RandomCarpetSystem sys;
  for (const auto& jmap : doc["maps"]) {
    if (!jmap.is_array() || jmap.empty())
      schema_error("each map must be a nonempty list of rows");
    CarpetMap map;
    for (const auto& jrow : jmap) {
      if (!jrow.is_object() || !jrow.contains("height") ||
          !jrow.contains("y_offset") || !jrow.contains("cells"))
        schema_error("each row needs 'height', 'y_offset', 'cells'");
      if (!jrow["height"].is_number() || !jrow["y_offset"].is_number())
        schema_error("'height'/'y_offset' must be numbers");
      if (!jrow["cells"].is_array() || jrow["cells"].empty())
        schema_error("'cells' must be a nonempty list");
      Row row;
      row.height = jrow["height"].get<double>();
      row.y_offset = jrow["y_offset"].get<double>();
      for (const auto& jcell : jrow["cells"]) {
        if (!jcell.is_object() || !jcell.contains("width") ||
            !jcell.contains("x_offset") || !jcell["width"].is_number() ||
            !jcell["x_offset"].is_number())
          schema_error("each cell needs numeric 'width' and 'x_offset'");
        row.cells.push_back({jcell["width"].get<double>(),
                             jcell["x_offset"].get<double>()});
      }
      map.rows.push_back(std::move(row));
    }
    sys.maps.push_back(std::move(map));
  }
  for (const auto& jp : doc["env_probs"]) {
    if (!jp.is_number()) schema_error("'env_probs' entries must be numbers");
    sys.env_probs.push_back(jp.get<double>());
  }

  const ValidationReport rep = validate_geometry(sys);
  if (!rep.ok) {
    std::ostringstream msg;
    msg << "geometry error:";
    for (const auto& v : rep.violations) {
      msg << " " << v.constraint << "(";
      if (v.i >= 0) msg << "map " << v.i;
      if (v.j >= 0) msg << " row " << v.j;
      if (v.k >= 0) msg << " cell " << v.k;
      msg << " = " << v.measured << ")";
    }
    throw std::invalid_argument(msg.str());
  }

  double total = 0.0;
  for (double p : sys.env_probs) total += p;
  for (double& p : sys.env_probs) p /= total;
  return sys;
}

inline std::string serialize_system(const RandomCarpetSystem& sys) {
  nlohmann::ordered_json doc;
  doc["maps"] = nlohmann::ordered_json::array();
  for (const auto& map : sys.maps) {
    nlohmann::ordered_json jmap = nlohmann::ordered_json::array();
    for (const auto& row : map.rows) {
      nlohmann::ordered_json jrow;
      jrow["height"] = row.height;
      jrow["y_offset"] = row.y_offset;
      jrow["cells"] = nlohmann::ordered_json::array();
      for (const auto& cell : row.cells)
        jrow["cells"].push_back({{"width", cell.width}, {"x_offset", cell.x_offset}});
      jmap.push_back(std::move(jrow));
    }
    doc["maps"].push_back(std::move(jmap));
  }
  doc["env_probs"] = sys.env_probs;
  return doc.dump(2) + "\n";
}

inline RandomCarpetSystem load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

}  // namespace carpet
