#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "liporos/cloud.hpp"
#include "liporos/core.hpp"
#include "liporos/extraction.hpp"
#include "liporos/kalton.hpp"
#include "liporos/kr.hpp"
#include "liporos/porosity.hpp"
#include "liporos/separation.hpp"
#include "liporos/showcase.hpp"
#include "liporos/space.hpp"

namespace liporos {

using json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write file: " + path);
  out << content;
}

// ---------------------------------------------------------------------------
// Space descriptors: {"kind":"euclidean","dim":n,"p":1|2|"inf"} and
// {"kind":"heisenberg","tol":...}.
// ---------------------------------------------------------------------------

inline json space_to_json(const Space& s) {
  if (s.kind() == SpaceKind::heisenberg)
    return json{{"kind", "heisenberg"}, {"tol", s.solver_tolerance()}};
  json j{{"kind", "euclidean"}, {"dim", s.dim()}};
  if (s.lp().is_inf())
    j["p"] = "inf";
  else
    j["p"] = s.lp().p;
  return j;
}

inline Space space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw input_error("space descriptor: missing kind");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "heisenberg") {
    double tol = j.value("tol", 1e-10);
    return Space::heisenberg(tol);
  }
  if (kind == "euclidean") {
    if (!j.contains("dim")) throw input_error("space descriptor: euclidean needs dim");
    std::size_t dim = j["dim"].get<std::size_t>();
    LpExponent p = LpExponent::l2();
    if (j.contains("p")) {
      if (j["p"].is_string()) {
        if (j["p"].get<std::string>() != "inf")
          throw input_error("space descriptor: p must be a number or \"inf\"");
        p = LpExponent::linf();
      } else {
        p = LpExponent{j["p"].get<double>()};
      }
    }
    return Space::euclidean(dim, p);
  }
  throw input_error("space descriptor: unknown kind '" + kind + "'");
}

inline Space space_from_string(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw input_error("space descriptor: invalid JSON");
  return space_from_json(j);
}

// ---------------------------------------------------------------------------
// Point clouds. CSV: one point per row, coordinates as columns, '#' starts a
// comment, a line '#base' marks the next data row as the base point. JSON:
// {"points": [[...],...], "base_index": i} or a bare array of points.
// ---------------------------------------------------------------------------

inline PointCloud cloud_from_csv(const Space& space, const std::string& text) {
  std::vector<Point> pts;
  std::size_t base = 0;
  bool next_is_base = false, base_seen = false;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == "#base") next_is_base = true;
      continue;
    }
    Point p;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        p.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw input_error("cloud CSV line " + std::to_string(lineno) + ": bad number '" + cell +
                          "'");
      }
    }
    if (next_is_base) {
      if (base_seen) throw input_error("cloud CSV: multiple #base markers");
      base = pts.size();
      base_seen = true;
      next_is_base = false;
    }
    pts.push_back(std::move(p));
  }
  return PointCloud(space, std::move(pts), base);
}

inline PointCloud cloud_from_json(const Space& space, const json& j) {
  const json* arr = nullptr;
  std::size_t base = 0;
  if (j.is_array()) {
    arr = &j;
  } else if (j.is_object() && j.contains("points")) {
    arr = &j["points"];
    base = j.value("base_index", std::size_t{0});
  } else {
    throw input_error("cloud JSON: expected array of points or {points, base_index}");
  }
  std::vector<Point> pts;
  for (const auto& row : *arr) pts.push_back(row.get<Point>());
  return PointCloud(space, std::move(pts), base);
}

/// Dispatch on file extension: .csv or .json.
inline PointCloud load_cloud(const Space& space, const std::string& path) {
  std::string text = read_file(path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
    return cloud_from_json(space, json::parse(text));
  return cloud_from_csv(space, text);
}

inline json cloud_to_json(const PointCloud& cloud) {
  json pts = json::array();
  for (const auto& p : cloud.points()) pts.push_back(p);
  return json{{"points", pts}, {"base_index", cloud.base_index()}};
}

inline std::string cloud_to_csv(const PointCloud& cloud) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (i == cloud.base_index() && i != 0) out << "#base\n";
    const Point& p = cloud.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) out << (k ? "," : "") << p[k];
    out << "\n";
  }
  return out.str();
}

/// Function values: JSON array, or the last column of a CSV row (so a file
/// can carry coordinates and values side by side as a parallel column).
inline std::vector<double> values_from_file(const std::string& path) {
  std::string text = read_file(path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    json j = json::parse(text);
    if (!j.is_array()) throw input_error("values JSON: expected an array");
    return j.get<std::vector<double>>();
  }
  std::vector<double> vals;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t comma = line.find_last_of(',');
    std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      vals.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw input_error("values CSV: bad number '" + cell + "'");
    }
  }
  return vals;
}

/// Raw point list for queries: CSV rows or a JSON array of arrays, without
/// the distinctness and base-point demands of a cloud.
inline std::vector<Point> points_from_file(const Space& space, const std::string& path) {
  std::string text = read_file(path);
  std::vector<Point> pts;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    json j = json::parse(text);
    const json& arr = j.is_object() && j.contains("points") ? j["points"] : j;
    if (!arr.is_array()) throw input_error("points JSON: expected an array of points");
    for (const auto& row : arr) pts.push_back(row.get<Point>());
  } else {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      Point p;
      std::istringstream cells(line);
      std::string cell;
      while (std::getline(cells, cell, ',')) p.push_back(std::stod(cell));
      pts.push_back(std::move(p));
    }
  }
  for (const auto& p : pts) space.check_point(p);
  return pts;
}

// ---------------------------------------------------------------------------
// Molecules: JSON [{"point_index": i, "weight": w}, ...].
// ---------------------------------------------------------------------------

template <PointMetric M>
Molecule molecule_from_json(const M& m, const json& j) {
  if (!j.is_array()) throw input_error("molecule JSON: expected an array of terms");
  std::vector<MoleculeTerm> terms;
  for (const auto& t : j) {
    if (!t.contains("point_index") || !t.contains("weight"))
      throw input_error("molecule JSON: each term needs point_index and weight");
    terms.push_back({t["point_index"].get<std::size_t>(), t["weight"].get<double>()});
  }
  return make_molecule(m, std::move(terms));
}

inline json molecule_to_json(const Molecule& mu) {
  json out = json::array();
  for (const auto& t : mu.support)
    out.push_back(json{{"point_index", t.point}, {"weight", t.weight}});
  return out;
}

// ---------------------------------------------------------------------------
// Ball sequences: {"balls":[{"center":[...],"radius":r},...],
//                  "densities":[...], "density_bound_valid":[...]}.
// ---------------------------------------------------------------------------

inline json ball_to_json(const Ball& b) {
  return json{{"center", b.center}, {"radius", b.radius}};
}

inline Ball ball_from_json(const json& j) {
  if (!j.contains("center") || !j.contains("radius"))
    throw input_error("ball JSON: needs center and radius");
  Ball b{j["center"].get<Point>(), j["radius"].get<double>()};
  if (!(b.radius > 0.0)) throw input_error("ball JSON: radius must be positive");
  return b;
}

inline json ball_sequence_to_json(const BallSequence& seq) {
  json balls = json::array();
  for (const auto& b : seq.balls) balls.push_back(ball_to_json(b));
  json out{{"balls", balls}};
  if (seq.has_densities()) {
    out["densities"] = seq.densities;
    if (!seq.density_bound_valid.empty()) {
      json flags = json::array();
      for (char f : seq.density_bound_valid) flags.push_back(bool(f));
      out["density_bound_valid"] = flags;
    }
  }
  return out;
}

inline BallSequence ball_sequence_from_json(const json& j) {
  BallSequence seq;
  const json& balls = j.is_array() ? j : j.at("balls");
  for (const auto& b : balls) seq.balls.push_back(ball_from_json(b));
  if (j.is_object() && j.contains("densities")) {
    seq.densities = j["densities"].get<std::vector<double>>();
    if (seq.densities.size() != seq.balls.size())
      throw input_error("ball sequence JSON: densities misaligned");
    if (j.contains("density_bound_valid"))
      for (bool f : j["density_bound_valid"]) seq.density_bound_valid.push_back(f ? 1 : 0);
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Report fragments for the analysis results.
// ---------------------------------------------------------------------------

inline json certificate_to_json(const SeparationCertificate& c) {
  json out;
  if (c.vacuous()) {
    out["lambda"] = nullptr;
    out["vacuous"] = true;
    return out;
  }
  out["lambda"] = c.lambda;
  out["vacuous"] = false;
  out["witness"] = json{{"i", c.witness_i},
                        {"j", c.witness_j},
                        {"numerator", c.witness_numerator},
                        {"denominator", c.witness_denominator}};
  if (c.shared_point_sets)
    out["shared_point_sets"] = json::array({c.shared_point_sets->first, c.shared_point_sets->second});
  return out;
}

inline json porosity_report_to_json(const PorosityReport& rep) {
  json scales = json::array();
  for (const auto& sc : rep.scales) {
    json probes = json::array();
    for (const auto& p : sc.probes)
      probes.push_back(json{{"probe", ball_to_json(p.probe)},
                            {"hole_center", p.hole_center},
                            {"hole_radius", p.hole_radius},
                            {"ratio", p.ratio}});
    scales.push_back(json{{"scale", sc.scale},
                          {"resolution", sc.resolution},
                          {"lambda_hat", sc.lambda_hat},
                          {"probes", probes}});
  }
  return json{{"protocol", rep.protocol},
              {"h_over_r", rep.h_over_r},
              {"decreasing_trend", rep.decreasing_trend},
              {"zajicek_small_scales", rep.zajicek_small_scales},
              {"scales", scales},
              {"witnesses", ball_sequence_to_json(rep.witnesses)}};
}

inline json density_profile_to_json(const DensityProfile& prof) {
  return json{{"covering_radii", prof.covering_radii},
              {"epsilons", prof.epsilons},
              {"grid_error", prof.grid_error}};
}

inline json trace_to_json(const ExtractionTrace& tr) {
  json steps = json::array();
  for (const auto& s : tr.steps) {
    json step{{"step", s.step}, {"paper_case", s.paper_case}, {"indices", s.indices}};
    if (s.constant_target > 0.0) step["constant_target"] = s.constant_target;
    if (!s.note.empty()) step["note"] = s.note;
    steps.push_back(std::move(step));
  }
  return json{
      {"regime", tr.regime}, {"constant_target", tr.constant_target}, {"steps", steps}};
}

inline json extraction_to_json(const ExtractionResult& res) {
  return json{{"balls", ball_sequence_to_json(res.balls)},
              {"certificate", certificate_to_json(res.certificate)},
              {"x0", res.x0},
              {"trace", trace_to_json(res.trace)}};
}

inline json kr_to_json(const KrResult& kr) {
  return json{{"value", kr.value},
              {"lp_value", kr.lp_value},
              {"flow_value", kr.flow_value},
              {"potentials", kr.potentials}};
}

inline json kalton_to_json(const KaltonDecomposition& dec) {
  json layers = json::array();
  for (const auto& l : dec.layers)
    layers.push_back(json{{"n", l.n},
                          {"molecule", molecule_to_json(l.layer)},
                          {"kr_norm", l.kr_norm}});
  return json{{"molecule_norm", dec.molecule_norm},
              {"sum_layer_norms", dec.sum_layer_norms},
              {"ratio", dec.ratio},
              {"ratio_bound", 45.0},
              {"layers", layers}};
}

inline json lattice_constants_to_json(const LatticeConstantsReport& rep) {
  return json{{"truncation", rep.truncation},
              {"max_sum_over_distance", rep.max_sum_over_distance},
              {"four_bound_holds", rep.four_bound_holds},
              {"four_witness", json::array({rep.four_witness.i, rep.four_witness.j})},
              {"retraction_lip", rep.retraction_lip},
              {"retraction_bound_holds", rep.retraction_bound_holds},
              {"retraction_witness",
               json::array({rep.retraction_witness.i, rep.retraction_witness.j})},
              {"quotient_lambda", rep.quotient_lambda},
              {"separation_holds", rep.separation_holds},
              {"quotient_witness", json::array({rep.quotient_witness_i, rep.quotient_witness_j})}};
}

inline json square_lattice_to_json(const SquareLatticeReport& rep) {
  json records = json::array();
  for (const auto& r : rep.records)
    records.push_back(json{{"n", r.n},
                           {"witness", ball_to_json(r.witness)},
                           {"hole_ratio", r.hole_ratio},
                           {"bound", r.bound},
                           {"holds", r.holds}});
  return json{{"h_over_r", rep.h_over_r}, {"records", records}};
}

inline json density_transfer_to_json(const DensityTransferReport& rep) {
  json out{{"hypothesis_met", rep.hypothesis_met},
           {"delta", rep.delta}};
  if (!rep.hypothesis_met) {
    out["hypothesis_failure"] = rep.hypothesis_failure;
    return out;
  }
  out["transfer_ok"] = rep.transfer_ok;
  out["measured_region"] = rep.measured_region;
  out["measured_inner"] = rep.measured_inner;
  out["bound"] = rep.bound;
  if (rep.violating_point) out["violating_point"] = *rep.violating_point;
  return out;
}

}  // namespace liporos
