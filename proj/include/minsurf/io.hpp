#pragma once

// Serialization of records and reports (JSON, CSV) and key-value config files.

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "minsurf/conditions.hpp"
#include "minsurf/directsum.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/frames.hpp"
#include "minsurf/surfaces.hpp"

namespace minsurf {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const Grid& g) {
  return Json{{"nx", g.nx}, {"ny", g.ny}, {"domain", Json::array({g.x0, g.x1, g.y0, g.y1})}};
}

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json to_json(const OrderInvariants& o) {
  return Json{{"r", o.r},         {"dim", o.dim},           {"norm2", o.norm2},     {"Kperp", o.Kperp},
              {"kappa", o.kappa}, {"mu", o.mu},             {"ecc", o.ecc},         {"a_plus", o.a_plus},
              {"a_minus", o.a_minus}, {"H_odd", to_json(o.H_odd)}, {"H_even", to_json(o.H_even)},
              {"phi", to_json(o.phi_coeff)}, {"Kstar", optional_json(o.Kstar)}};
}

inline Json to_json(const InvariantRecord& rec) {
  Json orders = Json::array();
  for (const auto& o : rec.orders) orders.push_back(to_json(o));
  return Json{{"x", rec.x}, {"y", rec.y}, {"F", rec.F}, {"K", rec.K}, {"orders", orders}};
}

/// CSV columns: x, y, F, K, then for r = 1..max_order the block
/// dim, norm2, Kperp, kappa, mu, ecc, a_plus, a_minus, phi_re, phi_im, Kstar.
inline std::vector<std::string> invariant_csv_header(int max_order) {
  std::vector<std::string> h = {"x", "y", "F", "K"};
  for (int r = 1; r <= max_order; ++r)
    for (const char* f : {"dim", "norm2", "Kperp", "kappa", "mu", "ecc", "a_plus", "a_minus", "phi_re", "phi_im", "Kstar"})
      h.push_back("r" + std::to_string(r) + "_" + f);
  return h;
}

inline std::vector<std::string> invariant_csv_row(const InvariantRecord& rec, int max_order) {
  std::vector<std::string> row = {format_double(rec.x), format_double(rec.y), format_double(rec.F), format_double(rec.K)};
  for (int r = 1; r <= max_order; ++r) {
    if (r > static_cast<int>(rec.orders.size())) {
      row.insert(row.end(), 11, "");
      continue;
    }
    const auto& o = rec.orders[static_cast<std::size_t>(r - 1)];
    row.push_back(std::to_string(o.dim));
    for (double v : {o.norm2, o.Kperp, o.kappa, o.mu, o.ecc, o.a_plus, o.a_minus, o.phi_coeff.real(), o.phi_coeff.imag()})
      row.push_back(format_double(v));
    row.push_back(o.Kstar ? format_double(*o.Kstar) : "");
  }
  return row;
}

inline std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
    if (!quote) {
      s += cells[i];
      continue;
    }
    s += '"';
    for (char c : cells[i]) {
      if (c == '"') s += '"';
      s += c;
    }
    s += '"';
  }
  return s + "\n";
}

inline Json to_json(const ConditionReport& rep) {
  Json residuals = Json::array();
  for (const auto& r : rep.residuals) residuals.push_back(r ? Json(*r) : Json(nullptr));
  Json flagged = Json::array();
  for (const auto& f : rep.flagged) flagged.push_back(Json{{"index", f.index}, {"x", f.x}, {"y", f.y}, {"reason", f.reason}});
  Json j{{"condition", rep.condition.name()}};
  if (rep.condition.kind == ConditionKind::Ricci) j["c"] = rep.condition.c;
  j["grid"] = to_json(rep.grid);
  j["h"] = rep.h;
  j["richardson"] = rep.extrapolation_order == 4;
  j["error_order"] = rep.extrapolation_order;
  j["evaluated"] = rep.evaluated();
  j["max_abs"] = rep.max_abs;
  j["mean_abs"] = rep.mean_abs;
  j["curvature_one_points"] = rep.curvature_one_points;
  j["convergence"] = rep.audit ? Json{{"h", (*rep.audit)[0]}, {"h_half", (*rep.audit)[1]}} : Json(nullptr);
  j["flagged"] = flagged;
  j["residuals"] = residuals;
  return j;
}

inline Json to_json(const CVectors& cv) {
  Json vs = Json::array();
  for (const auto& c : cv.C) {
    Json v = Json::array();
    for (Eigen::Index i = 0; i < c.size(); ++i) v.push_back(to_json(c(i)));
    vs.push_back(v);
  }
  return Json{{"m", cv.m()}, {"a", cv.a}, {"theta", cv.theta}, {"C", vs}, {"projection_defect", cv.projection_defect}};
}

inline Json to_json(const OrthogonalityReport& rep) {
  Json j = Json::object();
  for (const auto& [k, v] : rep.classes) j[k] = v;
  return j;
}

inline Json to_json(const PredictedConstants& p) {
  Json rows = Json::array();
  for (int s = 1; s <= static_cast<int>(p.b.size()); ++s) {
    const auto i = static_cast<std::size_t>(s - 1);
    Json row{{"s", s}, {"b", p.b[i]}, {"c", optional_json(p.c[i])}};
    row["d"] = p.d.count(s) ? to_json(p.d.at(s)) : Json(nullptr);
    row["rho"] = p.rho[i];
    rows.push_back(row);
  }
  return rows;
}

/// CSV columns: s, b, c, d_re, d_im, rho.
inline std::string predicted_constants_csv(const PredictedConstants& p) {
  std::string out = csv_line({"s", "b", "c", "d_re", "d_im", "rho"});
  for (int s = 1; s <= static_cast<int>(p.b.size()); ++s) {
    const auto i = static_cast<std::size_t>(s - 1);
    const bool has_d = p.d.count(s) > 0;
    out += csv_line({std::to_string(s), format_double(p.b[i]), p.c[i] ? format_double(*p.c[i]) : "",
                     has_d ? format_double(p.d.at(s).real()) : "", has_d ? format_double(p.d.at(s).imag()) : "",
                     format_double(p.rho[i])});
  }
  return out;
}

inline Json to_json(const DirectSumComparison& c) {
  Json rows = Json::array();
  for (const auto& o : c.orders) {
    rows.push_back(Json{{"s", o.s},
                        {"predicted_b", o.predicted_b},
                        {"measured_norm2", o.measured_norm2},
                        {"rel_norm2", o.rel_norm2},
                        {"predicted_c", optional_json(o.predicted_c)},
                        {"measured_Kperp", o.measured_Kperp},
                        {"rel_Kperp", o.rel_Kperp},
                        {"predicted_d", o.predicted_d ? to_json(*o.predicted_d) : Json(nullptr)},
                        {"predicted_phi", to_json(o.predicted_phi)},
                        {"measured_phi", to_json(o.measured_phi)},
                        {"rel_hopf", o.rel_hopf},
                        {"rho", o.rho}});
  }
  return Json{{"orders", rows},
              {"isometry", c.isometry},
              {"minimality", c.minimality},
              {"exceptional_spread", c.exceptional_spread},
              {"skipped_points", c.skipped_points}};
}

inline Json to_json(const ProxyReport& p) {
  return Json{{"ok", p.ok()},         {"failure", p.failure},     {"sphere", p.sphere},
              {"conformal", p.conformal}, {"minimal", p.minimal}, {"hopf1", p.hopf1},
              {"max_abs_K", p.max_abs_K}, {"flag_dims", p.flag_dims}, {"substantial", p.substantial}};
}

// ---------------------------------------------------------------------------
// Config files: "key = value" lines, '#' starts a comment.

using ConfigMap = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline ConfigMap parse_config(std::istream& in) {
  ConfigMap cfg;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(n) + ": empty key");
    cfg[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

inline ConfigMap load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

inline double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw ConfigError("not a number: '" + text + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(text);
  while (std::getline(ss, cur, sep)) out.push_back(trim(cur));
  return out;
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(item));
  return out;
}

/// "x,y; x,y; ..."
inline std::vector<std::array<double, 2>> parse_pairs(const std::string& text) {
  std::vector<std::array<double, 2>> out;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto v = parse_list(item);
    if (v.size() != 2) throw ConfigError("expected an x,y pair, got '" + item + "'");
    out.push_back({v[0], v[1]});
  }
  return out;
}

/// "NxM"
inline std::pair<int, int> parse_grid_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw ConfigError("grid must look like NxM, got '" + text + "'");
  int nx = 0, ny = 0;
  try {
    std::size_t a = 0, b = 0;
    const std::string l = text.substr(0, x), r = text.substr(x + 1);
    nx = std::stoi(l, &a);
    ny = std::stoi(r, &b);
    if (a != l.size() || b != r.size()) throw ConfigError("");
  } catch (...) {
    throw ConfigError("grid must look like NxM, got '" + text + "'");
  }
  if (nx < 2 || ny < 2) throw ConfigError("grid must be at least 2x2");
  return {nx, ny};
}

/// Surface described by config keys: kind = catalog | exp-type |
/// direct-sum | associated, with name, amplitudes, frequencies, phases, base,
/// a, theta, angle and label as needed.
inline SpecPtr spec_from_config(const ConfigMap& cfg) {
  auto get = [&](const std::string& k) -> std::string {
    const auto it = cfg.find(k);
    if (it == cfg.end()) throw ConfigError("config key '" + k + "' is required");
    return it->second;
  };
  auto opt = [&](const std::string& k, const std::string& dflt) {
    const auto it = cfg.find(k);
    return it == cfg.end() ? dflt : it->second;
  };
  const std::string kind = opt("kind", "catalog");
  if (kind == "catalog") return make_catalog(get("name"));
  if (kind == "exp-type") {
    auto a = parse_list(get("amplitudes"));
    auto l = parse_pairs(get("frequencies"));
    auto d = cfg.count("phases") ? parse_list(get("phases")) : std::vector<double>(a.size(), 0.0);
    return make_spec(make_exp_type(a, l, d), opt("label", "exp-type"));
  }
  if (kind == "direct-sum") {
    return build_direct_sum(parse_list(get("a")), parse_list(get("theta")), make_catalog(opt("base", "equilateral-torus")));
  }
  if (kind == "associated") {
    return associated_family(make_catalog(get("base")), parse_double(get("angle")));
  }
  throw ConfigError("unknown surface kind '" + kind + "'");
}

}  // namespace minsurf
