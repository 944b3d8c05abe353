#pragma once

// Command-line front end. run_cli() takes the argument vector and the output
// streams so it can be driven from tests.
//
// Exit codes: 0 pass, 1 condition failed, 2 configuration or constraint
// error, 3 degenerate geometry, 4 1 - K vanishes everywhere on the grid.

#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "minsurf/conditions.hpp"
#include "minsurf/directsum.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/frames.hpp"
#include "minsurf/io.hpp"
#include "minsurf/parallel.hpp"
#include "minsurf/surfaces.hpp"

namespace minsurf {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitDegenerate = 3, kExitCurvatureOne = 4 };

inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct RunConfig {
  std::string command;
  std::string condition;
  std::string surface;
  std::string config_path;
  std::string grid = "16x16";
  std::string domain = "-1,1,-1,1";
  int max_order = 3;
  double h = 1e-3;
  double tolerance = 1e-6;
  std::string format = "json";
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  std::string variant = "iii";
  std::string a, theta;
  std::string base = "equilateral-torus";
  int samples = 20;
  int m = 0;
  ConfigMap file;
};

namespace cli_detail {

inline Grid make_grid(const RunConfig& cfg) {
  const auto [nx, ny] = parse_grid_size(cfg.grid);
  const auto d = parse_list(cfg.domain);
  if (d.size() != 4 || !(d[1] > d[0]) || !(d[3] > d[2]))
    throw ConfigError("domain must be x0,x1,y0,y1 with x0 < x1 and y0 < y1");
  return Grid{nx, ny, d[0], d[1], d[2], d[3]};
}

inline SpecPtr resolve_surface(const RunConfig& cfg, const std::string& fallback = "") {
  if (!cfg.surface.empty()) return make_catalog(cfg.surface);
  if (cfg.file.count("kind") || cfg.file.count("name")) return spec_from_config(cfg.file);
  if (!fallback.empty()) return make_catalog(fallback);
  throw ConfigError("no surface given (use --surface or a config file)");
}

inline void check_config(const RunConfig& cfg) {
  if (cfg.max_order < 1) throw ConfigError("max-order must be >= 1");
  if (cfg.max_order > kMaxJetOrder - 2) throw ConfigError("max-order must be <= " + std::to_string(kMaxJetOrder - 2));
  if (!(cfg.h > 0.0)) throw ConfigError("h must be positive");
  if (!(cfg.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (cfg.format != "json" && cfg.format != "csv") throw ConfigError("format must be json or csv");
}

/// Sphere, conformality and minimality on the grid; returns the name of the
/// failed validator, if any.
inline std::optional<std::string> validate_surface(const ImmersionSpec& spec, const Grid& grid, double tol = 1e-8) {
  const double sphere = validate_sphere(spec, grid);
  if (sphere > tol) return "validate_sphere: residual " + format_double(sphere);
  const auto conf = validate_conformal(spec, grid);
  if (std::max(conf.length_mismatch, conf.angle) > tol)
    return "validate_conformal: residual " + format_double(std::max(conf.length_mismatch, conf.angle));
  const double minimal = validate_minimal(spec, grid);
  if (minimal > tol) return "validate_minimal: residual " + format_double(minimal);
  return std::nullopt;
}

inline Json header(const std::string& command) { return Json{{"schema", kSchemaVersion}, {"command", command}}; }

struct Output {
  std::string text;
  int code = kExitPass;
};

inline Output json_output(const Json& j, int code) { return {j.dump(2) + "\n", code}; }

// ---------------------------------------------------------------------------

inline Output cmd_list(const RunConfig& cfg) {
  if (cfg.format == "csv") {
    std::string s = csv_line({"name", "ambient_dim", "K", "isotropy_order", "substantial_dim", "description"});
    for (const auto& e : catalog())
      s += csv_line({e.name, std::to_string(e.ambient_dim), e.gaussian_curvature ? format_double(*e.gaussian_curvature) : "",
                     std::to_string(e.isotropy_order), std::to_string(e.substantial_dim), e.description});
    return {s, kExitPass};
  }
  Json j = header("list");
  Json arr = Json::array();
  for (const auto& e : catalog())
    arr.push_back(Json{{"name", e.name},
                       {"description", e.description},
                       {"ambient_dim", e.ambient_dim},
                       {"K", optional_json(e.gaussian_curvature)},
                       {"isotropy_order", e.isotropy_order},
                       {"substantial_dim", e.substantial_dim}});
  j["surfaces"] = arr;
  return json_output(j, kExitPass);
}

inline Output cmd_invariants(const RunConfig& cfg, std::ostream& err) {
  const SpecPtr spec = resolve_surface(cfg);
  const Grid grid = make_grid(cfg);
  if (auto failed = validate_surface(*spec, grid)) {
    err << "validation failed: " << *failed << "\n";
    return {"", kExitConfig};
  }
  std::vector<InvariantRecord> recs(grid.size());
  std::vector<char> regular(grid.size(), 1);
  parallel_for(
      grid.size(),
      [&](std::size_t k) {
        const auto [x, y] = grid.point(k);
        const JetVec jv = eval_jet(*spec, x, y, jet_order_for(cfg.max_order));
        try {
          recs[k] = invariants_at_point(jv, cfg.max_order);
        } catch (const DegenerateFlag&) {
          regular[k] = 0;
          recs[k].x = x;
          recs[k].y = y;
          recs[k].K = gaussian_curvature(jv);
        }
      },
      cfg.threads);

  bool any_normal = false;
  for (const auto& r : recs) any_normal = any_normal || !r.orders.empty();
  const int code = any_normal ? kExitPass : kExitDegenerate;
  if (!any_normal) err << "no normal data anywhere on the grid (degenerate flag)\n";

  if (cfg.format == "csv") {
    std::string s = csv_line(invariant_csv_header(cfg.max_order));
    for (const auto& r : recs) s += csv_line(invariant_csv_row(r, cfg.max_order));
    return {s, code};
  }
  Json j = header("invariants");
  j["surface"] = spec->label;
  j["grid"] = to_json(grid);
  j["max_order"] = cfg.max_order;
  Json rows = Json::array();
  double kmin = 0, kmax = 0;
  std::map<int, std::array<double, 4>> per_order;  // ecc min/max, Kperp min/max
  for (std::size_t k = 0; k < recs.size(); ++k) {
    Json row = to_json(recs[k]);
    row["regular"] = static_cast<bool>(regular[k]);
    rows.push_back(row);
    kmin = k ? std::min(kmin, recs[k].K) : recs[k].K;
    kmax = k ? std::max(kmax, recs[k].K) : recs[k].K;
    for (const auto& o : recs[k].orders) {
      auto [it, fresh] = per_order.try_emplace(o.r, std::array<double, 4>{o.ecc, o.ecc, o.Kperp, o.Kperp});
      if (!fresh) {
        auto& v = it->second;
        v = {std::min(v[0], o.ecc), std::max(v[1], o.ecc), std::min(v[2], o.Kperp), std::max(v[3], o.Kperp)};
      }
    }
  }
  Json summary{{"K_min", kmin}, {"K_max", kmax}};
  Json orders = Json::array();
  for (const auto& [r, v] : per_order)
    orders.push_back(Json{{"r", r}, {"ecc_min", v[0]}, {"ecc_max", v[1]}, {"Kperp_min", v[2]}, {"Kperp_max", v[3]}});
  summary["orders"] = orders;
  j["summary"] = summary;
  j["records"] = rows;
  return json_output(j, code);
}

inline Prop32Variant parse_variant(const std::string& v) {
  if (v == "i" || v == "I") return Prop32Variant::I;
  if (v == "ii" || v == "II") return Prop32Variant::II;
  if (v == "iii" || v == "III") return Prop32Variant::III;
  throw ConfigError("variant must be i, ii or iii");
}

inline Output cmd_check(const RunConfig& cfg, std::ostream& err) {
  if (cfg.condition.empty()) throw ConfigError("check needs a condition");
  ConditionId id = parse_condition(cfg.condition);
  id.variant = parse_variant(cfg.variant);
  const SpecPtr spec = resolve_surface(cfg);
  const Grid grid = make_grid(cfg);
  ConditionOptions opt;
  opt.h = cfg.h;
  opt.threads = cfg.threads;
  const ConditionReport rep = check_condition(*spec, id, grid, opt);

  int code = rep.max_abs < cfg.tolerance ? kExitPass : kExitFail;
  if (rep.evaluated() == 0) {
    code = rep.curvature_one_points == grid.size() ? kExitCurvatureOne : kExitDegenerate;
    err << "no grid point could be evaluated\n";
  }
  if (cfg.format == "csv") {
    std::string s = csv_line({"index", "x", "y", "residual", "flag"});
    std::vector<std::string> reason(grid.size());
    for (const auto& f : rep.flagged) reason[f.index] = f.reason;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto [x, y] = grid.point(k);
      s += csv_line({std::to_string(k), format_double(x), format_double(y),
                     rep.residuals[k] ? format_double(*rep.residuals[k]) : "", reason[k]});
    }
    return {s, code};
  }
  Json j = header("check");
  j["surface"] = spec->label;
  j["tolerance"] = cfg.tolerance;
  j["pass"] = code == kExitPass;
  j["report"] = to_json(rep);
  return json_output(j, code);
}

struct WeightsPhases {
  std::vector<double> a, theta;
  bool normalized = false;
};

/// Weights within 1e-3 of unit length are rescaled to unit length.
inline WeightsPhases read_weights(const RunConfig& cfg) {
  WeightsPhases w;
  w.a = parse_list(cfg.a);
  w.theta = parse_list(cfg.theta);
  if (w.a.empty()) throw ConfigError("weights --a are required");
  if (w.a.size() != w.theta.size()) throw ConstraintViolation("--a and --theta must have the same length");
  double n = 0.0;
  for (double v : w.a) n += v * v;
  n = std::sqrt(n);
  if (std::abs(n - 1.0) >= 1e-3) throw ConstraintViolation("weights have norm " + format_double(n) + ", not 1");
  if (n != 1.0) {
    for (double& v : w.a) v /= n;
    w.normalized = true;
  }
  for (double v : w.a)
    if (v == 0.0) throw ConstraintViolation("a zero weight makes the sum degenerate");
  return w;
}

struct PhaseLaw {
  double phi;
  std::vector<std::pair<int, double>> surface;  // (s, max relative deviation)
  double base = 0.0;
};

inline std::vector<PhaseLaw> phase_law(const SpecPtr& g_hat, const SpecPtr& base, const Grid& grid, int top) {
  std::vector<PhaseLaw> out;
  for (double phi : {std::numbers::pi / 6.0, std::numbers::pi / 3.0}) {
    PhaseLaw law{phi, {}, 0.0};
    const SpecPtr gp = associated_family(g_hat, phi);
    const SpecPtr bp = associated_family(base, phi);
    const cplx rot = std::polar(1.0, 2.0 * phi);
    std::map<int, double> worst;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto [x, y] = grid.point(k);
      const InvariantRecord r0 = invariants_at(*g_hat, x, y, top), r1 = invariants_at(*gp, x, y, top);
      for (std::size_t i = 0; i < std::min(r0.orders.size(), r1.orders.size()); ++i) {
        const auto& o = r0.orders[i];
        if (std::abs(o.phi_coeff) <= 1e-8 * o.hermitian_scale) continue;
        const double dev = std::abs(r1.orders[i].phi_coeff - rot * o.phi_coeff) / std::abs(o.phi_coeff);
        worst[static_cast<int>(i) + 1] = std::max(worst[static_cast<int>(i) + 1], dev);
      }
      const cplx b0 = hopf_coefficient(eval_jet(*base, x, y, 3), 2), b1 = hopf_coefficient(eval_jet(*bp, x, y, 3), 2);
      law.base = std::max(law.base, std::abs(b1 - rot * b0) / std::abs(b0));
    }
    law.surface.assign(worst.begin(), worst.end());
    out.push_back(law);
  }
  return out;
}

inline Output cmd_directsum(const RunConfig& cfg, std::ostream& err) {
  const WeightsPhases w = read_weights(cfg);
  const SpecPtr base = make_catalog(cfg.base);
  const Grid grid = make_grid(cfg);
  const SpecPtr g_hat = build_direct_sum(w.a, w.theta, base);
  const auto& ds = std::get<DirectSumSpec>(g_hat->kind);
  const int m = static_cast<int>(ds.m());
  const int top = 3 * m - 1;
  const double tol = cfg.tolerance;

  const CVectors cv = c_vector_recursion(ds.weights, ds.phases);
  const OrthogonalityReport orth = orthogonality_report(cv);
  const PredictedConstants pc = predicted_constants(cv);
  const DirectSumComparison cmp = compare_predicted_measured(g_hat, grid, cfg.threads);
  const ProxyReport proxy = pseudoholomorphic_proxy(*base, grid);
  const double sphere = validate_sphere(*g_hat, grid);
  const auto conf = validate_conformal(*g_hat, grid);
  const auto law = phase_law(g_hat, base, grid, top);
  ConditionOptions opt;
  opt.h = cfg.h;
  opt.threads = cfg.threads;
  const ConditionReport ricci = check_condition(*g_hat, parse_condition("ricci6"), grid, opt);

  const bool trivial = m == 1 && ds.phases[0] == 0.0;
  double identity = 0.0;
  if (trivial) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto [x, y] = grid.point(k);
      const InvariantRecord rb = invariants_at(*base, x, y, 2), rh = invariants_at(*g_hat, x, y, 2);
      identity = std::max({identity, std::abs(rb.F - rh.F), std::abs(rb.K - rh.K)});
      for (std::size_t i = 0; i < std::min(rb.orders.size(), rh.orders.size()); ++i) {
        const auto &p = rb.orders[i], &q = rh.orders[i];
        identity = std::max({identity, std::abs(p.norm2 - q.norm2), std::abs(p.Kperp - q.Kperp), std::abs(p.ecc - q.ecc),
                             std::abs(p.a_plus - q.a_plus), std::abs(p.a_minus - q.a_minus),
                             std::abs(p.phi_coeff - q.phi_coeff)});
      }
      if (rb.orders.size() != rh.orders.size()) identity = std::numeric_limits<double>::infinity();
    }
  }

  std::vector<std::string> failures;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  require(proxy.ok(), "pseudoholomorphic proxy");
  require(sphere < 1e-8, "sphere");
  require(std::max(conf.length_mismatch, conf.angle) < 1e-8, "conformality");
  require(cmp.isometry < 1e-8, "isometry");
  require(cmp.minimality < 1e-8, "minimality");
  require(orth.worst() < 1e-12, "orthogonality");
  for (const auto& o : cmp.orders) {
    require(o.rel_norm2 < tol, "norm s=" + std::to_string(o.s));
    require(o.rel_Kperp < tol, "normal curvature s=" + std::to_string(o.s));
    require(o.rel_hopf < tol, "hopf s=" + std::to_string(o.s));
  }
  for (std::size_t r = 0; r < cmp.exceptional_spread.size(); ++r)
    require(cmp.exceptional_spread[r] < tol, "eccentricity r=" + std::to_string(r + 1));
  for (const auto& l : law) {
    require(l.base < tol, "phase law on the base, phi=" + format_double(l.phi));
    for (const auto& [s, v] : l.surface)
      require(v < tol, "phase law s=" + std::to_string(s) + ", phi=" + format_double(l.phi));
  }
  require(ricci.evaluated() == grid.size() && ricci.max_abs < tol, "ricci6");
  if (trivial) require(identity < 1e-10, "identity with the base");
  const int code = failures.empty() ? kExitPass : kExitFail;
  for (const auto& f : failures) err << "failed: " << f << "\n";

  if (cfg.format == "csv") {
    std::string s = csv_line({"s", "predicted_b", "measured_norm2", "rel_norm2", "predicted_c", "measured_Kperp",
                              "rel_Kperp", "predicted_phi_re", "predicted_phi_im", "measured_phi_re", "measured_phi_im",
                              "rel_hopf", "rho"});
    for (const auto& o : cmp.orders)
      s += csv_line({std::to_string(o.s), format_double(o.predicted_b), format_double(o.measured_norm2),
                     format_double(o.rel_norm2), o.predicted_c ? format_double(*o.predicted_c) : "",
                     format_double(o.measured_Kperp), format_double(o.rel_Kperp), format_double(o.predicted_phi.real()),
                     format_double(o.predicted_phi.imag()), format_double(o.measured_phi.real()),
                     format_double(o.measured_phi.imag()), format_double(o.rel_hopf), format_double(o.rho)});
    return {s, code};
  }
  Json j = header("directsum");
  j["surface"] = g_hat->label;
  j["base"] = base->label;
  j["a"] = ds.weights;
  j["theta"] = ds.phases;
  j["weights_normalized"] = w.normalized;
  j["trivial"] = trivial;
  j["grid"] = to_json(grid);
  j["tolerance"] = tol;
  j["pass"] = code == kExitPass;
  j["failures"] = failures;
  j["validation"] = Json{{"sphere", sphere},
                         {"conformal", std::max(conf.length_mismatch, conf.angle)},
                         {"minimal", cmp.minimality},
                         {"isometry", cmp.isometry}};
  j["base_proxy"] = to_json(proxy);
  j["cvectors"] = to_json(cv);
  j["orthogonality"] = to_json(orth);
  j["predicted"] = to_json(pc);
  j["comparison"] = to_json(cmp);
  Json laws = Json::array();
  for (const auto& l : law) {
    Json per = Json::array();
    for (const auto& [s, v] : l.surface) per.push_back(Json{{"s", s}, {"deviation", v}});
    laws.push_back(Json{{"phi", l.phi}, {"base_deviation", l.base}, {"orders", per}});
  }
  j["phase_law"] = laws;
  if (trivial) j["identity_with_base"] = identity;
  j["ricci6"] = Json{{"max_abs", ricci.max_abs}, {"evaluated", ricci.evaluated()}, {"h", ricci.h}};
  return json_output(j, code);
}

inline Output cmd_cvectors(const RunConfig& cfg, std::ostream& err) {
  if (!cfg.a.empty()) {
    const WeightsPhases w = read_weights(cfg);
    validate_direct_sum(DirectSumSpec{w.a, w.theta, nullptr, 3});
    const CVectors cv = c_vector_recursion(w.a, w.theta);
    const PredictedConstants pc = predicted_constants(cv);
    const OrthogonalityReport orth = orthogonality_report(cv);
    const int code = orth.worst() < 1e-12 ? kExitPass : kExitFail;
    if (cfg.format == "csv") return {predicted_constants_csv(pc), code};
    Json j = header("cvectors");
    j["cvectors"] = to_json(cv);
    j["orthogonality"] = to_json(orth);
    j["predicted"] = to_json(pc);
    return json_output(j, code);
  }
  if (cfg.samples < 1) throw ConfigError("samples must be >= 1");
  std::mt19937_64 rng(cfg.seed);
  Json audits = Json::array();
  std::string csv = csv_line({"sample", "m", "worst_orthogonality", "b1", "c1"});
  double worst = 0.0;
  bool exact = true;
  for (int i = 0; i < cfg.samples; ++i) {
    const int m = cfg.m > 0 ? cfg.m : 2 + i % 2;
    const auto [a, th] = random_admissible(m, rng);
    const CVectors cv = c_vector_recursion(a, th);
    const OrthogonalityReport orth = orthogonality_report(cv);
    const PredictedConstants pc = predicted_constants(cv);
    worst = std::max(worst, orth.worst());
    // Equal up to the rounding of |a| = 1.
    exact = exact && std::abs(pc.b[0] - 2.0) <= 1e-14 && pc.c[0] && std::abs(*pc.c[0] - 1.0) <= 1e-14;
    audits.push_back(Json{{"m", m}, {"a", a}, {"theta", th}, {"worst", orth.worst()}, {"b1", pc.b[0]},
                          {"c1", optional_json(pc.c[0])}});
    csv += csv_line({std::to_string(i), std::to_string(m), format_double(orth.worst()), format_double(pc.b[0]),
                     pc.c[0] ? format_double(*pc.c[0]) : ""});
  }
  const int code = worst < 1e-12 && exact ? kExitPass : kExitFail;
  if (code != kExitPass) err << "orthogonality audit failed: worst " << worst << "\n";
  if (cfg.format == "csv") return {csv, code};
  Json j = header("cvectors");
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  j["worst"] = worst;
  j["b1_c1_exact"] = exact;
  j["audits"] = audits;
  return json_output(j, code);
}

inline Output cmd_polar(const RunConfig& cfg, std::ostream& err) {
  const SpecPtr spec = resolve_surface(cfg, "equilateral-torus");
  const Grid grid = make_grid(cfg);
  const PolarReport rep = polar_surface(*spec, grid);
  const ProxyReport proxy = pseudoholomorphic_proxy(*spec, grid);
  if (!proxy.ok()) {
    err << "surface is not a pseudoholomorphic curve in S^5: " << proxy.failure << "\n";
    return {"", kExitConfig};
  }
  const int code = rep.rms < cfg.tolerance ? kExitPass : kExitFail;
  if (cfg.format == "csv") {
    std::vector<std::string> head = {"x", "y"};
    const auto dim = rep.surface.rows();
    for (Eigen::Index c = 0; c < dim; ++c) head.push_back("g" + std::to_string(c + 1));
    for (Eigen::Index c = 0; c < dim; ++c) head.push_back("polar" + std::to_string(c + 1));
    std::string s = csv_line(head);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto [x, y] = grid.point(k);
      std::vector<std::string> row = {format_double(x), format_double(y)};
      const auto kk = static_cast<Eigen::Index>(k);
      for (Eigen::Index c = 0; c < dim; ++c) row.push_back(format_double(rep.surface(c, kk)));
      for (Eigen::Index c = 0; c < dim; ++c) row.push_back(format_double(rep.polar(c, kk)));
      s += csv_line(row);
    }
    return {s, code};
  }
  Json j = header("polar");
  j["surface"] = spec->label;
  j["grid"] = to_json(grid);
  j["tolerance"] = cfg.tolerance;
  j["procrustes_rms"] = rep.rms;
  j["min_neighbor_dot"] = rep.min_neighbor_dot;
  j["pass"] = code == kExitPass;
  return json_output(j, code);
}

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const CurvatureOne*>(&e)) return kExitCurvatureOne;
  if (dynamic_cast<const DegenerateFlag*>(&e) || dynamic_cast<const ZeroVector*>(&e) ||
      dynamic_cast<const SignDiscontinuity*>(&e) || dynamic_cast<const FrameDiscontinuity*>(&e) ||
      dynamic_cast<const DivisionByDegenerateNormalCurvature*>(&e) || dynamic_cast<const EvaluationFailure*>(&e))
    return kExitDegenerate;
  if (dynamic_cast<const Error*>(&e)) return kExitConfig;
  return kExitFail;
}

// Config file keys that map onto RunConfig fields.
inline void apply_file(RunConfig& cfg, const CLI::App& app) {
  auto unset = [&](const std::string& flag) { return app.get_option(flag)->count() == 0; };
  auto take = [&](const std::string& key, const std::string& flag, auto&& assign) {
    const auto it = cfg.file.find(key);
    if (it != cfg.file.end() && unset(flag)) assign(it->second);
  };
  take("grid", "--grid", [&](const std::string& v) { cfg.grid = v; });
  take("domain", "--domain", [&](const std::string& v) { cfg.domain = v; });
  take("max-order", "--max-order", [&](const std::string& v) { cfg.max_order = static_cast<int>(parse_double(v)); });
  take("h", "--h", [&](const std::string& v) { cfg.h = parse_double(v); });
  take("tolerance", "--tol", [&](const std::string& v) { cfg.tolerance = parse_double(v); });
  take("format", "--format", [&](const std::string& v) { cfg.format = v; });
  take("out", "--out", [&](const std::string& v) { cfg.out = v; });
  take("seed", "--seed", [&](const std::string& v) { cfg.seed = std::stoull(v); });
  take("threads", "--threads", [&](const std::string& v) { cfg.threads = static_cast<unsigned>(std::stoul(v)); });
  take("variant", "--variant", [&](const std::string& v) { cfg.variant = v; });
  take("a", "--a", [&](const std::string& v) { cfg.a = v; });
  take("theta", "--theta", [&](const std::string& v) { cfg.theta = v; });
  take("base", "--base", [&](const std::string& v) { cfg.base = v; });
  take("samples", "--samples", [&](const std::string& v) { cfg.samples = std::stoi(v); });
}

inline const char* kCsvHelp =
    "CSV columns:\n"
    "  invariants: x,y,F,K then per order r: rR_dim,rR_norm2,rR_Kperp,rR_kappa,rR_mu,rR_ecc,\n"
    "              rR_a_plus,rR_a_minus,rR_phi_re,rR_phi_im,rR_Kstar\n"
    "  check:      index,x,y,residual,flag\n"
    "  directsum:  s,predicted_b,measured_norm2,rel_norm2,predicted_c,measured_Kperp,rel_Kperp,\n"
    "              predicted_phi_re,predicted_phi_im,measured_phi_re,measured_phi_im,rel_hopf,rho\n"
    "  cvectors:   s,b,c,d_re,d_im,rho (or sample,m,worst_orthogonality,b1,c1 for audits)\n"
    "  polar:      x,y,g1..gN,polar1..polarN\n"
    "Exit codes: 0 pass, 1 condition failed, 2 configuration/constraint, 3 degenerate geometry,\n"
    "            4 curvature one everywhere.\n"
    "Environment: MINSURF_THREADS sets the worker count when --threads is absent.\n";

}  // namespace cli_detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  RunConfig cfg;
  CLI::App app{"Invariants and differential conditions of minimal surfaces in spheres", "minsurf"};
  app.footer(kCsvHelp);
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  app.add_option("--surface", cfg.surface, "catalog surface name");
  app.add_option("--config", cfg.config_path, "key = value configuration file");
  app.add_option("--grid", cfg.grid, "grid size NxM")->capture_default_str();
  app.add_option("--domain", cfg.domain, "x0,x1,y0,y1")->capture_default_str();
  app.add_option("--max-order", cfg.max_order, "highest normal order")->capture_default_str();
  app.add_option("--h", cfg.h, "finite-difference step")->capture_default_str();
  app.add_option("--tol", cfg.tolerance, "pass tolerance")->capture_default_str();
  app.add_option("--format", cfg.format, "json or csv")->capture_default_str();
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_option("--seed", cfg.seed, "seed for randomized audits")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads (default MINSURF_THREADS or all cores)");
  app.add_option("--variant", cfg.variant, "variant of the Laplacian identity: i, ii or iii")->capture_default_str();
  app.add_option("--a", cfg.a, "direct-sum weights a1,...,am");
  app.add_option("--theta", cfg.theta, "direct-sum phases theta1,...,thetam");
  app.add_option("--base", cfg.base, "base curve of the direct sum")->capture_default_str();
  app.add_option("--samples", cfg.samples, "random samples for the C-vector audit")->capture_default_str();
  app.add_option("--m", cfg.m, "fixed m for the C-vector audit (default alternates 2, 3)");
  app.fallthrough();

  app.add_subcommand("list", "list catalog surfaces");
  app.add_subcommand("invariants", "pointwise invariants on a grid");
  auto* check = app.add_subcommand("check", "condition residuals on a grid");
  check->add_option("condition", cfg.condition, "ricci6 | ricci4 | flat-metric | holomorphic:r | exceptional:r | prop32:s");
  app.add_subcommand("directsum", "build and certify a direct-sum surface");
  app.add_subcommand("cvectors", "C-vector recursion, predicted constants and audits");
  app.add_subcommand("polar", "polar surface and congruence report");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  Output result;
  try {
    if (!cfg.config_path.empty()) {
      cfg.file = load_config(cfg.config_path);
      apply_file(cfg, app);
      if (cfg.command == "check" && cfg.condition.empty() && cfg.file.count("condition"))
        cfg.condition = cfg.file.at("condition");
    }
    check_config(cfg);
    if (cfg.command == "list") result = cmd_list(cfg);
    else if (cfg.command == "invariants") result = cmd_invariants(cfg, err);
    else if (cfg.command == "check") result = cmd_check(cfg, err);
    else if (cfg.command == "directsum") result = cmd_directsum(cfg, err);
    else if (cfg.command == "cvectors") result = cmd_cvectors(cfg, err);
    else result = cmd_polar(cfg, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  if (cfg.out.empty()) {
    out << result.text;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << cfg.out << "'\n";
      return kExitConfig;
    }
    f << result.text;
  }
  return result.code;
}

}  // namespace minsurf
