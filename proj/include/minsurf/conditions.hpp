#pragma once

// Differential conditions of minimal surfaces evaluated as residuals.
// Laplacians are finite differences of pointwise-exact jet quantities.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "minsurf/errors.hpp"
#include "minsurf/frames.hpp"
#include "minsurf/parallel.hpp"
#include "minsurf/surfaces.hpp"

namespace minsurf {

using ScalarField = std::function<double(double, double)>;

struct ConditionOptions {
  double h = 1e-3;
  bool richardson = true;
  double curvature_floor = 1e-8;
  unsigned threads = 0;
};

namespace detail {

template <class Fn>
auto guarded(Fn&& fn, double x, double y) -> decltype(fn(x, y)) {
  try {
    return fn(x, y);
  } catch (const EvaluationFailure&) {
    throw;
  } catch (const DegenerateFlag&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationFailure("stencil point (" + std::to_string(x) + ", " + std::to_string(y) + "): " + e.what());
  }
}

inline double laplacian9(const ScalarField& u, double x, double y, double h) {
  auto at = [&](double dx, double dy) { return guarded(u, x + dx, y + dy); };
  const double c = at(0, 0);
  const double edges = at(h, 0) + at(-h, 0) + at(0, h) + at(0, -h);
  const double corners = at(h, h) + at(h, -h) + at(-h, h) + at(-h, -h);
  return (4.0 * edges + corners - 20.0 * c) / (6.0 * h * h);
}

inline double metric_factor(const ImmersionSpec& spec, double x, double y) {
  const JetVec jv = eval_jet(spec, x, y, 1);
  double F = 0.0;
  for (const auto& c : jv.components()) F += 0.5 * (std::pow(c.partial(1, 0), 2) + std::pow(c.partial(0, 1), 2));
  return F;
}

}  // namespace detail

/// Laplacian of the conformal metric F|dz|^2 at (x, y): (u_xx + u_yy)/F with
/// the isotropic 9-point stencil and one Richardson step (h, h/2).
inline double laplacian_fd(const ScalarField& u, double x, double y, double h, double F, bool richardson = true) {
  if (!(h > 0.0)) throw DomainError("laplacian_fd needs h > 0");
  const double coarse = detail::laplacian9(u, x, y, h);
  if (!richardson) return coarse / F;
  const double fine = detail::laplacian9(u, x, y, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0 / F;
}

inline double gaussian_curvature_at(const ImmersionSpec& spec, double x, double y) {
  return gaussian_curvature(eval_jet(spec, x, y, 3));
}

namespace detail {

inline double log_one_minus_k(const ImmersionSpec& spec, double x, double y, double floor) {
  const double k = gaussian_curvature_at(spec, x, y);
  if (1.0 - k <= floor) throw CurvatureOne("1 - K vanishes at (" + std::to_string(x) + ", " + std::to_string(y) + ")");
  return std::log(1.0 - k);
}

struct RicciParts {
  double K;
  double lap;  // Laplacian of log(1 - K)
};

inline RicciParts ricci_parts(const ImmersionSpec& spec, double x, double y, const ConditionOptions& opt) {
  const double k = gaussian_curvature_at(spec, x, y);
  if (1.0 - k <= opt.curvature_floor)
    throw CurvatureOne("1 - K vanishes at (" + std::to_string(x) + ", " + std::to_string(y) + ")");
  const ScalarField u = [&](double px, double py) { return log_one_minus_k(spec, px, py, opt.curvature_floor); };
  return {k, laplacian_fd(u, x, y, opt.h, metric_factor(spec, x, y), opt.richardson)};
}

}  // namespace detail

/// Delta log(1 - K) - c K.
inline double ricci_residual(const ImmersionSpec& spec, double x, double y, double c, const ConditionOptions& opt = {}) {
  const auto p = detail::ricci_parts(spec, x, y, opt);
  return p.lap - c * p.K;
}

/// Gaussian curvature of (1 - K)^{1/3} ds^2.
inline double flat_metric_residual(const ImmersionSpec& spec, double x, double y, const ConditionOptions& opt = {}) {
  const auto p = detail::ricci_parts(spec, x, y, opt);
  return std::pow(1.0 - p.K, -1.0 / 3.0) * (p.K - p.lap / 6.0);
}

/// |dbar phi_r| relative to |alpha_{r+1}(d,..,d)|^2 at the point, by central
/// differences with one Richardson step. The Hermitian size is used instead
/// of |phi_r| since phi_r vanishes identically on isotropic orders.
inline double holomorphicity_residual(const ImmersionSpec& spec, int r, double x, double y, double h = 1e-3,
                                      bool richardson = true) {
  auto phi = [&](double px, double py) { return hopf_coefficient(eval_jet(spec, px, py, r + 1), r); };
  auto dbar = [&](double s) {
    const cplx dx = (phi(x + s, y) - phi(x - s, y)) / (2.0 * s);
    const cplx dy = (phi(x, y + s) - phi(x, y - s)) / (2.0 * s);
    return 0.5 * (dx + cplx{0.0, 1.0} * dy);
  };
  const cplx coarse = dbar(h);
  const cplx value = richardson ? (4.0 * dbar(0.5 * h) - coarse) / 3.0 : coarse;
  const JetVec jv = eval_jet(spec, x, y, r + 1);
  const OsculatingFlag flag = osculating_flag(jv, r);
  if (static_cast<int>(flag.levels.size()) < r) throw DegenerateFlag(r, "normal level is not present");
  const double scale = flag.levels[static_cast<std::size_t>(r - 1)].top.squaredNorm();
  return std::abs(value) / (scale + std::numeric_limits<double>::min());
}

struct EccentricityReport {
  int r = 0;
  double max = 0.0, min = 0.0, spread = 0.0;
  std::size_t skipped = 0;
  std::vector<std::optional<double>> values;
};

inline EccentricityReport eccentricity_constancy(const ImmersionSpec& spec, int r, const Grid& grid, unsigned threads = 0) {
  EccentricityReport rep;
  rep.r = r;
  rep.values.assign(grid.size(), std::nullopt);
  parallel_for(
      grid.size(),
      [&](std::size_t k) {
        const auto [x, y] = grid.point(k);
        try {
          const JetVec jv = eval_jet(spec, x, y, jet_order_for(r));
          const InvariantRecord rec = invariants_at_point(jv, r);
          if (static_cast<int>(rec.orders.size()) >= r) rep.values[k] = rec.orders[static_cast<std::size_t>(r - 1)].ecc;
        } catch (const DegenerateFlag&) {
        }
      },
      threads);
  bool first = true;
  for (const auto& v : rep.values) {
    if (!v) {
      ++rep.skipped;
      continue;
    }
    rep.max = first ? *v : std::max(rep.max, *v);
    rep.min = first ? *v : std::min(rep.min, *v);
    first = false;
  }
  rep.spread = rep.max - rep.min;
  return rep;
}

enum class Prop32Variant { I, II, III };

/// Left minus right of the Laplacian identities for |alpha_{s+1}|^2. Variant
/// II returns the larger residual of its two identities.
inline double laplacian_identity_residual(const ImmersionSpec& spec, int s, double x, double y, Prop32Variant variant,
                                          const ConditionOptions& opt = {}, double isotropy_tol = 1e-8) {
  auto record = [&](double px, double py) { return invariants_at(spec, px, py, s); };
  const InvariantRecord rec = record(x, y);
  if (static_cast<int>(rec.orders.size()) < s)
    throw VariantInapplicable("normal level " + std::to_string(s) + " is not present");
  const OrderInvariants& o = rec.orders[static_cast<std::size_t>(s - 1)];
  const bool isotropic = std::abs(o.phi_coeff) <= isotropy_tol * o.hermitian_scale;
  if (variant == Prop32Variant::III && !isotropic)
    throw VariantInapplicable("phi_" + std::to_string(s) + " does not vanish");
  if (variant == Prop32Variant::II && isotropic) throw VariantInapplicable("phi_" + std::to_string(s) + " vanishes");
  double kstar = 0.0;
  try {
    kstar = intrinsic_bundle_curvature(rec, s);
  } catch (const DegenerateFlag& e) {
    throw VariantInapplicable(e.what());
  } catch (const DivisionByDegenerateNormalCurvature& e) {
    throw VariantInapplicable(e.what());
  }
  auto field = [&](double sign) -> ScalarField {
    return [&, sign](double px, double py) {
      const InvariantRecord r2 = record(px, py);
      if (static_cast<int>(r2.orders.size()) < s) throw DegenerateFlag(s, "normal level vanishes on the stencil");
      const OrderInvariants& q = r2.orders[static_cast<std::size_t>(s - 1)];
      return std::log(q.norm2 + sign * std::ldexp(q.Kperp, s));
    };
  };
  if (variant != Prop32Variant::II) {
    const double lap = laplacian_fd(field(0.0), x, y, opt.h, rec.F, opt.richardson);
    return lap - 2.0 * ((s + 1) * rec.K - kstar);
  }
  const double floor = 1e-10 * o.norm2;
  if (o.norm2 - std::ldexp(std::abs(o.Kperp), s) <= floor)
    throw VariantInapplicable("|alpha|^2 - 2^s K^perp vanishes");
  const double plus = laplacian_fd(field(1.0), x, y, opt.h, rec.F, opt.richardson) - 2.0 * ((s + 1) * rec.K - kstar);
  const double minus = laplacian_fd(field(-1.0), x, y, opt.h, rec.F, opt.richardson) - 2.0 * ((s + 1) * rec.K + kstar);
  return std::abs(plus) >= std::abs(minus) ? plus : minus;
}

// ---------------------------------------------------------------------------
// Grid reports.

enum class ConditionKind { Ricci, FlatMetric, Holomorphic, Exceptional, Prop32 };

struct ConditionId {
  ConditionKind kind = ConditionKind::Ricci;
  double c = 6.0;  // Ricci constant
  int order = 1;   // r or s
  Prop32Variant variant = Prop32Variant::III;

  std::string name() const {
    switch (kind) {
      case ConditionKind::Ricci: return c == 6.0 ? "ricci6" : (c == 4.0 ? "ricci4" : "ricci");
      case ConditionKind::FlatMetric: return "flat-metric";
      case ConditionKind::Holomorphic: return "holomorphic:" + std::to_string(order);
      case ConditionKind::Exceptional: return "exceptional:" + std::to_string(order);
      case ConditionKind::Prop32: return "prop32:" + std::to_string(order);
    }
    return "unknown";
  }
};

/// Parses ricci6, ricci4, flat-metric, holomorphic:r, exceptional:r, prop32:s.
inline ConditionId parse_condition(const std::string& text) {
  ConditionId id;
  auto order_of_suffix = [&](const std::string& prefix) {
    const std::string tail = text.substr(prefix.size());
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tail, &used);
    } catch (...) {
      used = 0;
    }
    if (used != tail.size() || tail.empty() || v < 1) throw ConfigError("bad order in condition '" + text + "'");
    return v;
  };
  if (text == "ricci6") {
    id.kind = ConditionKind::Ricci;
    id.c = 6.0;
  } else if (text == "ricci4") {
    id.kind = ConditionKind::Ricci;
    id.c = 4.0;
  } else if (text == "flat-metric") {
    id.kind = ConditionKind::FlatMetric;
  } else if (text.rfind("holomorphic:", 0) == 0) {
    id.kind = ConditionKind::Holomorphic;
    id.order = order_of_suffix("holomorphic:");
  } else if (text.rfind("exceptional:", 0) == 0) {
    id.kind = ConditionKind::Exceptional;
    id.order = order_of_suffix("exceptional:");
  } else if (text.rfind("prop32:", 0) == 0) {
    id.kind = ConditionKind::Prop32;
    id.order = order_of_suffix("prop32:");
  } else {
    throw ConfigError("unknown condition '" + text + "'");
  }
  return id;
}

struct FlaggedPoint {
  std::size_t index;
  double x, y;
  std::string reason;
};

struct ConditionReport {
  ConditionId condition;
  Grid grid;
  double h = 0.0;
  int extrapolation_order = 0;  // leading error order after extrapolation
  std::vector<std::optional<double>> residuals;
  std::vector<FlaggedPoint> flagged;
  std::size_t curvature_one_points = 0;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  // Convergence audit at the first evaluable point: residual at h and h/2.
  std::optional<std::array<double, 2>> audit;

  std::size_t evaluated() const {
    std::size_t n = 0;
    for (const auto& r : residuals) n += r.has_value();
    return n;
  }
};

namespace detail {

inline double condition_at(const ImmersionSpec& spec, const ConditionId& id, double x, double y, const ConditionOptions& opt) {
  switch (id.kind) {
    case ConditionKind::Ricci: return ricci_residual(spec, x, y, id.c, opt);
    case ConditionKind::FlatMetric: return flat_metric_residual(spec, x, y, opt);
    case ConditionKind::Holomorphic: return holomorphicity_residual(spec, id.order, x, y, opt.h, opt.richardson);
    case ConditionKind::Prop32: return laplacian_identity_residual(spec, id.order, x, y, id.variant, opt);
    case ConditionKind::Exceptional: break;
  }
  throw UnsupportedKind("pointwise evaluation of " + id.name());
}

}  // namespace detail

inline ConditionReport check_condition(const ImmersionSpec& spec, const ConditionId& id, const Grid& grid,
                                       const ConditionOptions& opt = {}) {
  ConditionReport rep;
  rep.condition = id;
  rep.grid = grid;
  rep.h = opt.h;
  rep.extrapolation_order = opt.richardson ? 4 : 2;
  rep.residuals.assign(grid.size(), std::nullopt);

  if (id.kind == ConditionKind::Exceptional) {
    rep.extrapolation_order = 0;
    std::vector<double> worst(grid.size(), 0.0);
    std::vector<bool> bad(grid.size(), false);
    for (int r = 1; r <= id.order; ++r) {
      const EccentricityReport e = eccentricity_constancy(spec, r, grid, opt.threads);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!e.values[k]) {
          bad[k] = true;
          continue;
        }
        worst[k] = std::max(worst[k], *e.values[k] - e.min);
      }
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto [x, y] = grid.point(k);
      if (bad[k])
        rep.flagged.push_back({k, x, y, "degenerate flag"});
      else
        rep.residuals[k] = worst[k];
    }
  } else {
    std::vector<std::string> reasons(grid.size());
    std::vector<char> curvature_one(grid.size(), 0);
    parallel_for(
        grid.size(),
        [&](std::size_t k) {
          const auto [x, y] = grid.point(k);
          try {
            rep.residuals[k] = detail::condition_at(spec, id, x, y, opt);
          } catch (const CurvatureOne& e) {
            reasons[k] = e.what();
            curvature_one[k] = 1;
          } catch (const DegenerateFlag& e) {
            reasons[k] = e.what();
          } catch (const VariantInapplicable&) {
            throw;
          } catch (const EvaluationFailure& e) {
            reasons[k] = e.what();
          }
        },
        opt.threads);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (rep.residuals[k]) continue;
      const auto [x, y] = grid.point(k);
      rep.flagged.push_back({k, x, y, reasons[k]});
      rep.curvature_one_points += curvature_one[k];
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (!rep.residuals[k]) continue;
      const auto [x, y] = grid.point(k);
      ConditionOptions half = opt;
      half.h = 0.5 * opt.h;
      try {
        rep.audit = std::array<double, 2>{*rep.residuals[k], detail::condition_at(spec, id, x, y, half)};
      } catch (const Error&) {
      }
      break;
    }
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rep.residuals) {
    if (!r) continue;
    rep.max_abs = std::max(rep.max_abs, std::abs(*r));
    sum += std::abs(*r);
    ++n;
  }
  rep.mean_abs = n ? sum / static_cast<double>(n) : 0.0;
  return rep;
}

}  // namespace minsurf
