#pragma once

// Direct sums of associated-family members of a pseudoholomorphic curve in
// S^5, the C-vector recursion and the constants it predicts.
//
// Associated family. For an exp-type base whose only nonzero Hopf
// differential is phi_{r0}, the member at angle theta is realized as
// g(R(theta / k) q) with k = r0 + 1: a rotation of the chart by psi multiplies
// phi_r by e^{i(2r+2)psi}, so phi_{r0} picks up e^{2 i theta}, the metric is
// unchanged and the remaining Hopf differentials stay zero. Pseudoholomorphic
// curves in S^5 have r0 = 2, hence k = 3.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "minsurf/conditions.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/frames.hpp"
#include "minsurf/parallel.hpp"
#include "minsurf/surfaces.hpp"

namespace minsurf {

using CVec = Eigen::VectorXcd;

/// Standard Hermitian product, linear in the first argument.
inline cplx hermitian(const CVec& u, const CVec& v) { return (u.array() * v.conjugate().array()).sum(); }

inline void validate_direct_sum(const DirectSumSpec& d, double tol = 1e-12) {
  if (d.m() < 1) throw ConstraintViolation("direct sum needs m >= 1");
  if (d.phases.size() != d.m()) throw ConstraintViolation("weights and phases must have equal length");
  double s = 0.0;
  for (std::size_t j = 0; j < d.m(); ++j) {
    if (d.weights[j] == 0.0) throw ConstraintViolation("weight a_" + std::to_string(j + 1) + " is zero");
    s += d.weights[j] * d.weights[j];
  }
  if (std::abs(s - 1.0) > tol) throw ConstraintViolation("sum of squared weights is " + std::to_string(s) + ", not 1");
  for (std::size_t j = 0; j < d.m(); ++j) {
    if (d.phases[j] < 0.0 || d.phases[j] >= std::numbers::pi)
      throw ConstraintViolation("phase theta_" + std::to_string(j + 1) + " is outside [0, pi)");
    if (j > 0 && !(d.phases[j] > d.phases[j - 1])) throw ConstraintViolation("phases must be strictly increasing");
  }
}

// ---------------------------------------------------------------------------
// C-vectors.

struct CVectors {
  std::vector<double> a, theta;
  std::vector<CVec> C;  // C[0] = C_1 = a, ..., C[3m-1] = C_{3m}
  double projection_defect = 0.0;  // audit of the Gram-Schmidt steps (cosine)

  int m() const { return static_cast<int>(a.size()); }
  const CVec& at(int s) const { return C.at(static_cast<std::size_t>(s - 1)); }
};

namespace detail {

inline double cosine(const CVec& u, const CVec& v) {
  const double n = u.norm() * v.norm();
  return n > 0.0 ? std::abs(hermitian(u, v)) / n : 0.0;
}

}  // namespace detail

inline CVectors c_vector_recursion(const std::vector<double>& a, const std::vector<double>& theta) {
  if (a.size() != theta.size() || a.empty()) throw ConstraintViolation("a and theta must be nonempty and equally long");
  const int m = static_cast<int>(a.size());
  CVectors cv;
  cv.a = a;
  cv.theta = theta;
  CVec T(m), c1(m);
  for (int j = 0; j < m; ++j) {
    T(j) = std::polar(1.0, -theta[static_cast<std::size_t>(j)]);
    c1(j) = a[static_cast<std::size_t>(j)];
  }
  cv.C.push_back(c1);
  for (int s = 1; s < 3 * m; ++s) {
    const CVec& cs = cv.at(s);
    CVec next(m);
    std::vector<CVec> projectors;
    switch (s % 6) {
      case 0:
        next = cs;
        for (int t = 1; t <= s; ++t) {
          const CVec& ct = cv.at(t);
          if (t % 6 == 1) {
            next -= hermitian(cs, ct) / ct.squaredNorm() * ct;
            projectors.push_back(ct);
          } else if (t % 6 == 5) {
            const CVec cb = ct.conjugate();
            next -= hermitian(cs, cb) / ct.squaredNorm() * cb;
            projectors.push_back(cb);
          }
        }
        break;
      case 1: next = 2.0 * T.cwiseProduct(cs); break;
      case 2: next = 2.0 * cs; break;
      case 3:
        next = -cs;
        for (int t = 1; t <= s; ++t) {
          const CVec& ct = cv.at(t);
          if (t % 6 == 2) {
            const CVec cb = ct.conjugate();
            next += hermitian(cs, cb) / ct.squaredNorm() * cb;
            projectors.push_back(cb);
          } else if (t % 6 == 4) {
            next += hermitian(cs, ct) / ct.squaredNorm() * ct;
            projectors.push_back(ct);
          }
        }
        break;
      case 4: next = -2.0 * T.cwiseProduct(cs); break;
      case 5: next = -2.0 * cs; break;
    }
    if (next.norm() <= 1e-12 * std::max(1.0, cs.norm())) throw ZeroVector(s + 1);
    for (const auto& p : projectors) cv.projection_defect = std::max(cv.projection_defect, detail::cosine(next, p));
    cv.C.push_back(next);
  }
  return cv;
}

/// Worst violation per orthogonality class, as the cosine |(u, v)|/(|u||v|).
struct OrthogonalityReport {
  std::map<std::string, double> classes;
  double worst() const {
    double w = 0.0;
    for (const auto& [k, v] : classes) w = std::max(w, v);
    return w;
  }
};

inline OrthogonalityReport orthogonality_report(const CVectors& cv) {
  OrthogonalityReport rep;
  const int n = static_cast<int>(cv.C.size());
  auto bump = [&](const std::string& key, double v) {
    auto [it, inserted] = rep.classes.emplace(key, v);
    if (!inserted) it->second = std::max(it->second, v);
  };
  for (const char* key : {"(C_t, conj C_t'): t=1,t'=5 mod 6", "(C_t, conj C_t'): t=2,t'=4 mod 6",
                          "(C_t, C_t'), (C_t, conj C_t'): t,t'=0 or 3 mod 6",
                          "(C_t, C_t'): t,t'=1,2,4 or 5 mod 6", "(C_t, a): t=0,1,5 mod 6"})
    rep.classes[key] = 0.0;
  for (int t = 1; t <= n; ++t) {
    for (int u = 1; u <= n; ++u) {
      const CVec& ct = cv.at(t);
      const CVec& cu = cv.at(u);
      const int rt = t % 6, ru = u % 6;
      if ((rt == 1 && ru == 5)) bump("(C_t, conj C_t'): t=1,t'=5 mod 6", detail::cosine(ct, cu.conjugate()));
      if ((rt == 2 && ru == 4)) bump("(C_t, conj C_t'): t=2,t'=4 mod 6", detail::cosine(ct, cu.conjugate()));
      if (t != u && rt == ru && (rt == 0 || rt == 3)) {
        bump("(C_t, C_t'), (C_t, conj C_t'): t,t'=0 or 3 mod 6", detail::cosine(ct, cu));
        bump("(C_t, C_t'), (C_t, conj C_t'): t,t'=0 or 3 mod 6", detail::cosine(ct, cu.conjugate()));
      }
      if (t != u && rt == ru && (rt == 1 || rt == 2 || rt == 4 || rt == 5))
        bump("(C_t, C_t'): t,t'=1,2,4 or 5 mod 6", detail::cosine(ct, cu));
    }
    if (t >= 2 && (t % 6 == 0 || t % 6 == 1 || t % 6 == 5)) bump("(C_t, a): t=0,1,5 mod 6", detail::cosine(cv.at(t), cv.at(1)));
  }
  return rep;
}

struct PredictedConstants {
  int m = 0;
  std::vector<double> b;                // b[s-1] = b_s, 1 <= s <= 3m-1
  std::vector<std::optional<double>> c;  // c[s-1] = c_s for s < 3m-1
  std::map<int, cplx> d;                // s = 2 mod 3
  std::vector<double> rho;              // rho[s-1]
};

/// Exponent of (1 - K) in the length and normal-curvature formulas.
inline int curvature_exponent(int s) {
  switch (s % 3) {
    case 0: return s / 3;
    case 1: return (s + 2) / 3;
    default: return (s + 1) / 3;
  }
}

inline PredictedConstants predicted_constants(const CVectors& cv) {
  PredictedConstants p;
  p.m = cv.m();
  const int top = 3 * p.m - 1;
  for (int s = 1; s <= top; ++s) {
    const CVec& c = cv.at(s + 1);
    const double n2 = c.squaredNorm();
    const double bil = std::abs(cplx(c.transpose() * c));  // |(C, conj C)|
    double b = 0.0;
    std::optional<double> k;
    switch (s % 3) {
      case 0:
        b = std::exp2((3.0 - 4.0 * s) / 3.0) * n2;
        k = std::exp2((3.0 - 7.0 * s) / 3.0) * n2;
        break;
      case 1:
        b = std::exp2((1.0 - 4.0 * s) / 3.0) * n2;
        k = std::exp2((1.0 - 7.0 * s) / 3.0) * n2;
        break;
      default:
        b = std::exp2(-(1.0 + 4.0 * s) / 3.0) * n2;
        k = std::exp2(-(1.0 + 7.0 * s) / 3.0) * std::sqrt(std::max(0.0, n2 * n2 - bil * bil));
        p.d[s] = std::exp2(-4.0 * (s + 1) / 3.0) * std::conj(cplx(c.transpose() * c));
        break;
    }
    p.b.push_back(b);
    p.c.push_back(s < top ? k : std::nullopt);
    p.rho.push_back(s % 3 == 2 ? std::sqrt(std::max(0.0, 1.0 - bil * bil / (n2 * n2))) : 1.0);
  }
  return p;
}

/// Random admissible (a, theta): weights bounded away from zero, phases
/// separated by more than 0.05.
inline std::pair<std::vector<double>, std::vector<double>> random_admissible(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    std::vector<double> a(static_cast<std::size_t>(m)), th(static_cast<std::size_t>(m));
    double n = 0.0;
    for (auto& v : a) {
      v = unit(rng) * 2.0 - 1.0;
      n += v * v;
    }
    n = std::sqrt(n);
    bool ok = n > 0.0;
    for (auto& v : a) {
      v /= n;
      ok = ok && std::abs(v) > 0.1;
    }
    for (auto& t : th) t = unit(rng) * std::numbers::pi;
    std::sort(th.begin(), th.end());
    for (int j = 1; j < m; ++j) ok = ok && th[static_cast<std::size_t>(j)] - th[static_cast<std::size_t>(j - 1)] > 0.05;
    if (ok) return {a, th};
  }
}

// ---------------------------------------------------------------------------
// Pseudoholomorphic proxy and construction.

struct ProxyReport {
  double sphere = 0.0;
  double minimal = 0.0;
  double conformal = 0.0;
  double hopf1 = 0.0;  // max |phi_1| / |alpha_2(d, d)|^2
  double max_abs_K = 0.0;
  std::vector<int> flag_dims;  // at the first grid point
  bool dims_uniform = true;
  bool substantial = false;
  std::string failure;  // empty when the proxy holds

  bool ok() const { return failure.empty(); }
};

inline ProxyReport pseudoholomorphic_proxy(const ImmersionSpec& spec, const Grid& grid, double tol = 1e-8) {
  ProxyReport rep;
  if (spec.ambient_dim() != 6) {
    rep.failure = "not a curve in S^5";
    return rep;
  }
  rep.sphere = validate_sphere(spec, grid);
  const auto conf = validate_conformal(spec, grid);
  rep.conformal = std::max(conf.length_mismatch, conf.angle);
  if (rep.conformal > tol) {
    rep.failure = "not conformal";
    return rep;
  }
  rep.minimal = validate_minimal(spec, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto [x, y] = grid.point(k);
    const InvariantRecord rec = invariants_at(spec, x, y, 2);
    std::vector<int> dims;
    for (const auto& o : rec.orders) dims.push_back(o.dim);
    if (k == 0) rep.flag_dims = dims;
    rep.dims_uniform = rep.dims_uniform && dims == rep.flag_dims;
    rep.max_abs_K = std::max(rep.max_abs_K, std::abs(rec.K));
    if (!rec.orders.empty())
      rep.hopf1 = std::max(rep.hopf1, std::abs(rec.orders[0].phi_coeff) / rec.orders[0].hermitian_scale);
  }
  rep.substantial = substantial_check(spec, 64).substantial;
  if (rep.sphere > tol) rep.failure = "not in the unit sphere";
  else if (rep.minimal > tol) rep.failure = "not minimal";
  else if (rep.hopf1 > tol) rep.failure = "phi_1 does not vanish";
  else if (!rep.dims_uniform || rep.flag_dims != std::vector<int>{2, 1}) rep.failure = "flag dimensions are not (2, 1)";
  else if (!rep.substantial) rep.failure = "not substantial in S^5";
  return rep;
}

namespace detail {

// Levels r whose Hopf differential is nonzero at a few sample points.
inline std::vector<int> nonzero_hopf_levels(const ImmersionSpec& spec, double tol = 1e-8) {
  std::vector<int> levels;
  const std::array<std::array<double, 2>, 3> pts = {{{0.13, -0.27}, {-0.41, 0.35}, {0.52, 0.08}}};
  for (const auto& p : pts) {
    const JetVec jv = eval_jet(spec, p[0], p[1], 10);
    const OsculatingFlag flag = osculating_flag(jv, 8);
    for (std::size_t i = 0; i < flag.levels.size(); ++i) {
      const auto& top = flag.levels[i].top;
      const cplx phi = top.transpose() * top;
      const int r = static_cast<int>(i) + 1;
      if (std::abs(phi) > tol * top.squaredNorm() && std::find(levels.begin(), levels.end(), r) == levels.end())
        levels.push_back(r);
    }
  }
  std::sort(levels.begin(), levels.end());
  return levels;
}

inline std::optional<ExpTypeSurface> as_exp_type(const ImmersionSpec& spec) {
  if (const auto* e = std::get_if<ExpTypeSurface>(&spec.kind)) return *e;
  if (const auto* c = std::get_if<CatalogSurface>(&spec.kind)) return catalog_exp_type(c->name);
  return std::nullopt;
}

inline std::string format_angle(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Divisor k of the chart rotation that realizes the associated family.
inline int associated_chart_divisor(const ImmersionSpec& spec) {
  const auto levels = detail::nonzero_hopf_levels(spec);
  if (levels.size() != 1)
    throw UnsupportedKind("associated family needs exactly one nonzero Hopf differential, found " +
                          std::to_string(levels.size()));
  return levels.front() + 1;
}

inline SpecPtr build_direct_sum(const std::vector<double>& a, const std::vector<double>& theta, SpecPtr base,
                                const Grid& proxy_grid = Grid{6, 6, -1.0, 1.0, -1.0, 1.0}) {
  DirectSumSpec d{a, theta, base, 3};
  validate_direct_sum(d);
  const ProxyReport proxy = pseudoholomorphic_proxy(*base, proxy_grid);
  if (!proxy.ok()) throw BaseNotPseudoholomorphic("base '" + base->label + "': " + proxy.failure);
  d.chart_divisor = associated_chart_divisor(*base);
  std::string label = "direct-sum(a=";
  for (std::size_t j = 0; j < a.size(); ++j) label += (j ? "," : "") + detail::format_angle(a[j]);
  label += ";theta=";
  for (std::size_t j = 0; j < theta.size(); ++j) label += (j ? "," : "") + detail::format_angle(theta[j]);
  label += ")";
  return std::make_shared<const ImmersionSpec>(ImmersionSpec{std::move(d), std::move(label)});
}

/// Member of the associated family at angle phi.
inline SpecPtr associated_family(const SpecPtr& spec, double phi) {
  if (phi == 0.0) return spec;
  const std::string label = spec->label + "@" + detail::format_angle(phi);
  if (const auto* d = std::get_if<DirectSumSpec>(&spec->kind)) {
    DirectSumSpec out = *d;
    for (auto& t : out.phases) t += phi;
    return std::make_shared<const ImmersionSpec>(ImmersionSpec{std::move(out), label});
  }
  const auto exp = detail::as_exp_type(*spec);
  if (!exp) throw UnsupportedKind("associated family is available for exp-type surfaces and direct sums only");
  const int k = associated_chart_divisor(*spec);
  // g(R(psi) q) has frequencies R(-psi) lambda.
  const double psi = phi / k;
  ExpTypeSurface out = *exp;
  const double c = std::cos(psi), s = std::sin(psi);
  for (auto& l : out.frequencies) l = {c * l[0] + s * l[1], -s * l[0] + c * l[1]};
  return std::make_shared<const ImmersionSpec>(ImmersionSpec{std::move(out), label});
}

// ---------------------------------------------------------------------------
// Prediction against measurement.

struct OrderComparison {
  int s = 0;
  double predicted_b = 0.0;
  std::optional<double> predicted_c;
  std::optional<cplx> predicted_d;
  double rho = 1.0;
  double measured_norm2 = 0.0;  // first grid point
  double measured_Kperp = 0.0;
  cplx measured_phi;
  cplx predicted_phi;
  double rel_norm2 = 0.0;  // max over grid
  double rel_Kperp = 0.0;
  double rel_hopf = 0.0;
};

struct DirectSumComparison {
  std::vector<OrderComparison> orders;
  double isometry = 0.0;
  double minimality = 0.0;
  std::vector<double> exceptional_spread;  // r = 1 .. 3m-2
  std::size_t skipped_points = 0;
};

inline DirectSumComparison compare_predicted_measured(const SpecPtr& g_hat, const Grid& grid, unsigned threads = 0) {
  const auto* d = std::get_if<DirectSumSpec>(&g_hat->kind);
  if (!d) throw UnsupportedKind("compare_predicted_measured needs a direct sum");
  const int m = static_cast<int>(d->m());
  const int top = 3 * m - 1;
  const CVectors cv = c_vector_recursion(d->weights, d->phases);
  const PredictedConstants pc = predicted_constants(cv);

  DirectSumComparison out;
  out.orders.resize(static_cast<std::size_t>(top));
  for (int s = 1; s <= top; ++s) {
    auto& o = out.orders[static_cast<std::size_t>(s - 1)];
    o.s = s;
    o.predicted_b = pc.b[static_cast<std::size_t>(s - 1)];
    o.predicted_c = pc.c[static_cast<std::size_t>(s - 1)];
    if (pc.d.count(s)) o.predicted_d = pc.d.at(s);
    o.rho = pc.rho[static_cast<std::size_t>(s - 1)];
  }

  struct PointResult {
    bool ok = false;
    std::vector<double> rel_norm2, rel_Kperp, rel_hopf;
    std::vector<double> norm2, Kperp;
    std::vector<cplx> phi, pred_phi;
    double isometry = 0.0;
  };
  std::vector<PointResult> results(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t k) {
        const auto [x, y] = grid.point(k);
        PointResult& pr = results[k];
        InvariantRecord hat, base;
        try {
          hat = invariants_at(*g_hat, x, y, top);
          base = invariants_at(*d->base, x, y, 2);
        } catch (const DegenerateFlag&) {
          return;
        }
        if (static_cast<int>(hat.orders.size()) < top || base.orders.size() < 2) return;
        const cplx phi_base = base.orders[1].phi_coeff;
        const double one_minus_k = 1.0 - base.K;
        for (int s = 1; s <= top; ++s) {
          const OrderInvariants& o = hat.orders[static_cast<std::size_t>(s - 1)];
          const auto& oc = out.orders[static_cast<std::size_t>(s - 1)];
          const double pw = std::pow(one_minus_k, curvature_exponent(s));
          const double pb = oc.predicted_b * pw;
          pr.rel_norm2.push_back(std::abs(o.norm2 - pb) / pb);
          if (oc.predicted_c) {
            const double pk = *oc.predicted_c * pw;
            // K^perp never exceeds 2^{-s}|alpha_{s+1}|^2, the natural scale.
            const double scale = std::max(std::abs(pk), std::ldexp(pb, -s));
            pr.rel_Kperp.push_back(std::abs(o.Kperp - pk) / scale);
          } else {
            pr.rel_Kperp.push_back(0.0);
          }
          const cplx pred = oc.predicted_d ? *oc.predicted_d * std::pow(phi_base, (s + 1) / 3) : cplx{};
          const double denom = std::abs(pred) > 1e-3 * o.hermitian_scale ? std::abs(pred) : o.hermitian_scale;
          pr.rel_hopf.push_back(std::abs(o.phi_coeff - pred) / denom);
          pr.norm2.push_back(o.norm2);
          pr.Kperp.push_back(o.Kperp);
          pr.phi.push_back(o.phi_coeff);
          pr.pred_phi.push_back(pred);
        }
        const JetVec jh = eval_jet(*g_hat, x, y, 1), jb = eval_jet(*d->base, x, y, 1);
        auto metric = [](const JetVec& j) {
          std::array<double, 3> g{};
          for (const auto& c : j.components()) {
            g[0] += c.partial(1, 0) * c.partial(1, 0);
            g[1] += c.partial(1, 0) * c.partial(0, 1);
            g[2] += c.partial(0, 1) * c.partial(0, 1);
          }
          return g;
        };
        const auto gh = metric(jh), gb = metric(jb);
        for (int i = 0; i < 3; ++i) pr.isometry = std::max(pr.isometry, std::abs(gh[i] - gb[i]));
        pr.ok = true;
      },
      threads);

  bool first = true;
  for (const auto& pr : results) {
    if (!pr.ok) {
      ++out.skipped_points;
      continue;
    }
    out.isometry = std::max(out.isometry, pr.isometry);
    for (int s = 1; s <= top; ++s) {
      auto& o = out.orders[static_cast<std::size_t>(s - 1)];
      const auto i = static_cast<std::size_t>(s - 1);
      o.rel_norm2 = std::max(o.rel_norm2, pr.rel_norm2[i]);
      o.rel_Kperp = std::max(o.rel_Kperp, pr.rel_Kperp[i]);
      o.rel_hopf = std::max(o.rel_hopf, pr.rel_hopf[i]);
      if (first) {
        o.measured_norm2 = pr.norm2[i];
        o.measured_Kperp = pr.Kperp[i];
        o.measured_phi = pr.phi[i];
        o.predicted_phi = pr.pred_phi[i];
      }
    }
    first = false;
  }
  out.minimality = validate_minimal(*g_hat, grid);
  for (int r = 1; r <= top - 1; ++r) out.exceptional_spread.push_back(eccentricity_constancy(*g_hat, r, grid, threads).spread);
  return out;
}

// ---------------------------------------------------------------------------
// Polar surface.

struct ProcrustesResult {
  Eigen::MatrixXd rotation;
  double rms = 0.0;
};

/// Orthogonal Q minimizing sum |Q p_k - q_k|^2 over point pairs (columns).
inline ProcrustesResult procrustes(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q) {
  if (P.rows() != Q.rows() || P.cols() != Q.cols() || P.cols() == 0)
    throw ConstraintViolation("procrustes needs two nonempty point sets of equal shape");
  const Eigen::MatrixXd M = Q * P.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesResult r;
  r.rotation = svd.matrixU() * svd.matrixV().transpose();
  r.rms = std::sqrt((r.rotation * P - Q).colwise().squaredNorm().mean());
  return r;
}

struct PolarReport {
  Eigen::MatrixXd surface;  // columns g(p_k)
  Eigen::MatrixXd polar;    // columns g*(p_k)
  double rms = 0.0;
  double min_neighbor_dot = 1.0;
};

inline PolarReport polar_surface(const ImmersionSpec& spec, const Grid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto dim = static_cast<Eigen::Index>(spec.ambient_dim());
  PolarReport rep;
  rep.surface.resize(dim, n);
  rep.polar.resize(dim, n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto [x, y] = grid.point(k);
    const JetVec jv = eval_jet(spec, x, y, 3);
    const OsculatingFlag flag = osculating_flag(jv, 2);
    if (flag.levels.size() < 2 || flag.levels[1].dim != 1)
      throw DegenerateFlag(2, "N_2 is not a line bundle at (" + std::to_string(x) + ", " + std::to_string(y) + ")");
    const auto kk = static_cast<Eigen::Index>(k);
    rep.surface.col(kk) = flag.position;
    rep.polar.col(kk) = flag.levels[1].basis[0];
  }
  // Continuous sign: align with the left neighbour, or the one below at the
  // start of a row.
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const std::size_t i = k % static_cast<std::size_t>(grid.nx);
    const std::size_t ref = i > 0 ? k - 1 : k - static_cast<std::size_t>(grid.nx);
    const auto kk = static_cast<Eigen::Index>(k), rr = static_cast<Eigen::Index>(ref);
    if (rep.polar.col(kk).dot(rep.polar.col(rr)) < 0.0) rep.polar.col(kk) *= -1.0;
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const std::size_t i = k % static_cast<std::size_t>(grid.nx);
    const auto kk = static_cast<Eigen::Index>(k);
    if (i > 0) rep.min_neighbor_dot = std::min(rep.min_neighbor_dot, rep.polar.col(kk).dot(rep.polar.col(kk - 1)));
    if (k >= static_cast<std::size_t>(grid.nx))
      rep.min_neighbor_dot = std::min(rep.min_neighbor_dot, rep.polar.col(kk).dot(rep.polar.col(kk - grid.nx)));
  }
  if (rep.min_neighbor_dot < 0.5) throw SignDiscontinuity("no continuous sign for the polar field on this grid");
  rep.rms = procrustes(rep.surface, rep.polar).rms;
  return rep;
}

}  // namespace minsurf
