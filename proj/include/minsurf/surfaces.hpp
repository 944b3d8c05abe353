#pragma once

// Declarative surfaces in round spheres and their jet-valued evaluation.
//
// Every surface is a conformal map f: R^2 -> S^n subset R^{n+1} with
// ds^2 = F |dz|^2. Four kinds are supported:
//
//  * catalog entries (great-circle, clifford-torus, equilateral-torus, veronese),
//  * exponential-type flat surfaces sum_j a_j (cos, sin)(lambda_j . p + delta_j),
//  * direct sums a_1 g_{theta_1} (+) ... (+) a_m g_{theta_m} over a base curve,
//  * members of the associated family of a base surface.
//
// Associated-family members are realized as chart rotations q -> R(angle/k) q of
// the base, where k is the chart divisor. A chart rotation by psi multiplies the
// r-th Hopf coefficient by exp(i (2r+2) psi); with k = r0 + 1 and r0 the only
// level carrying a nonzero Hopf differential, this is the phase exp(2 i angle)
// of the associated family. Direct sums over a curve in S^5 use k = 3.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "minsurf/errors.hpp"
#include "minsurf/jets.hpp"

namespace minsurf {

inline constexpr int kMaxJetOrder = 16;

struct ExpTypeSurface {
  std::vector<double> amplitudes;
  std::vector<std::array<double, 2>> frequencies;
  std::vector<double> phases;

  std::size_t planes() const noexcept { return amplitudes.size(); }
  std::size_t ambient_dim() const noexcept { return 2 * amplitudes.size(); }
};

struct ImmersionSpec;
using SpecPtr = std::shared_ptr<const ImmersionSpec>;

struct CatalogSurface {
  std::string name;
};

/// Weights a, phases theta and the base curve of a direct sum.
struct DirectSumSpec {
  std::vector<double> weights;
  std::vector<double> phases;
  SpecPtr base;
  int chart_divisor = 3;

  std::size_t m() const noexcept { return weights.size(); }
};

struct AssociatedSurface {
  SpecPtr base;
  double angle = 0.0;
  int chart_divisor = 1;
};

struct ImmersionSpec {
  std::variant<CatalogSurface, ExpTypeSurface, DirectSumSpec, AssociatedSurface> kind;
  std::string label;

  std::size_t ambient_dim() const;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  std::size_t ambient_dim;
  std::optional<double> gaussian_curvature;  // when constant
  int isotropy_order;                        // highest r with Phi_r == 0
  std::size_t substantial_dim;               // dimension of the spanned linear space
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"great-circle",
       "totally geodesic great 2-sphere through the great circle (cos x, sin x, 0, ...), "
       "Mercator chart, in S^5",
       6, 1.0, 0, 3},
      {"clifford-torus", "flat Clifford torus in S^3, exp-type with a = (1/sqrt2, 1/sqrt2)", 4, 0.0, 0, 4},
      {"equilateral-torus", "flat equilateral torus in S^5, exp-type with 120-degree frequencies", 6, 0.0, 1,
       6},
      {"veronese", "Veronese surface in S^4 over the Mercator chart of S^2, K = 1/3", 5, 1.0 / 3.0, 1, 5},
  };
  return entries;
}

inline const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw UnknownCatalogName("unknown catalog surface '" + name + "'");
}

/// Exp-type data of catalog entries that are exp-type surfaces.
inline std::optional<ExpTypeSurface> catalog_exp_type(const std::string& name) {
  const double r2 = std::numbers::sqrt2;
  if (name == "clifford-torus") {
    return ExpTypeSurface{{1.0 / r2, 1.0 / r2}, {{r2, 0.0}, {0.0, r2}}, {0.0, 0.0}};
  }
  if (name == "equilateral-torus") {
    ExpTypeSurface s;
    for (int j = 0; j < 3; ++j) {
      const double t = 2.0 * std::numbers::pi * j / 3.0;
      s.amplitudes.push_back(1.0 / std::sqrt(3.0));
      s.frequencies.push_back({r2 * std::cos(t), r2 * std::sin(t)});
      s.phases.push_back(0.0);
    }
    return s;
  }
  return std::nullopt;
}

/// Builds an exp-type surface after checking the sphere, minimality and
/// conformality constraints; frequencies are rescaled to common length sqrt(2)
/// so that the induced metric is the identity.
inline ExpTypeSurface make_exp_type(std::vector<double> a, std::vector<std::array<double, 2>> lambda,
                                    std::vector<double> delta, double tol = 1e-12) {
  if (a.size() != lambda.size() || a.size() != delta.size())
    throw ConstraintViolation("amplitudes, frequencies and phases must have equal length");
  if (a.size() < 2) throw ConstraintViolation("at least two coordinate planes are required");

  double sum_a2 = 0.0;
  for (double v : a) sum_a2 += v * v;
  if (std::abs(sum_a2 - 1.0) > tol)
    throw ConstraintViolation("sphere: sum of squared amplitudes is " + std::to_string(sum_a2) + ", not 1");

  const double mu = std::hypot(lambda[0][0], lambda[0][1]);
  if (!(mu > 0.0)) throw ConstraintViolation("minimality: zero frequency vector");
  for (const auto& l : lambda)
    if (std::abs(std::hypot(l[0], l[1]) - mu) > tol * mu)
      throw ConstraintViolation("minimality: frequency vectors must share one length");

  const double scale = std::numbers::sqrt2 / mu;
  for (auto& l : lambda) {
    l[0] *= scale;
    l[1] *= scale;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    sxx += a[j] * a[j] * lambda[j][0] * lambda[j][0];
    sxy += a[j] * a[j] * lambda[j][0] * lambda[j][1];
    syy += a[j] * a[j] * lambda[j][1] * lambda[j][1];
  }
  if (std::abs(sxx - 1.0) > tol || std::abs(syy - 1.0) > tol || std::abs(sxy) > tol)
    throw ConstraintViolation("conformality: sum a_j^2 lambda_j lambda_j^T is not a multiple of the identity");
  for (double v : a)
    if (!(v > 0.0)) throw ConstraintViolation("amplitudes must be positive");
  return ExpTypeSurface{std::move(a), std::move(lambda), std::move(delta)};
}

inline SpecPtr make_catalog(const std::string& name) {
  catalog_entry(name);
  return std::make_shared<const ImmersionSpec>(ImmersionSpec{CatalogSurface{name}, name});
}

inline SpecPtr make_spec(ExpTypeSurface s, std::string label = "exp-type") {
  return std::make_shared<const ImmersionSpec>(ImmersionSpec{std::move(s), std::move(label)});
}

inline std::size_t ImmersionSpec::ambient_dim() const {
  struct Visitor {
    std::size_t operator()(const CatalogSurface& c) const { return catalog_entry(c.name).ambient_dim; }
    std::size_t operator()(const ExpTypeSurface& e) const { return e.ambient_dim(); }
    std::size_t operator()(const DirectSumSpec& d) const { return d.m() * d.base->ambient_dim(); }
    std::size_t operator()(const AssociatedSurface& a) const { return a.base->ambient_dim(); }
  };
  return std::visit(Visitor{}, kind);
}

// ---------------------------------------------------------------------------
// Evaluation. The catalog formulas are written once over a generic scalar
// (double or Jet2<double>).

namespace detail {

template <class T>
std::vector<T> eval_exp_type(const ExpTypeSurface& s, const T& x, const T& y) {
  using std::cos;
  using std::sin;
  std::vector<T> out;
  out.reserve(s.ambient_dim());
  for (std::size_t j = 0; j < s.planes(); ++j) {
    const T arg = x * s.frequencies[j][0] + y * s.frequencies[j][1] + s.phases[j];
    out.push_back(cos(arg) * s.amplitudes[j]);
    out.push_back(sin(arg) * s.amplitudes[j]);
  }
  return out;
}

// Unit sphere in the Mercator chart: (sech y cos x, sech y sin x, tanh y).
template <class T>
std::array<T, 3> mercator(const T& x, const T& y) {
  using std::cos;
  using std::exp;
  using std::sin;
  const T ep = exp(y);
  const T em = exp(-y);
  const T sech = 2.0 / (ep + em);
  const T tanh = (ep - em) * (sech * 0.5);
  return {sech * cos(x), sech * sin(x), tanh};
}

template <class T>
std::vector<T> eval_catalog(const std::string& name, const T& x, const T& y) {
  if (auto e = catalog_exp_type(name)) return eval_exp_type(*e, x, y);
  if (name == "great-circle") {
    auto [u1, u2, u3] = mercator(x, y);
    const T zero = u3 * 0.0;
    return {u1, u2, u3, zero, zero, zero};
  }
  if (name == "veronese") {
    auto [u1, u2, u3] = mercator(x, y);
    const double s3 = std::sqrt(3.0);
    return {u1 * u2 * s3,
            u1 * u3 * s3,
            u2 * u3 * s3,
            (u1 * u1 - u2 * u2) * (s3 / 2.0),
            (u1 * u1 + u2 * u2 - u3 * u3 * 2.0) * 0.5};
  }
  throw UnknownCatalogName("unknown catalog surface '" + name + "'");
}

inline std::array<double, 4> rotation(double psi) {
  const double c = std::cos(psi), s = std::sin(psi);
  return {c, -s, s, c};
}

}  // namespace detail

/// Order-`order` Taylor expansion of every ambient coordinate at (x, y).
inline JetVec eval_jet(const ImmersionSpec& spec, double x, double y, int order) {
  if (order < 0 || order > kMaxJetOrder)
    throw OrderExceeded("jet order " + std::to_string(order) + " outside [0, " + std::to_string(kMaxJetOrder) + "]");
  using J = Jet2<double>;
  const J X = J::variable_x(order, x);
  const J Y = J::variable_y(order, y);

  struct Visitor {
    double x, y;
    int order;
    const J& X;
    const J& Y;
    JetVec operator()(const CatalogSurface& c) const { return {x, y, detail::eval_catalog(c.name, X, Y)}; }
    JetVec operator()(const ExpTypeSurface& e) const { return {x, y, detail::eval_exp_type(e, X, Y)}; }
    JetVec operator()(const AssociatedSurface& a) const {
      const double psi = a.angle / a.chart_divisor;
      const auto R = detail::rotation(psi);
      const double px = R[0] * x + R[1] * y;
      const double py = R[2] * x + R[3] * y;
      const JetVec base = eval_jet(*a.base, px, py, order);
      std::vector<J> comps;
      comps.reserve(base.ambient_dim());
      for (const auto& c : base.components()) comps.push_back(compose_linear(c, R));
      return {x, y, std::move(comps)};
    }
    JetVec operator()(const DirectSumSpec& d) const {
      std::vector<J> comps;
      for (std::size_t j = 0; j < d.m(); ++j) {
        const AssociatedSurface member{d.base, d.phases[j], d.chart_divisor};
        const JetVec v = (*this)(member);
        for (const auto& c : v.components()) comps.push_back(c * d.weights[j]);
      }
      return {x, y, std::move(comps)};
    }
  };
  return std::visit(Visitor{x, y, order, X, Y}, spec.kind);
}

inline std::vector<double> eval_point(const ImmersionSpec& spec, double x, double y) {
  const JetVec jv = eval_jet(spec, x, y, 0);
  std::vector<double> r(jv.ambient_dim());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = jv[k].value();
  return r;
}

// ---------------------------------------------------------------------------
// Grids and validators.

struct Grid {
  int nx = 16;
  int ny = 16;
  double x0 = -1.0, x1 = 1.0;
  double y0 = -1.0, y1 = 1.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  /// Row-major point k: x varies fastest.
  std::array<double, 2> point(std::size_t k) const {
    const int i = static_cast<int>(k % static_cast<std::size_t>(nx));
    const int j = static_cast<int>(k / static_cast<std::size_t>(nx));
    const double tx = nx > 1 ? static_cast<double>(i) / (nx - 1) : 0.5;
    const double ty = ny > 1 ? static_cast<double>(j) / (ny - 1) : 0.5;
    return {x0 + tx * (x1 - x0), y0 + ty * (y1 - y0)};
  }
};

inline double validate_sphere(const ImmersionSpec& spec, const Grid& grid) {
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto [x, y] = grid.point(k);
    double n2 = 0.0;
    for (double v : eval_point(spec, x, y)) n2 += v * v;
    worst = std::max(worst, std::abs(n2 - 1.0));
  }
  return worst;
}

struct ConformalResiduals {
  double length_mismatch = 0.0;  // max |<f_x,f_x> - <f_y,f_y>|
  double angle = 0.0;            // max |<f_x,f_y>|
};

inline ConformalResiduals validate_conformal(const ImmersionSpec& spec, const Grid& grid) {
  ConformalResiduals r;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto [x, y] = grid.point(k);
    const JetVec jv = eval_jet(spec, x, y, 1);
    double exx = 0, eyy = 0, exy = 0;
    for (std::size_t c = 0; c < jv.ambient_dim(); ++c) {
      const double fx = jv[c].partial(1, 0), fy = jv[c].partial(0, 1);
      exx += fx * fx;
      eyy += fy * fy;
      exy += fx * fy;
    }
    r.length_mismatch = std::max(r.length_mismatch, std::abs(exx - eyy));
    r.angle = std::max(r.angle, std::abs(exy));
  }
  return r;
}

/// Max componentwise |Delta_0 f + 2 F f|; zero exactly for minimal surfaces
/// in conformal coordinates.
inline double validate_minimal(const ImmersionSpec& spec, const Grid& grid, double conformal_tol = 1e-8) {
  const auto conf = validate_conformal(spec, grid);
  if (conf.length_mismatch > conformal_tol || conf.angle > conformal_tol)
    throw NotConformal("surface '" + spec.label + "' is not conformal on the grid");
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto [x, y] = grid.point(k);
    const JetVec jv = eval_jet(spec, x, y, 2);
    double F = 0.0;
    for (std::size_t c = 0; c < jv.ambient_dim(); ++c) {
      const double fx = jv[c].partial(1, 0), fy = jv[c].partial(0, 1);
      F += 0.5 * (fx * fx + fy * fy);
    }
    for (std::size_t c = 0; c < jv.ambient_dim(); ++c) {
      const double lap = jv[c].partial(2, 0) + jv[c].partial(0, 2);
      worst = std::max(worst, std::abs(lap + 2.0 * F * jv[c].value()));
    }
  }
  return worst;
}

struct SubstantialReport {
  double smallest_singular_value = 0.0;
  std::vector<double> singular_values;  // descending
  int numeric_rank = 0;
  std::vector<std::vector<double>> defect_basis;
  bool substantial = false;
};

/// Rank of the span of sampled positions and first derivatives. Rows are
/// scaled by 1/sqrt(rows), so singular values are RMS magnitudes.
inline SubstantialReport substantial_check(const ImmersionSpec& spec, int sample_count, double threshold = 1e-6) {
  const std::size_t dim = spec.ambient_dim();
  if (sample_count < static_cast<int>(dim))
    throw ConstraintViolation("substantial_check needs at least ambient_dim samples");
  const std::size_t rows = 3 * static_cast<std::size_t>(sample_count);
  Eigen::MatrixXd M(rows, dim);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int s = 0; s < sample_count; ++s) {
    const double x = -1.0 + 2.0 * (s + 0.5) / sample_count;
    const double y = -1.0 + 2.0 * std::fmod((s + 0.5) * golden, 1.0);
    const JetVec jv = eval_jet(spec, x, y, 1);
    for (std::size_t c = 0; c < dim; ++c) {
      M(3 * s, c) = jv[c].value();
      M(3 * s + 1, c) = jv[c].partial(1, 0);
      M(3 * s + 2, c) = jv[c].partial(0, 1);
    }
  }
  M /= std::sqrt(static_cast<double>(rows));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  SubstantialReport r;
  const auto& sv = svd.singularValues();
  for (Eigen::Index k = 0; k < sv.size(); ++k) r.singular_values.push_back(sv(k));
  r.smallest_singular_value = sv(sv.size() - 1);
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > threshold) {
      ++r.numeric_rank;
    } else {
      const Eigen::VectorXd v = svd.matrixV().col(k);
      r.defect_basis.emplace_back(v.data(), v.data() + v.size());
    }
  }
  r.substantial = r.numeric_rank == static_cast<int>(dim);
  return r;
}

}  // namespace minsurf
