#pragma once

// Osculating flags and pointwise invariants of minimal surfaces in spheres.
//
// Conventions: ds^2 = F |dz|^2 and d = (d_x - i d_y)/2. The level-s top form
// alpha_{s+1}(d,...,d) is the projection of d^{s+1} f onto the orthogonal
// complement of span{f} + T + N_1 + ... + N_{s-1}. With the orthonormal
// tangent frame e_1 = f_x / sqrt(F), e_2 = f_y / sqrt(F) and E = e_1 - i e_2,
//
//   alpha_{s+1}(E,...,E) = (2/sqrt F)^{s+1} alpha_{s+1}(d,...,d)
//                        = 2^s (conj(H_{2s+1}) e_{2s+1} + conj(H_{2s+2}) e_{2s+2}),
//
// where (e_{2s+1}, e_{2s+2}) is the oriented basis of N_s obtained from the
// ordered pair alpha_{s+1}(e_1,...,e_1), alpha_{s+1}(e_1,...,e_1,e_2).
// The Hopf coefficient phi_s = <alpha_{s+1}(d,..,d), alpha_{s+1}(d,..,d)> is
// taken in the coordinate coframe, so that
//
//   |phi_s|^2 = F^{2s+2} / 2^{2s+4} (|alpha_{s+1}|^4 - 4^s (K_s^perp)^2).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "minsurf/errors.hpp"
#include "minsurf/jets.hpp"
#include "minsurf/surfaces.hpp"

namespace minsurf {

using cplx = std::complex<double>;

inline constexpr double kDegeneracyThreshold = 1e-9;
inline constexpr double kNormalCurvatureFloor = 1e-10;
inline constexpr double kCircleTie = 1e-13;

struct FlagLevel {
  int dim = 0;
  std::vector<Eigen::VectorXd> basis;  // oriented orthonormal basis of N_s
  Eigen::VectorXcd top;                // alpha_{s+1}(d, ..., d)
};

struct OsculatingFlag {
  double x = 0.0, y = 0.0;
  double F = 0.0;
  Eigen::VectorXd position;
  std::array<Eigen::VectorXd, 2> tangent;
  std::vector<FlagLevel> levels;
  /// True when the flag stopped because the geometry ran out (ambient space
  /// exhausted or a vanishing top form), not because of the requested order.
  bool complete = false;

  int dims_spanned() const {
    int d = 3;
    for (const auto& l : levels) d += l.dim;
    return d;
  }
};

namespace detail {

/// d^k f = 2^{-k} sum_j C(k,j) (-i)^j d_x^{k-j} d_y^j f.
inline Eigen::VectorXcd complex_derivative(const JetVec& jv, int k) {
  Eigen::VectorXcd r = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(jv.ambient_dim()));
  cplx unit{1.0, 0.0};
  for (int j = 0; j <= k; ++j) {
    const cplx w = unit * binomial(k, j) * std::ldexp(1.0, -k);
    for (std::size_t c = 0; c < jv.ambient_dim(); ++c) r(static_cast<Eigen::Index>(c)) += w * jv[c].partial(k - j, j);
    unit *= cplx{0.0, -1.0};
  }
  return r;
}

inline void project_out(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& q) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : q) v -= b.dot(v) * b;
}

inline Eigen::VectorXd to_real(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

/// Builds span{f}, T and the normal levels N_1..N_{max_order}.
inline OsculatingFlag osculating_flag(const JetVec& jv, int max_order) {
  if (jv.order() < max_order + 1)
    throw OrderExceeded("osculating_flag needs a jet of order " + std::to_string(max_order + 1));
  const auto dim = static_cast<Eigen::Index>(jv.ambient_dim());
  OsculatingFlag flag;
  flag.x = jv.x();
  flag.y = jv.y();
  flag.position = detail::to_real(jv.partial(0, 0));
  const Eigen::VectorXd fx = detail::to_real(jv.partial(1, 0));
  const Eigen::VectorXd fy = detail::to_real(jv.partial(0, 1));
  flag.F = 0.5 * (fx.squaredNorm() + fy.squaredNorm());

  std::vector<Eigen::VectorXd> q;
  q.push_back(flag.position.normalized());
  Eigen::VectorXd e1 = fx, e2 = fy;
  detail::project_out(e1, q);
  e1.normalize();
  q.push_back(e1);
  detail::project_out(e2, q);
  e2.normalize();
  q.push_back(e2);
  flag.tangent = {e1, e2};

  bool last_was_line = false;
  for (int s = 1; s <= max_order; ++s) {
    if (static_cast<Eigen::Index>(q.size()) >= dim) {
      flag.complete = true;
      break;
    }
    const Eigen::VectorXcd d = detail::complex_derivative(jv, s + 1);
    Eigen::VectorXd re = d.real(), im = d.imag();
    detail::project_out(re, q);
    detail::project_out(im, q);
    const double scale = d.norm();
    const double tiny = kDegeneracyThreshold * scale;
    if (std::hypot(re.norm(), im.norm()) <= tiny) {
      flag.complete = true;
      break;
    }
    if (last_was_line)
      throw DegenerateFlag(s, "a line level is followed by a nonzero level (non-regular point)");

    // Ordered pair alpha(e1,..,e1) ~ Re, alpha(e1,..,e1,e2) ~ -Im.
    const Eigen::VectorXd h1 = re;
    const Eigen::VectorXd h2 = -im;
    FlagLevel level;
    level.top = Eigen::VectorXcd(dim);
    level.top.real() = re;
    level.top.imag() = im;
    Eigen::VectorXd ea = h1.norm() > tiny ? h1 : h2;
    ea.normalize();
    Eigen::VectorXd eb = (h1.norm() > tiny ? h2 : h1);
    eb -= ea.dot(eb) * ea;
    detail::project_out(eb, q);
    level.basis.push_back(ea);
    if (eb.norm() > tiny && static_cast<Eigen::Index>(q.size()) + 1 < dim) {
      eb -= ea.dot(eb) * ea;
      eb.normalize();
      level.basis.push_back(eb);
    }
    level.dim = static_cast<int>(level.basis.size());
    last_was_line = level.dim == 1;
    for (const auto& b : level.basis) q.push_back(b);
    flag.levels.push_back(std::move(level));
  }
  if (!flag.complete && static_cast<Eigen::Index>(q.size()) >= dim) flag.complete = true;
  return flag;
}

struct OrderInvariants {
  int r = 0;
  int dim = 0;
  cplx H_odd, H_even;  // H_{2r+1}, H_{2r+2}
  double norm2 = 0.0;  // |alpha_{r+1}|^2
  double Kperp = 0.0;
  double kappa = 0.0, mu = 0.0;
  double ecc = 0.0;
  double a_plus = 0.0, a_minus = 0.0;
  cplx phi_coeff;
  double hermitian_scale = 0.0;  // |alpha_{r+1}(d,..,d)|^2, an upper bound for |phi_coeff|
  std::optional<double> Kstar;
};

struct InvariantRecord {
  double x = 0.0, y = 0.0;
  double F = 0.0;
  double K = 0.0;
  std::vector<OrderInvariants> orders;
};

/// Gaussian curvature K = -(2/F) d dbar log F from a jet of order >= 3.
inline double gaussian_curvature(const JetVec& jv) {
  if (jv.order() < 3) throw OrderExceeded("gaussian curvature needs a jet of order 3");
  Jet2<double> F(jv.order() - 1);
  for (const auto& c : jv.components()) {
    const auto cx = derivative_x(c), cy = derivative_y(c);
    F += (cx * cx + cy * cy) * 0.5;
  }
  const auto lf = log(F);
  return -(lf.partial(2, 0) + lf.partial(0, 2)) / (2.0 * F.value());
}

/// Intrinsic curvature of the plane bundle N_r from the normal-curvature
/// formula. norm2[k] = |alpha_{k+2}|^2 and kperp[k] = K_{k+1}^perp (0-based);
/// entries beyond the flag count as zero.
inline double bundle_curvature_formula(const std::vector<double>& norm2, const std::vector<double>& kperp, int r) {
  auto n = [&](int k) { return k >= 0 && k < static_cast<int>(norm2.size()) ? norm2[k] : 0.0; };
  auto kp = [&](int k) { return k >= 0 && k < static_cast<int>(kperp.size()) ? kperp[k] : 0.0; };
  const double scale_r = std::ldexp(n(r - 1), -r);
  if (std::abs(kp(r - 1)) <= kNormalCurvatureFloor * std::max(1.0, scale_r))
    throw DivisionByDegenerateNormalCurvature("K_" + std::to_string(r) + "^perp vanishes");
  if (r == 1) return kp(0) - n(1) / (2.0 * kp(0));
  const double scale_prev = std::ldexp(n(r - 2), -(r - 1));
  if (std::abs(kp(r - 2)) <= kNormalCurvatureFloor * std::max(1.0, scale_prev))
    throw DivisionByDegenerateNormalCurvature("K_" + std::to_string(r - 1) + "^perp vanishes");
  // |alpha_r|^2 = norm2[r-2], |alpha_{r+2}|^2 = norm2[r]
  return kp(r - 1) / (kp(r - 2) * kp(r - 2)) * n(r - 2) / std::ldexp(1.0, r - 2) -
         n(r) / (std::ldexp(1.0, r) * kp(r - 1));
}

/// Every pointwise invariant for the normal orders 1..max_order.
inline InvariantRecord invariants_at_point(const JetVec& jv, int max_order) {
  const int levels_wanted = std::min(max_order + 1, jv.order() - 1);
  const OsculatingFlag flag = osculating_flag(jv, levels_wanted);
  InvariantRecord rec;
  rec.x = jv.x();
  rec.y = jv.y();
  rec.F = flag.F;
  rec.K = gaussian_curvature(jv);

  std::vector<double> norm2, kperp;
  const double lambda = std::sqrt(flag.F);
  for (std::size_t i = 0; i < flag.levels.size(); ++i) {
    const FlagLevel& L = flag.levels[i];
    const int r = static_cast<int>(i) + 1;
    OrderInvariants o;
    o.r = r;
    o.dim = L.dim;
    const Eigen::VectorXcd wE = L.top * std::pow(2.0 / lambda, r + 1);
    const double inv = std::ldexp(1.0, -r);
    o.H_odd = std::conj(cplx(L.basis[0].dot(wE.real()), L.basis[0].dot(wE.imag()))) * inv;
    if (L.dim == 2) o.H_even = std::conj(cplx(L.basis[1].dot(wE.real()), L.basis[1].dot(wE.imag()))) * inv;
    const double S = std::norm(o.H_odd) + std::norm(o.H_even);
    o.norm2 = std::ldexp(S, r);
    o.Kperp = -2.0 * std::imag(o.H_odd * std::conj(o.H_even));
    double diff = std::abs(o.H_odd * o.H_odd + o.H_even * o.H_even);  // kappa^2 - mu^2
    // Below this level the ellipse cannot be told apart from a circle.
    if (diff <= kCircleTie * S) diff = 0.0;
    o.kappa = std::sqrt(0.5 * (S + diff));
    o.mu = o.kappa > 0.0 ? std::min(std::abs(o.Kperp) / (2.0 * o.kappa), o.kappa) : 0.0;
    if (diff == 0.0) o.mu = o.kappa;
    o.ecc = o.kappa > 0.0 ? std::min(1.0, std::sqrt(diff) / o.kappa) : 0.0;
    const double sgn = o.Kperp < 0.0 ? -1.0 : 1.0;
    o.a_plus = o.kappa + sgn * o.mu;
    o.a_minus = o.kappa - sgn * o.mu;
    o.phi_coeff = L.top.transpose() * L.top;
    o.hermitian_scale = L.top.squaredNorm();
    norm2.push_back(o.norm2);
    kperp.push_back(o.Kperp);
    rec.orders.push_back(o);
  }
  for (auto& o : rec.orders) {
    if (o.dim != 2) continue;
    const bool next_known = o.r < static_cast<int>(rec.orders.size()) || flag.complete;
    if (!next_known) continue;
    try {
      o.Kstar = bundle_curvature_formula(norm2, kperp, o.r);
    } catch (const DivisionByDegenerateNormalCurvature&) {
    }
  }
  if (static_cast<int>(rec.orders.size()) > max_order) rec.orders.resize(static_cast<std::size_t>(max_order));
  return rec;
}

inline const OrderInvariants& order_of(const InvariantRecord& rec, int r) {
  if (r < 1 || r > static_cast<int>(rec.orders.size()))
    throw DegenerateFlag(r, "normal level " + std::to_string(r) + " is not present");
  return rec.orders[static_cast<std::size_t>(r - 1)];
}

/// Hopf coefficient phi_r in the coordinate coframe.
inline cplx hopf_coefficient(const JetVec& jv, int r) {
  const OsculatingFlag flag = osculating_flag(jv, r);
  if (static_cast<int>(flag.levels.size()) < r)
    throw DegenerateFlag(r, "normal level " + std::to_string(r) + " is not present");
  const auto& top = flag.levels[static_cast<std::size_t>(r - 1)].top;
  return top.transpose() * top;
}

/// K_r^* of a record via the normal-curvature formula; the record must carry
/// the level above r (or a complete flag).
inline double intrinsic_bundle_curvature(const InvariantRecord& rec, int r) {
  const OrderInvariants& o = order_of(rec, r);
  if (o.dim != 2) throw DegenerateFlag(r, "N_" + std::to_string(r) + " is not a plane bundle");
  if (o.Kstar) return *o.Kstar;
  std::vector<double> norm2, kperp;
  for (const auto& k : rec.orders) {
    norm2.push_back(k.norm2);
    kperp.push_back(k.Kperp);
  }
  return bundle_curvature_formula(norm2, kperp, r);
}

/// Jet order sufficient for invariants_at_point up to `max_order`, including
/// the bundle curvature of the top order.
inline int jet_order_for(int max_order) { return std::max(3, max_order + 2); }

inline InvariantRecord invariants_at(const ImmersionSpec& spec, double x, double y, int max_order) {
  return invariants_at_point(eval_jet(spec, x, y, jet_order_for(max_order)), max_order);
}

// ---------------------------------------------------------------------------

namespace detail {

// Oriented orthonormal frame of N_r (r >= 1) or of the tangent plane (r = 0).
inline std::array<Eigen::VectorXd, 2> bundle_frame(const ImmersionSpec& spec, double x, double y, int r) {
  const JetVec jv = eval_jet(spec, x, y, std::max(r + 1, 1));
  const OsculatingFlag flag = osculating_flag(jv, r);
  if (r == 0) return flag.tangent;
  if (static_cast<int>(flag.levels.size()) < r || flag.levels[static_cast<std::size_t>(r - 1)].dim != 2)
    throw DegenerateFlag(r, "N_" + std::to_string(r) + " is not a plane on the stencil");
  const auto& b = flag.levels[static_cast<std::size_t>(r - 1)].basis;
  return {b[0], b[1]};
}

// Rotation angle of the frame from p to q inside the moving plane.
inline double frame_rotation(const std::array<Eigen::VectorXd, 2>& p, const std::array<Eigen::VectorXd, 2>& q) {
  const double re = p[0].dot(q[0]) + p[1].dot(q[1]);
  const double im = p[1].dot(q[0]) - p[0].dot(q[1]);
  return -std::atan2(im, re);
}

inline double holonomy_curvature(const ImmersionSpec& spec, int r, double x, double y, double h, double F) {
  const double a = 0.5 * h;
  const std::array<std::array<double, 2>, 4> corners = {{{x - a, y - a}, {x + a, y - a}, {x + a, y + a}, {x - a, y + a}}};
  std::array<std::array<Eigen::VectorXd, 2>, 4> frames;
  for (int k = 0; k < 4; ++k) frames[k] = bundle_frame(spec, corners[k][0], corners[k][1], r);
  double holonomy = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double t = frame_rotation(frames[k], frames[(k + 1) % 4]);
    if (std::abs(t) > 0.5) throw FrameDiscontinuity("frame of N_" + std::to_string(r) + " jumps across the stencil");
    holonomy += t;
  }
  return holonomy / (F * h * h);
}

}  // namespace detail

/// Curvature of the normal connection on N_r from the holonomy around a small
/// coordinate square of side h, with one Richardson step (h, h/2). r = 0 gives
/// the Gaussian curvature through the tangent bundle.
inline double connection_curvature_fd(const ImmersionSpec& spec, int r, double x, double y, double h = 2e-2) {
  const JetVec center = eval_jet(spec, x, y, 1);
  double F = 0.0;
  for (const auto& c : center.components()) F += 0.5 * (std::pow(c.partial(1, 0), 2) + std::pow(c.partial(0, 1), 2));
  const double coarse = detail::holonomy_curvature(spec, r, x, y, h, F);
  const double fine = detail::holonomy_curvature(spec, r, x, y, 0.5 * h, F);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace minsurf
