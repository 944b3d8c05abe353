#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "minsurf/directsum.hpp"
#include "minsurf/frames.hpp"

using namespace minsurf;

namespace {

SpecPtr sample_direct_sum() {
  static const SpecPtr g = build_direct_sum({0.6, 0.8}, {0.2, 1.1}, make_catalog("equilateral-torus"));
  return g;
}

std::vector<std::pair<std::string, SpecPtr>> all_surfaces() {
  std::vector<std::pair<std::string, SpecPtr>> out;
  for (const auto& e : catalog()) out.emplace_back(e.name, make_catalog(e.name));
  out.emplace_back("direct-sum", sample_direct_sum());
  return out;
}

const std::vector<std::array<double, 2>> kPoints = {{0.3, -0.2}, {-0.55, 0.4}, {0.8, 0.75}};

SpecPtr rotated_chart(const SpecPtr& base, double psi) {
  return std::make_shared<const ImmersionSpec>(ImmersionSpec{AssociatedSurface{base, psi, 1}, base->label + "-rot"});
}

}  // namespace

TEST(Flag, GreatCircleHasNoNormalLevels) {
  const JetVec jv = eval_jet(*make_catalog("great-circle"), 0.2, 0.1, 6);
  const auto flag = osculating_flag(jv, 4);
  EXPECT_TRUE(flag.levels.empty());
  EXPECT_TRUE(flag.complete);
  const auto rec = invariants_at_point(jv, 3);
  EXPECT_TRUE(rec.orders.empty());
  EXPECT_THROW(order_of(rec, 1), DegenerateFlag);
  EXPECT_THROW(hopf_coefficient(jv, 1), DegenerateFlag);
}

TEST(Flag, LevelDimensionsOfCatalog) {
  const std::map<std::string, std::vector<int>> expected = {
      {"clifford-torus", {1}}, {"equilateral-torus", {2, 1}}, {"veronese", {2}}, {"great-circle", {}}};
  for (const auto& [name, dims] : expected) {
    for (const auto& [x, y] : kPoints) {
      const auto flag = osculating_flag(eval_jet(*make_catalog(name), x, y, 6), 4);
      std::vector<int> got;
      for (const auto& l : flag.levels) got.push_back(l.dim);
      EXPECT_EQ(got, dims) << name;
      EXPECT_TRUE(flag.complete) << name;
    }
  }
}

TEST(Flag, DirectSumLevelsArePlanesThenLine) {
  const auto flag = osculating_flag(eval_jet(*sample_direct_sum(), 0.1, 0.2, 8), 6);
  ASSERT_EQ(flag.levels.size(), 5u);
  for (int s = 0; s < 4; ++s) EXPECT_EQ(flag.levels[static_cast<std::size_t>(s)].dim, 2);
  EXPECT_EQ(flag.levels[4].dim, 1);
  EXPECT_TRUE(flag.complete);
}

TEST(Flag, BasisIsOrthonormalAndNormal) {
  const auto flag = osculating_flag(eval_jet(*sample_direct_sum(), -0.3, 0.4, 8), 6);
  std::vector<Eigen::VectorXd> all = {flag.position, flag.tangent[0], flag.tangent[1]};
  for (const auto& l : flag.levels)
    for (const auto& b : l.basis) all.push_back(b);
  ASSERT_EQ(all.size(), 12u);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j) EXPECT_NEAR(all[i].dot(all[j]), i == j ? 1.0 : 0.0, 1e-10);
}

TEST(Flag, RequiresSufficientJetOrder) {
  const JetVec jv = eval_jet(*make_catalog("veronese"), 0.0, 0.0, 2);
  EXPECT_THROW(osculating_flag(jv, 2), OrderExceeded);
}

TEST(Invariants, EllipseConsistency) {
  for (const auto& [name, spec] : all_surfaces()) {
    for (const auto& [x, y] : kPoints) {
      const auto rec = invariants_at(*spec, x, y, 6);
      for (const auto& o : rec.orders) {
        const double scale = std::max(1.0, o.norm2);
        EXPECT_NEAR(std::abs(o.Kperp), 2.0 * o.kappa * o.mu, 1e-10 * scale) << name << " r=" << o.r;
        EXPECT_NEAR(o.norm2, std::ldexp(o.kappa * o.kappa + o.mu * o.mu, o.r), 1e-10 * scale) << name << " r=" << o.r;
        EXPECT_GE(o.kappa, o.mu);
        EXPECT_NEAR(o.ecc * o.kappa, std::sqrt(std::max(0.0, o.kappa * o.kappa - o.mu * o.mu)), 1e-7 * std::sqrt(scale))
            << name << " r=" << o.r;
        EXPECT_NEAR(o.a_plus + o.a_minus, 2.0 * o.kappa, 1e-12 * scale);
        EXPECT_NEAR(o.a_plus * o.a_minus, o.kappa * o.kappa - o.mu * o.mu, 1e-10 * scale);
      }
    }
  }
}

TEST(Invariants, HopfModulusIdentity) {
  // |phi_r|^2 = (F/4)^{2r+2} 4^r (|alpha_{r+1}|^4 - 4^r (K_r^perp)^2), with
  // the left side from the bilinear square and the right side from H_alpha.
  for (const auto& [name, spec] : all_surfaces()) {
    for (const auto& [x, y] : kPoints) {
      const auto rec = invariants_at(*spec, x, y, 6);
      for (const auto& o : rec.orders) {
        const double r = o.r;
        const double rhs = std::pow(rec.F / 4.0, 2 * r + 2) * std::pow(4.0, r) *
                           (o.norm2 * o.norm2 - std::pow(4.0, r) * o.Kperp * o.Kperp);
        const double lhs = std::norm(o.phi_coeff);
        const double scale = std::pow(o.hermitian_scale, 2);
        EXPECT_LE(std::abs(lhs - rhs), 1e-8 * std::max(scale, 1e-300)) << name << " r=" << o.r;
      }
    }
  }
}

TEST(Invariants, GaussEquation) {
  for (const auto& e : catalog()) {
    const SpecPtr s = make_catalog(e.name);
    for (const auto& [x, y] : kPoints) {
      const auto rec = invariants_at(*s, x, y, 2);
      const double n2 = rec.orders.empty() ? 0.0 : rec.orders[0].norm2;
      EXPECT_NEAR(n2, 2.0 * (1.0 - rec.K), 1e-8 * std::max(1.0, n2)) << e.name;
      if (e.gaussian_curvature) EXPECT_NEAR(rec.K, *e.gaussian_curvature, 1e-10) << e.name;
    }
  }
}

TEST(Invariants, EquilateralTorusValues) {
  const auto rec = invariants_at(*make_catalog("equilateral-torus"), 0.4, -0.1, 2);
  EXPECT_NEAR(rec.F, 1.0, 1e-14);
  EXPECT_NEAR(rec.K, 0.0, 1e-12);
  ASSERT_EQ(rec.orders.size(), 2u);
  EXPECT_NEAR(rec.orders[0].norm2, 2.0, 1e-12);
  EXPECT_NEAR(rec.orders[0].ecc, 0.0, 1e-12);
  EXPECT_NEAR(std::abs(rec.orders[0].phi_coeff), 0.0, 1e-12);
  EXPECT_NEAR(rec.orders[1].norm2, 2.0, 1e-12);
  EXPECT_NEAR(rec.orders[0].Kperp, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(rec.orders[1].phi_coeff), 1.0 / 8.0, 1e-12);
}

TEST(Invariants, VeroneseValues) {
  const auto rec = invariants_at(*make_catalog("veronese"), 0.3, -0.2, 2);
  EXPECT_NEAR(rec.K, 1.0 / 3.0, 1e-10);
  ASSERT_EQ(rec.orders.size(), 1u);
  EXPECT_NEAR(rec.orders[0].norm2, 4.0 / 3.0, 1e-10);
  EXPECT_NEAR(rec.orders[0].Kperp, 2.0 / 3.0, 1e-10);
  EXPECT_EQ(rec.orders[0].ecc, 0.0);
  EXPECT_NEAR(std::abs(rec.orders[0].phi_coeff), 0.0, 1e-12);
}

TEST(Invariants, ChartRotationInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.6, 0.6), ang(0.0, 2.0 * std::numbers::pi);
  for (const auto& [name, spec] : all_surfaces()) {
    for (int trial = 0; trial < 3; ++trial) {
      const double psi = ang(rng), x = u(rng), y = u(rng);
      const SpecPtr rot = rotated_chart(spec, psi);
      const auto R = detail::rotation(psi);
      const auto a = invariants_at(*rot, x, y, 5);
      const auto b = invariants_at(*spec, R[0] * x + R[1] * y, R[2] * x + R[3] * y, 5);
      EXPECT_NEAR(a.K, b.K, 1e-9) << name;
      ASSERT_EQ(a.orders.size(), b.orders.size()) << name;
      for (std::size_t i = 0; i < a.orders.size(); ++i) {
        const auto &oa = a.orders[i], &ob = b.orders[i];
        const double sc = std::max(1.0, ob.norm2);
        EXPECT_NEAR(oa.norm2, ob.norm2, 1e-9 * sc) << name;
        EXPECT_NEAR(oa.Kperp, ob.Kperp, 1e-9 * sc) << name;
        EXPECT_NEAR(oa.kappa, ob.kappa, 1e-9 * sc) << name;
        EXPECT_NEAR(oa.mu, ob.mu, 1e-9 * sc) << name;
        EXPECT_NEAR(oa.ecc, ob.ecc, 1e-6) << name;
        const cplx phase = std::polar(1.0, (2.0 * oa.r + 2.0) * psi);
        EXPECT_LE(std::abs(oa.phi_coeff - phase * ob.phi_coeff), 1e-9 * std::max(1e-12, ob.hermitian_scale))
            << name << " r=" << oa.r;
      }
    }
  }
}

TEST(BundleCurvature, VeroneseLastBundle) {
  const auto rec = invariants_at(*make_catalog("veronese"), 0.1, 0.4, 1);
  EXPECT_NEAR(intrinsic_bundle_curvature(rec, 1), rec.orders[0].Kperp, 1e-12);
  EXPECT_NEAR(intrinsic_bundle_curvature(rec, 1), 2.0 / 3.0, 1e-9);
}

TEST(BundleCurvature, EquilateralTorusFirstBundle) {
  const auto rec = invariants_at(*make_catalog("equilateral-torus"), 0.1, 0.4, 2);
  EXPECT_NEAR(intrinsic_bundle_curvature(rec, 1), -rec.K, 1e-10);
}

TEST(BundleCurvature, DirectSumThirdBundle) {
  for (const auto& [x, y] : kPoints) {
    const auto rec = invariants_at(*sample_direct_sum(), x, y, 4);
    EXPECT_NEAR(intrinsic_bundle_curvature(rec, 3), rec.K, 1e-8);
    EXPECT_NEAR(rec.K, 0.0, 1e-10);
  }
}

TEST(BundleCurvature, FormulaRejectsDegenerateNormalCurvature) {
  EXPECT_THROW(bundle_curvature_formula({2.0, 1.0}, {0.0, 0.5}, 1), DivisionByDegenerateNormalCurvature);
  EXPECT_THROW(bundle_curvature_formula({2.0, 1.0, 0.5}, {0.0, 0.5}, 2), DivisionByDegenerateNormalCurvature);
}

TEST(Holonomy, TangentBundleGivesGaussianCurvature) {
  for (const char* name : {"veronese", "equilateral-torus"}) {
    const SpecPtr s = make_catalog(name);
    const auto rec = invariants_at(*s, 0.2, 0.3, 1);
    EXPECT_NEAR(connection_curvature_fd(*s, 0, 0.2, 0.3), rec.K, 1e-4) << name;
  }
}

TEST(Holonomy, AgreesWithFormula) {
  struct Case {
    SpecPtr spec;
    int r;
  };
  const std::vector<Case> cases = {{make_catalog("veronese"), 1},
                                   {make_catalog("equilateral-torus"), 1},
                                   {sample_direct_sum(), 1},
                                   {sample_direct_sum(), 2},
                                   {sample_direct_sum(), 3}};
  for (const auto& c : cases) {
    for (const auto& [x, y] : kPoints) {
      const auto rec = invariants_at(*c.spec, x, y, c.r + 1);
      const double formula = intrinsic_bundle_curvature(rec, c.r);
      EXPECT_NEAR(connection_curvature_fd(*c.spec, c.r, x, y), formula, 1e-3) << c.spec->label << " r=" << c.r;
    }
  }
}

TEST(Holonomy, DirectSumSecondBundleIsFlat) {
  EXPECT_NEAR(connection_curvature_fd(*sample_direct_sum(), 2, 0.25, -0.35), 0.0, 1e-3);
}

TEST(Holonomy, RejectsLineBundles) {
  EXPECT_THROW(connection_curvature_fd(*make_catalog("clifford-torus"), 1, 0.0, 0.0), DegenerateFlag);
}
