#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "minsurf/conditions.hpp"
#include "minsurf/directsum.hpp"

using namespace minsurf;

namespace {

SpecPtr sample_direct_sum() {
  static const SpecPtr g = build_direct_sum({0.6, 0.8}, {0.2, 1.1}, make_catalog("equilateral-torus"));
  return g;
}

const Grid kGrid6{6, 6, -1.0, 1.0, -1.0, 1.0};

}  // namespace

TEST(Laplacian, EuclideanQuadratic) {
  const ScalarField u = [](double x, double y) { return x * x + y * y; };
  EXPECT_NEAR(laplacian_fd(u, 0.3, -0.7, 1e-3, 1.0), 4.0, 1e-8);
  EXPECT_NEAR(laplacian_fd(u, 0.3, -0.7, 1e-3, 2.0), 2.0, 1e-8);
}

TEST(Laplacian, ConstantFieldIsExactlyZero) {
  const ScalarField u = [](double, double) { return 0.75; };
  EXPECT_EQ(laplacian_fd(u, 0.1, 0.2, 1e-3, 1.0), 0.0);
  EXPECT_THROW(laplacian_fd(u, 0.1, 0.2, 0.0, 1.0), DomainError);
}

TEST(Laplacian, HarmonicPolynomialAndRichardsonGain) {
  // Re z^5 is harmonic; x^6 has Laplacian 30 x^4.
  const ScalarField u = [](double x, double y) { return std::pow(x, 6) + std::real(std::pow(cplx(x, y), 5)); };
  const double exact = 30.0 * std::pow(0.4, 4);
  const double plain = std::abs(laplacian_fd(u, 0.4, 0.2, 1e-2, 1.0, false) - exact);
  const double rich = std::abs(laplacian_fd(u, 0.4, 0.2, 1e-2, 1.0, true) - exact);
  EXPECT_LT(rich, plain * 1e-2);
}

TEST(Laplacian, LogMetricOnFlatSurface) {
  const SpecPtr s = make_catalog("equilateral-torus");
  const ScalarField u = [&](double x, double y) { return std::log(detail::metric_factor(*s, x, y)); };
  EXPECT_NEAR(laplacian_fd(u, 0.2, 0.5, 1e-3, 1.0), 0.0, 1e-8);
}

TEST(Laplacian, LogOneMinusKOnVeronese) {
  const SpecPtr s = make_catalog("veronese");
  const ScalarField u = [&](double x, double y) { return std::log(1.0 - gaussian_curvature_at(*s, x, y)); };
  EXPECT_NEAR(laplacian_fd(u, 0.2, 0.5, 1e-3, detail::metric_factor(*s, 0.2, 0.5)), 0.0, 1e-6);
}

TEST(Ricci, FlatSurfacesSatisfyEveryConstant) {
  for (const char* name : {"equilateral-torus", "clifford-torus"}) {
    const SpecPtr s = make_catalog(name);
    for (double c : {4.0, 6.0, -1.5}) EXPECT_NEAR(ricci_residual(*s, 0.3, -0.4, c), 0.0, 1e-8) << name;
  }
}

TEST(Ricci, VeroneseNegativeControl) {
  const SpecPtr s = make_catalog("veronese");
  EXPECT_NEAR(ricci_residual(*s, 0.3, -0.4, 6.0), -2.0, 1e-5);
  EXPECT_NEAR(ricci_residual(*s, 0.3, -0.4, 4.0), -4.0 / 3.0, 1e-5);
}

TEST(Ricci, GreatSphereHitsCurvatureOne) {
  EXPECT_THROW(ricci_residual(*make_catalog("great-circle"), 0.1, 0.1, 6.0), CurvatureOne);
  const auto rep = check_condition(*make_catalog("great-circle"), parse_condition("ricci6"), kGrid6);
  EXPECT_EQ(rep.evaluated(), 0u);
  EXPECT_EQ(rep.curvature_one_points, kGrid6.size());
  EXPECT_EQ(rep.flagged.size(), kGrid6.size());
}

TEST(Ricci, DirectSumSatisfiesCondition) {
  const auto rep = check_condition(*sample_direct_sum(), parse_condition("ricci6"), kGrid6);
  EXPECT_EQ(rep.evaluated(), kGrid6.size());
  EXPECT_LT(rep.max_abs, 1e-6);
}

TEST(FlatMetric, ClosedFormValues) {
  EXPECT_NEAR(flat_metric_residual(*make_catalog("equilateral-torus"), 0.1, 0.2), 0.0, 1e-8);
  const double expected = std::pow(2.0 / 3.0, -1.0 / 3.0) / 3.0;
  EXPECT_NEAR(flat_metric_residual(*make_catalog("veronese"), 0.1, 0.2), expected, 1e-5);
}

TEST(FlatMetric, VanishesTogetherWithRicci) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<SpecPtr> specs = {make_catalog("veronese"), make_catalog("equilateral-torus"), sample_direct_sum()};
  for (int k = 0; k < 100; ++k) {
    const SpecPtr& s = specs[static_cast<std::size_t>(k) % specs.size()];
    const double x = u(rng), y = u(rng);
    const double K = gaussian_curvature_at(*s, x, y);
    const double lhs = flat_metric_residual(*s, x, y);
    const double rhs = -std::pow(1.0 - K, -1.0 / 3.0) / 6.0 * ricci_residual(*s, x, y, 6.0);
    EXPECT_NEAR(lhs, rhs, 1e-9) << s->label;
  }
}

TEST(Holomorphic, FirstHopfDifferentialEverywhere) {
  for (const char* name : {"veronese", "equilateral-torus", "clifford-torus"}) {
    const auto rep = check_condition(*make_catalog(name), parse_condition("holomorphic:1"), kGrid6);
    EXPECT_EQ(rep.evaluated(), kGrid6.size()) << name;
    EXPECT_LT(rep.max_abs, 1e-6) << name;
  }
}

TEST(Holomorphic, DirectSumIsExceptional) {
  for (int r = 1; r <= 4; ++r)
    EXPECT_LT(holomorphicity_residual(*sample_direct_sum(), r, 0.3, -0.1), 1e-6) << "r=" << r;
}

TEST(Holomorphic, ConstantCoefficientOnTorus) {
  EXPECT_LT(holomorphicity_residual(*make_catalog("equilateral-torus"), 2, 0.3, 0.2), 1e-10);
}

TEST(Holomorphic, RotatedChartStaysHolomorphic) {
  const SpecPtr s = make_catalog("veronese");
  const SpecPtr rotated =
      std::make_shared<const ImmersionSpec>(ImmersionSpec{AssociatedSurface{s, 0.4, 1}, "veronese-rot"});
  EXPECT_LT(holomorphicity_residual(*rotated, 1, 0.2, 0.1), 1e-6);
}

TEST(Eccentricity, EquilateralTorusIsIsotropic) {
  const auto rep = eccentricity_constancy(*make_catalog("equilateral-torus"), 1, Grid{16, 16});
  EXPECT_LT(rep.spread, 1e-8);
  EXPECT_NEAR(rep.max, 0.0, 1e-8);
  EXPECT_EQ(rep.skipped, 0u);
}

TEST(Eccentricity, VeroneseFirstEllipseIsCircle) {
  const auto rep = eccentricity_constancy(*make_catalog("veronese"), 1, Grid{16, 16});
  EXPECT_EQ(rep.max, 0.0);
  EXPECT_EQ(rep.spread, 0.0);
}

TEST(Eccentricity, DirectSumIsExceptional) {
  for (int r = 1; r <= 4; ++r) EXPECT_LT(eccentricity_constancy(*sample_direct_sum(), r, kGrid6).spread, 1e-6) << r;
}

TEST(Eccentricity, DegeneratePointsAreSkipped) {
  const auto rep = eccentricity_constancy(*make_catalog("great-circle"), 1, kGrid6);
  EXPECT_EQ(rep.skipped, kGrid6.size());
}

TEST(LaplacianIdentity, VeroneseVariantThree) {
  EXPECT_LT(std::abs(laplacian_identity_residual(*make_catalog("veronese"), 1, 0.2, -0.3, Prop32Variant::III)), 1e-5);
}

TEST(LaplacianIdentity, DirectSumVariantThree) {
  EXPECT_LT(std::abs(laplacian_identity_residual(*sample_direct_sum(), 1, 0.2, -0.3, Prop32Variant::III)), 1e-4);
}

TEST(LaplacianIdentity, VariantOneOnVeronese) {
  EXPECT_LT(std::abs(laplacian_identity_residual(*make_catalog("veronese"), 1, 0.2, -0.3, Prop32Variant::I)), 1e-5);
}

TEST(LaplacianIdentity, InapplicableCases) {
  EXPECT_THROW(laplacian_identity_residual(*make_catalog("great-circle"), 1, 0.0, 0.0, Prop32Variant::III),
               VariantInapplicable);
  EXPECT_THROW(laplacian_identity_residual(*make_catalog("veronese"), 1, 0.0, 0.0, Prop32Variant::II),
               VariantInapplicable);
  EXPECT_THROW(laplacian_identity_residual(*make_catalog("equilateral-torus"), 2, 0.0, 0.0, Prop32Variant::III),
               VariantInapplicable);
}

TEST(Conditions, ParseNames) {
  EXPECT_EQ(parse_condition("ricci6").name(), "ricci6");
  EXPECT_EQ(parse_condition("ricci4").c, 4.0);
  EXPECT_EQ(parse_condition("flat-metric").kind, ConditionKind::FlatMetric);
  EXPECT_EQ(parse_condition("holomorphic:3").order, 3);
  EXPECT_EQ(parse_condition("exceptional:2").name(), "exceptional:2");
  EXPECT_EQ(parse_condition("prop32:1").kind, ConditionKind::Prop32);
  for (const char* bad : {"ricci5", "holomorphic:", "holomorphic:0", "prop32:x", ""})
    EXPECT_THROW(parse_condition(bad), ConfigError) << bad;
}

TEST(Conditions, ReportCarriesConvergenceAudit) {
  const auto rep = check_condition(*make_catalog("veronese"), parse_condition("ricci6"), kGrid6);
  ASSERT_TRUE(rep.audit.has_value());
  EXPECT_NEAR((*rep.audit)[0], (*rep.audit)[1], 1e-5);
  EXPECT_EQ(rep.extrapolation_order, 4);
  EXPECT_NEAR(rep.mean_abs, 2.0, 1e-5);
}

TEST(Conditions, ExceptionalReportOnDirectSum) {
  const auto rep = check_condition(*sample_direct_sum(), parse_condition("exceptional:4"), kGrid6);
  EXPECT_EQ(rep.evaluated(), kGrid6.size());
  EXPECT_LT(rep.max_abs, 1e-6);
}

TEST(Conditions, ThreadCountDoesNotChangeResults) {
  ConditionOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const auto a = check_condition(*make_catalog("veronese"), parse_condition("flat-metric"), kGrid6, one);
  const auto b = check_condition(*make_catalog("veronese"), parse_condition("flat-metric"), kGrid6, many);
  ASSERT_EQ(a.residuals.size(), b.residuals.size());
  for (std::size_t k = 0; k < a.residuals.size(); ++k) EXPECT_EQ(a.residuals[k], b.residuals[k]);
}
