#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "minsurf/directsum.hpp"
#include "minsurf/surfaces.hpp"

using namespace minsurf;

namespace {

const Grid kGrid16{16, 16, -1.0, 1.0, -1.0, 1.0};

std::array<double, 3> metric_at(const ImmersionSpec& spec, double x, double y) {
  const JetVec jv = eval_jet(spec, x, y, 1);
  std::array<double, 3> g{};
  for (const auto& c : jv.components()) {
    g[0] += c.partial(1, 0) * c.partial(1, 0);
    g[1] += c.partial(1, 0) * c.partial(0, 1);
    g[2] += c.partial(0, 1) * c.partial(0, 1);
  }
  return g;
}

}  // namespace

TEST(Catalog, AllEntriesPassValidators) {
  for (const auto& e : catalog()) {
    const SpecPtr s = make_catalog(e.name);
    EXPECT_EQ(s->ambient_dim(), e.ambient_dim) << e.name;
    EXPECT_LT(validate_sphere(*s, kGrid16), 1e-10) << e.name;
    const auto conf = validate_conformal(*s, kGrid16);
    EXPECT_LT(conf.length_mismatch, 1e-10) << e.name;
    EXPECT_LT(conf.angle, 1e-10) << e.name;
    EXPECT_LT(validate_minimal(*s, kGrid16), 1e-10) << e.name;
  }
}

TEST(Catalog, UnknownNameThrows) { EXPECT_THROW(make_catalog("no-such-surface"), UnknownCatalogName); }

TEST(Catalog, GreatCircleTaylorCoefficients) {
  const JetVec jv = eval_jet(*make_catalog("great-circle"), 0.0, 0.0, 2);
  EXPECT_NEAR(jv[0].coeff(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(jv[0].coeff(2, 0), -0.5, 1e-15);
}

TEST(Catalog, EquilateralTorusAtOrigin) {
  const auto p = eval_point(*make_catalog("equilateral-torus"), 0.0, 0.0);
  const double a = 1.0 / std::sqrt(3.0);
  const std::vector<double> expected = {a, 0.0, a, 0.0, a, 0.0};
  ASSERT_EQ(p.size(), expected.size());
  for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], expected[k], 1e-15);
}

TEST(Catalog, TightResidualsOnFlatTori) {
  for (const char* name : {"equilateral-torus", "clifford-torus", "veronese"}) {
    const SpecPtr s = make_catalog(name);
    EXPECT_LT(validate_sphere(*s, kGrid16), 1e-12) << name;
  }
  for (const char* name : {"equilateral-torus", "clifford-torus"}) {
    const auto conf = validate_conformal(*make_catalog(name), kGrid16);
    EXPECT_LT(conf.length_mismatch, 1e-12) << name;
    EXPECT_LT(conf.angle, 1e-12) << name;
  }
}

TEST(ExpType, AcceptsEquilateralAndClifford) {
  const double r2 = std::numbers::sqrt2;
  std::vector<std::array<double, 2>> lam;
  for (int j = 0; j < 3; ++j) {
    const double t = 2.0 * std::numbers::pi * j / 3.0;
    lam.push_back({r2 * std::cos(t), r2 * std::sin(t)});
  }
  const double a = 1.0 / std::sqrt(3.0);
  EXPECT_NO_THROW(make_exp_type({a, a, a}, lam, {0.0, 0.0, 0.0}));
  EXPECT_NO_THROW(make_exp_type({1.0 / r2, 1.0 / r2}, {{r2, 0.0}, {0.0, r2}}, {0.0, 0.0}));
}

TEST(ExpType, NormalizesFrequencyLength) {
  const double r2 = std::numbers::sqrt2;
  const auto s = make_exp_type({1.0 / r2, 1.0 / r2}, {{3.0, 0.0}, {0.0, 3.0}}, {0.0, 0.0});
  EXPECT_NEAR(std::hypot(s.frequencies[0][0], s.frequencies[0][1]), r2, 1e-15);
  const auto g = metric_at(*make_spec(s), 0.3, -0.2);
  EXPECT_NEAR(g[0], 1.0, 1e-14);
  EXPECT_NEAR(g[1], 0.0, 1e-14);
  EXPECT_NEAR(g[2], 1.0, 1e-14);
}

TEST(ExpType, RejectsViolations) {
  const double r2 = std::numbers::sqrt2;
  // Rank-one frequency matrix fails conformality.
  EXPECT_THROW(make_exp_type({1.0, 0.0}, {{r2, 0.0}, {0.0, r2}}, {0.0, 0.0}), ConstraintViolation);
  EXPECT_THROW(make_exp_type({0.9, 0.1}, {{r2, 0.0}, {0.0, r2}}, {0.0, 0.0}), ConstraintViolation);
  EXPECT_THROW(make_exp_type({1.0 / r2, 1.0 / r2}, {{r2, 0.0}, {0.0, 1.0}}, {0.0, 0.0}), ConstraintViolation);
  EXPECT_THROW(make_exp_type({1.0}, {{r2, 0.0}}, {0.0}), ConstraintViolation);
  EXPECT_THROW(make_exp_type({1.0 / r2, 1.0 / r2}, {{r2, 0.0}}, {0.0, 0.0}), ConstraintViolation);
}

TEST(Validators, SphereResidualIsReported) {
  const double r2 = std::numbers::sqrt2;
  const double a = std::sqrt(0.45);
  const SpecPtr s = make_spec(ExpTypeSurface{{a, a}, {{r2, 0.0}, {0.0, r2}}, {0.0, 0.0}});
  EXPECT_NEAR(validate_sphere(*s, kGrid16), 0.1, 1e-14);
}

TEST(Validators, ConformalButNotMinimal) {
  // Amplitudes chosen so that sum a^2 lambda lambda^T is a multiple of the
  // identity while |lambda_1| != |lambda_2|.
  const double l1 = 1.0, l2 = 2.0;
  const double a1 = std::sqrt(l2 * l2 / (l1 * l1 + l2 * l2)), a2 = std::sqrt(l1 * l1 / (l1 * l1 + l2 * l2));
  const SpecPtr s = make_spec(ExpTypeSurface{{a1, a2}, {{l1, 0.0}, {0.0, l2}}, {0.0, 0.0}});
  const auto conf = validate_conformal(*s, kGrid16);
  EXPECT_LT(conf.length_mismatch, 1e-12);
  EXPECT_LT(conf.angle, 1e-12);
  EXPECT_GT(validate_minimal(*s, kGrid16), 0.1);
}

TEST(Validators, MinimalRequiresConformal) {
  const SpecPtr s = make_spec(ExpTypeSurface{{1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2},
                                             {{1.0, 0.0}, {0.0, 2.0}},
                                             {0.0, 0.0}});
  EXPECT_THROW(validate_minimal(*s, kGrid16), NotConformal);
}

TEST(Substantial, EquilateralTorusSpansR6) {
  const auto rep = substantial_check(*make_catalog("equilateral-torus"), 20);
  EXPECT_TRUE(rep.substantial);
  EXPECT_EQ(rep.numeric_rank, 6);
  EXPECT_GT(rep.smallest_singular_value, 1e-3);
}

TEST(Substantial, PlanarCurveHasRankTwo) {
  // (cos x, sin x, 0, 0, 0, 0) written as an exp-type map with empty planes.
  const SpecPtr s = make_spec(ExpTypeSurface{{1.0, 0.0, 0.0}, {{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}, {0.0, 0.0, 0.0}});
  const auto rep = substantial_check(*s, 20);
  EXPECT_FALSE(rep.substantial);
  EXPECT_EQ(rep.numeric_rank, 2);
  EXPECT_EQ(rep.defect_basis.size(), 4u);
}

TEST(Substantial, CatalogDimensions) {
  for (const auto& e : catalog()) {
    const auto rep = substantial_check(*make_catalog(e.name), 24);
    EXPECT_EQ(static_cast<std::size_t>(rep.numeric_rank), e.substantial_dim) << e.name;
  }
}

TEST(Substantial, TooFewSamplesRejected) {
  EXPECT_THROW(substantial_check(*make_catalog("equilateral-torus"), 3), ConstraintViolation);
}

TEST(DirectSum, SingleSummandReproducesBase) {
  const SpecPtr base = make_catalog("equilateral-torus");
  const SpecPtr g = build_direct_sum({1.0}, {0.0}, base);
  for (std::size_t k = 0; k < kGrid16.size(); k += 17) {
    const auto [x, y] = kGrid16.point(k);
    const JetVec a = eval_jet(*g, x, y, 4), b = eval_jet(*base, x, y, 4);
    ASSERT_EQ(a.ambient_dim(), b.ambient_dim());
    for (std::size_t c = 0; c < a.ambient_dim(); ++c)
      for (int d = 0; d <= 4; ++d)
        for (int j = 0; j <= d; ++j) EXPECT_NEAR(a[c].coeff(d - j, j), b[c].coeff(d - j, j), 1e-14);
  }
}

TEST(DirectSum, TwoSummandsAreSubstantialInS11) {
  const SpecPtr g = build_direct_sum({0.6, 0.8}, {0.2, 1.1}, make_catalog("equilateral-torus"));
  EXPECT_EQ(g->ambient_dim(), 12u);
  EXPECT_LT(validate_sphere(*g, kGrid16), 1e-12);
  EXPECT_LT(validate_minimal(*g, kGrid16), 1e-10);
  const auto rep = substantial_check(*g, 40);
  EXPECT_EQ(rep.numeric_rank, 12);
  EXPECT_TRUE(rep.substantial);
}

TEST(Jets, PartialsMatchFiniteDifferences) {
  const double h = 1e-4;
  for (const auto& e : catalog()) {
    const SpecPtr s = make_catalog(e.name);
    for (const auto& [x, y] : std::vector<std::array<double, 2>>{{0.1, -0.3}, {-0.7, 0.4}}) {
      const JetVec jv = eval_jet(*s, x, y, 2);
      const auto p = eval_point(*s, x, y);
      const auto px = eval_point(*s, x + h, y), mx = eval_point(*s, x - h, y);
      const auto py = eval_point(*s, x, y + h), my = eval_point(*s, x, y - h);
      const auto pp = eval_point(*s, x + h, y + h), pm = eval_point(*s, x + h, y - h);
      const auto mp = eval_point(*s, x - h, y + h), mm = eval_point(*s, x - h, y - h);
      for (std::size_t c = 0; c < p.size(); ++c) {
        EXPECT_NEAR(jv[c].partial(1, 0), (px[c] - mx[c]) / (2 * h), 1e-6) << e.name;
        EXPECT_NEAR(jv[c].partial(0, 1), (py[c] - my[c]) / (2 * h), 1e-6) << e.name;
        EXPECT_NEAR(jv[c].partial(2, 0), (px[c] - 2 * p[c] + mx[c]) / (h * h), 1e-6) << e.name;
        EXPECT_NEAR(jv[c].partial(0, 2), (py[c] - 2 * p[c] + my[c]) / (h * h), 1e-6) << e.name;
        EXPECT_NEAR(jv[c].partial(1, 1), (pp[c] - pm[c] - mp[c] + mm[c]) / (4 * h * h), 1e-6) << e.name;
      }
    }
  }
}

TEST(Jets, OrderBoundsEnforced) {
  const SpecPtr s = make_catalog("veronese");
  EXPECT_THROW(eval_jet(*s, 0.0, 0.0, kMaxJetOrder + 1), OrderExceeded);
  EXPECT_THROW(eval_jet(*s, 0.0, 0.0, -1), OrderExceeded);
}

TEST(AssociatedFamily, IsometricToBase) {
  const SpecPtr base = make_catalog("equilateral-torus");
  for (double phi : {0.3, std::numbers::pi / 3, 2.0}) {
    const SpecPtr member = associated_family(base, phi);
    EXPECT_LT(validate_sphere(*member, kGrid16), 1e-12);
    EXPECT_LT(validate_minimal(*member, kGrid16), 1e-10);
    for (std::size_t k = 0; k < kGrid16.size(); k += 7) {
      const auto [x, y] = kGrid16.point(k);
      const auto g0 = metric_at(*base, x, y), g1 = metric_at(*member, x, y);
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(g0[i], g1[i], 1e-12);
    }
  }
}

TEST(AssociatedFamily, ChartRotationIsIsometric) {
  const SpecPtr base = make_catalog("veronese");
  const SpecPtr rotated = std::make_shared<const ImmersionSpec>(ImmersionSpec{AssociatedSurface{base, 0.8, 1}, "r"});
  // A rotation about the origin maps (x, y) to R(x, y); the metric is pulled
  // back by a rotation and F only depends on the image point.
  const auto R = detail::rotation(0.8);
  for (const auto& [x, y] : std::vector<std::array<double, 2>>{{0.2, 0.1}, {-0.4, 0.5}}) {
    const auto g1 = metric_at(*rotated, x, y);
    const auto g0 = metric_at(*base, R[0] * x + R[1] * y, R[2] * x + R[3] * y);
    EXPECT_NEAR(g1[0], g0[0], 1e-12);
    EXPECT_NEAR(g1[1], 0.0, 1e-12);
    EXPECT_NEAR(g1[2], g0[2], 1e-12);
  }
}

TEST(AssociatedFamily, IdentityMemberAndUnsupportedKinds) {
  const SpecPtr base = make_catalog("equilateral-torus");
  EXPECT_EQ(associated_family(base, 0.0), base);
  EXPECT_THROW(associated_family(make_catalog("veronese"), 0.5), UnsupportedKind);
}
