#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "wcslab/errors.hpp"
#include "wcslab/kahler.hpp"
#include "wcslab/sasaki.hpp"

using namespace wcslab;

namespace {

std::vector<KahlerSurface> catalog_bases() {
  std::vector<KahlerSurface> v = {flat_torus(), cp2_fubini_study()};
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) v.push_back(product_cp1(a, b));
  return v;
}

}  // namespace

TEST(Lift, MatchesSymmetryClosureOracle) {
  for (const auto& base : catalog_bases()) {
    for (int k : {-2, 0, 1, 3}) {
      const SasakiLift lift = lift_curvature(base, k);
      const auto table = oracle::lift_by_closure([&](int x, int y, int z, int w) { return base.curvature(x, y, z, w); },
                                                 [&](int a, int b) { return base.J.pairing(a, b); }, k);
      ASSERT_EQ(table.size(), 625u);
      for (const auto& [i, v] : table) {
        EXPECT_NEAR(lift.curvature5(i[0], i[1], i[2], i[3]), v, 1e-14)
            << base.name << " k=" << k << " at " << i[0] << i[1] << i[2] << i[3];
      }
    }
  }
}

TEST(Lift, IdentitiesHoldForEveryCatalogBase) {
  for (const auto& base : catalog_bases())
    for (int k = -3; k <= 3; ++k) {
      const SasakiLift lift = lift_curvature(base, k);
      EXPECT_LE(symmetry_violation(lift.curvature5).max(), 1e-12) << base.name << " " << k;
    }
}

TEST(Lift, VerticalSectionalCurvatureIsKSquared) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  const SasakiLift lift = lift_curvature(cp2_fubini_study(), 3);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x = Vector::Zero(5);
    for (int i = 1; i < 5; ++i) x(i) = normal(rng);
    x.normalize();
    const Vector xi = Vector::Unit(5, kVertical);
    // K(xi, X) = R(xi, X, X, xi)
    const double k = (endomorphism_of_pair(lift.curvature5, xi, x) * x).dot(xi);
    EXPECT_NEAR(k, 9.0, 1e-12);
  }
}

TEST(Lift, EvenInKAndReducesToBaseAtZero) {
  const KahlerSurface base = product_cp1(2, 3);
  EXPECT_EQ(lift_curvature(base, 2).curvature5, lift_curvature(base, -2).curvature5);
  const SasakiLift flat = lift_curvature(base, 0);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z)
        for (int w = 0; w < 4; ++w) EXPECT_EQ(flat.curvature5(x + 1, y + 1, z + 1, w + 1), base.curvature(x, y, z, w));
}

TEST(Lift, TotalVolumeIsFiberTimesBase) {
  const SasakiLift lift = lift_curvature(cp2_fubini_study(), 1);
  EXPECT_NEAR(lift.total_volume, 2.0 * std::numbers::pi * cp2_fubini_study().volume, 1e-12);
  EXPECT_DOUBLE_EQ(total_volume(lift), lift.total_volume);
}

TEST(Lift, RefusesBoundsOnlyBase) {
  EXPECT_THROW((void)lift_curvature(generic_bounds(-16, 1.0, 1.0), 1), UnsupportedOperation);
}
