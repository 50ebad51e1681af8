// One PASS/FAIL line per acceptance criterion. Exit status 0 iff every line passes.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wcslab/kahler.hpp"
#include "wcslab/leading_order.hpp"
#include "wcslab/psdo.hpp"
#include "wcslab/sasaki.hpp"
#include "wcslab/wcs.hpp"

using namespace wcslab;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-34s %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::vector<KahlerSurface> catalog_bases() {
  std::vector<KahlerSurface> v = {flat_torus(), cp2_fubini_study()};
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) v.push_back(product_cp1(a, b));
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void flat_torus_exactness() {
  double worst = 0.0;
  bool verdicts = true;
  for (int k = -5; k <= 5; ++k) {
    const double expect = 6.4 * std::pow(k, 6);
    const double got = density_closed_form(lift_curvature(flat_torus(), k));
    worst = std::max(worst, expect == 0.0 ? std::abs(got) : std::abs(got - expect) / expect);
    verdicts = verdicts && decide_pi1(flat_torus(), k).verdict == (k == 0 ? Verdict::Inconclusive : Verdict::InfiniteOrder);
  }
  report(1, "flat torus exactness", worst <= 1e-12 && verdicts, "max rel err " + fmt(worst));
}

void cp2_calibration() {
  double at_unit = 0.0;
  double smallest = 1e300;
  for (int k : {-1, 0, 1}) at_unit = std::max(at_unit, std::abs(density_closed_form(lift_curvature(cp2_fubini_study(), k))));
  for (int k = 2; k <= 5; ++k)
    for (int s : {-1, 1}) smallest = std::min(smallest, std::abs(density_closed_form(lift_curvature(cp2_fubini_study(), s * k))));
  report(2, "CP2 calibration", at_unit <= 1e-9 && smallest >= 1e-3,
         "|f| at k=0,+-1: " + fmt(at_unit) + ", min |f| for 2<=|k|<=5: " + fmt(smallest));
}

void cp1xcp1() {
  bool ok = true;
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b)
      for (int k : {-2, -1, 1, 2}) {
        const Pi1Verdict v = decide_pi1(product_cp1(a, b), k);
        ok = ok && v.integral && *v.integral != 0.0 && v.verdict == Verdict::InfiniteOrder;
      }
  report(3, "CP1xCP1 nonvanishing", ok, "36 cases");
}

void cross_route() {
  double worst = 0.0;
  for (const auto& base : catalog_bases())
    for (int k = -3; k <= 3; ++k) worst = std::max(worst, evaluate_density(lift_curvature(base, k)).route_agreement);
  const double c1 = calibration_constant();
  const double c2 = calibration_constant();
  report(4, "cross-route oracle", worst <= 1e-8 && c1 == c2 && c1 > 0.0,
         "max rel gap " + fmt(worst) + ", calibration constant " + std::to_string(c1));
}

void cs3_vanishing() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Matrix h(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h(i, j) = normal(rng);
    h += h.transpose().eval();
    const RiemannTensor r = RiemannTensor::generate(3, [&](int x, int y, int z, int w) {
      return h(x, w) * h(y, z) - h(x, z) * h(y, w);
    });
    worst = std::max(worst, std::abs(density_permutation(r, OrthonormalFrame::standard(3), Vector::Unit(3, 0))));
  }
  report(5, "CS3 pointwise vanishing", worst <= 1e-12, "max |f| " + fmt(worst));
}

void iterate_scaling() {
  double worst = 0.0;
  for (const auto& base : catalog_bases())
    for (int k = 1; k <= 3; ++k) {
      const SasakiLift lift = lift_curvature(base, k);
      const double one = iterate_value(lift, 1);
      if (one == 0.0) continue;
      for (int n : {2, 3, 5}) worst = std::max(worst, std::abs(iterate_value(lift, n) - n * one) / std::abs(n * one));
    }
  report(6, "iterate scaling", worst <= 1e-12, "max rel err " + fmt(worst));
}

void bound_consistency() {
  bool implication = true;
  int positive = 0;
  for (const auto& base : catalog_bases())
    for (int k = -6; k <= 6; ++k) {
      if (!sufficient_bound(base.signature, base.volume, base.r_inf, k).holds) continue;
      ++positive;
      implication = implication && integral_csw5(lift_curvature(base, k)) > 0.0;
    }
  const bool audit = bracket_abs_coefficient_sum() == 7 && kBoundCurvatureCoefficient == 32.0 * 7.0;
  report(7, "sufficient inequality consistency", implication && audit,
         std::to_string(positive) + " positive bounds, middle coefficient " + fmt(kBoundCurvatureCoefficient) + " = 32*" +
             std::to_string(bracket_abs_coefficient_sum()));
}

void lift_integrity() {
  double worst = 0.0;
  for (const auto& base : catalog_bases())
    for (int k = -3; k <= 3; ++k) worst = std::max(worst, symmetry_violation(lift_curvature(base, k).curvature5).max());
  report(8, "lift integrity", worst <= 1e-12, "max identity violation " + fmt(worst));
}

void residue_trace() {
  namespace ps = psdo;
  const double comm = ps::commutator_trace_test(2024, 200, 6);
  std::mt19937_64 rng(1);
  bool mult_zero = true;
  for (int t = 0; t < 20; ++t) {
    const auto f = ps::random_symbol(rng, ps::Degree(0), 1, 2).components().front().plus;
    mult_zero = mult_zero && ps::wodzicki_residue(ps::ClassicalSymbol::multiplication(f)) == ps::Complex(0.0);
  }
  const auto inv = ps::ClassicalSymbol::homogeneous(ps::Degree(-1), ps::CMatrix::Identity(1, 1), ps::CMatrix::Identity(1, 1),
                                                    ps::kDefaultGrid, false);
  const double gap = std::abs(ps::wodzicki_residue(inv) - 2.0);
  report(9, "residue trace property", comm <= 1e-8 && mult_zero && gap <= 1e-10,
         "max |res[P,Q]| " + fmt(comm) + ", |res(|xi|^-1) - 2| " + fmt(gap));
}

void order_audit() {
  bool ok = true;
  int lifts = 0;
  for (const auto& base : catalog_bases())
    for (int k = -3; k <= 3; ++k) {
      const auto a = psdo::connection_difference_order_audit(lift_curvature(base, k), 4);
      ok = ok && a.passes && a.order0_norm == 0.0;
      for (const auto& t : a.terms) {
        if (k != 0) ok = ok && t.order && (*t.order == psdo::Degree(-1) || *t.order == psdo::Degree(-2));
      }
      ++lifts;
    }
  report(10, "connection difference order audit", ok, std::to_string(lifts) + " lifts");
}

void leading_identity() {
  namespace lo = leading_order;
  const lo::MappedFamily fam(64);
  double worst = 0.0;
  double spread = 0.0;
  for (int q = 0; q <= 3; ++q) {
    const lo::LineBundleCurvature bundle{q};
    const double lhs = lo::c_lo_pairing(fam, bundle);
    const double expect = 2.0 * std::numbers::pi * q;
    worst = std::max(worst, std::abs(lhs - expect) / std::max(1.0, std::abs(expect)));
    const double ref = lo::basepoint_side(fam, bundle, 0);
    for (int i = 1; i < 8; ++i) spread = std::max(spread, std::abs(lo::basepoint_side(fam, bundle, i * 8) - ref));
  }
  report(11, "leading-order class identity", worst <= 1e-6 && spread <= 1e-10,
         "max rel err " + fmt(worst) + ", basepoint spread " + fmt(spread));
}

void k3_bounds_mode() {
  const KahlerSurface k3 = generic_bounds(-16, 1.0, 1.0);
  const bool fails_small = !sufficient_bound(k3.signature, k3.volume, k3.r_inf, 1).holds;
  const std::optional<int> cross = sufficient_bound_crossover(k3.signature, k3.volume, k3.r_inf, 50);
  const bool holds_large = cross.has_value() && sufficient_bound(k3.signature, k3.volume, k3.r_inf, 50).holds;
  report(12, "K3 bounds mode (exact values n/a)", fails_small && holds_large,
         "sigma=-16 vol=1 r_inf=1: crossover k = " + (cross ? std::to_string(*cross) : std::string("none")));
}

}  // namespace

int main() {
  flat_torus_exactness();
  cp2_calibration();
  cp1xcp1();
  cross_route();
  cs3_vanishing();
  iterate_scaling();
  bound_consistency();
  lift_integrity();
  residue_trace();
  order_audit();
  leading_identity();
  k3_bounds_mode();
  std::printf("%d/12 criteria pass\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
