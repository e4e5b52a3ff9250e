#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "gmesp/matrix_bounds.hpp"
#include "gmesp/spectral.hpp"
#include "helpers.hpp"

using namespace gmesp;

namespace {

const MatrixKind kKinds[] = {MatrixKind::Glinx, MatrixKind::GnlpId, MatrixKind::GnlpComp};

Mat sqrt_psd(const Mat& X) {
  const Spectrum sp = sym_eigen(X);
  return sp.vectors * sp.values.cwiseMax(0.0).cwiseSqrt().asDiagonal() * sp.vectors.transpose();
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_SUITE("matrix_bounds") {

TEST_CASE("eval_glinx") {
  const Mat C = fixtures::rational_C();
  CHECK(std::abs(eval_glinx(C, fixtures::rational_x(), fixtures::rational_X()) - fixtures::kRationalPrimal) <= 1e-6);
  CHECK(eval_glinx(C, Vec::Zero(6), Mat::Zero(6, 6)) == doctest::Approx(0.0));
  const Instance inst = random_instance(7, 4, 2, 0, 1);
  const BinarySolution opt = brute_force(inst);
  const RelaxPoint p = binary_to_projector(inst, opt.x);
  for (double g : {0.25, 1.0, 3.0}) CHECK(std::abs(eval_glinx(inst.C, p.x, p.X, g) - opt.value) <= 1e-8);
}

TEST_CASE("companion glinx matches glinx") {
  std::mt19937_64 rng(3);
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Instance inst = random_instance(6, 3, 2, 0, seed);
    const RelaxPoint p = helpers::random_relax_point(inst, rng);
    CHECK(std::abs(eval_companion_glinx(inst.C, p.x, p.X) - eval_glinx(inst.C, p.x, p.X)) <= 1e-8);
  }
  const Mat C = random_covariance(5, 2);
  CHECK(std::abs(eval_companion_glinx(C, Vec::Zero(5), Mat::Zero(5, 5))) <= 1e-10);
  CHECK_THROWS_AS(eval_companion_glinx(fixtures::rational_C(), fixtures::rational_x(), fixtures::rational_X()), Error);
}

TEST_CASE("eval_gnlp") {
  const Mat C = random_covariance(6, 7);
  const Vec lam = sym_eigenvalues(C);
  CHECK(std::abs(eval_gnlp(C, Vec::Zero(6), Mat::Zero(6, 6), MatrixKind::GnlpId, 3) - 3 * std::log(lam(0))) <= 1e-10);
  CHECK(std::abs(eval_gnlp(C, Vec::Zero(6), Mat::Zero(6, 6), MatrixKind::GnlpComp, 3) - 3 * std::log(lam(5))) <= 1e-10);
}

TEST_CASE("GNLP values match a square-root formulation") {
  std::mt19937_64 rng(5);
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Instance inst = random_instance(6, 3, 2, 0, seed);
    const RelaxPoint p = helpers::random_relax_point(inst, rng);
    const Vec lam = sym_eigenvalues(inst.C);
    const Mat R = sqrt_psd(p.X);
    const Mat I = Mat::Identity(6, 6);
    const double id = ldet_psd(I - R * (I - inst.C / lam(0)) * R) + inst.t * std::log(lam(0));
    const double comp = ldet_psd(I + R * (inst.C / lam(5) - I) * R) + inst.t * std::log(lam(5));
    CHECK(std::abs(eval_gnlp(inst.C, p.x, p.X, MatrixKind::GnlpId, inst.t) - id) <= 1e-8);
    CHECK(std::abs(eval_gnlp(inst.C, p.x, p.X, MatrixKind::GnlpComp, inst.t) - comp) <= 1e-8);
  }
}

TEST_CASE("all relaxations are exact on lifted binary points") {
  std::mt19937_64 rng(2);
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Instance inst = random_instance(7, 4, 1 + seed % 4, 0, seed);
    const Vec xb = helpers::random_feasible_binary(inst, rng);
    const RelaxPoint p = binary_to_projector(inst, xb);
    const double v = top_t_logdet(inst.C, support_of(xb), inst.t);
    CHECK(std::abs(eval_glinx(inst.C, p.x, p.X) - v) <= 1e-7);
    CHECK(std::abs(eval_companion_glinx(inst.C, p.x, p.X) - v) <= 1e-7);
    CHECK(std::abs(eval_gnlp(inst.C, p.x, p.X, MatrixKind::GnlpId, inst.t) - v) <= 1e-7);
    CHECK(std::abs(eval_gnlp(inst.C, p.x, p.X, MatrixKind::GnlpComp, inst.t) - v) <= 1e-7);
  }
}

TEST_CASE("g-scaled glinx") {
  Mat C(3, 3);
  const Vec v = vec3(1, -1, 1);
  C = v * v.transpose();
  const Vec w = vec3(1, 1, 0) / std::sqrt(2.0);
  const Mat X = w * w.transpose();
  const Vec x = vec3(1, 1, 0);
  const double e2 = std::exp(2.0);
  const double f = eval_gscaled_glinx(C, x, X, vec3(e2, 1, 1));
  CHECK(std::abs(f - (2 * std::log(e2 - 1) - 2 - std::log(2.0))) <= 1e-12);
  CHECK(std::abs(f - 1.0160) <= 1e-4);
  const double f1 = eval_gscaled_glinx(C, x, X, vec3(std::exp(1.0), 1, 1));
  const double f3 = eval_gscaled_glinx(C, x, X, vec3(std::exp(3.0), 1, 1));
  CHECK(std::abs(0.5 * (f1 + f3) - 0.7971) <= 1e-4);
  CHECK(f - 0.5 * (f1 + f3) > 0.0);

  std::mt19937_64 rng(1);
  const Instance inst = random_instance(6, 3, 2, 0, 4);
  const RelaxPoint p = helpers::random_relax_point(inst, rng);
  CHECK(std::abs(eval_gscaled_glinx(inst.C, p.x, p.X, Vec::Ones(6)) - eval_glinx(inst.C, p.x, p.X)) <= 1e-12);
  const double g = 0.3;
  CHECK(std::abs(eval_gscaled_glinx(inst.C, p.x, p.X, Vec::Constant(6, std::pow(g, 0.25))) -
                 eval_glinx(inst.C, p.x, p.X, g)) <= 1e-10);
}

TEST_CASE("g-scaled glinx gradient against finite differences") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  for (unsigned seed = 0; seed < 10; ++seed) {
    const Instance inst = random_instance(6, 3, 2, 0, seed);
    const RelaxPoint p = helpers::random_relax_point(inst, rng);
    Vec logu(6);
    for (int i = 0; i < 6; ++i) logu(i) = unif(rng);
    const Vec g = gscaled_glinx_gradient(inst.C, p.X, logu.array().exp().matrix());
    const double h = 1e-5;
    for (int i = 0; i < 6; ++i) {
      Vec a = logu, b = logu;
      a(i) += h;
      b(i) -= h;
      const double fd = (eval_gscaled_glinx(inst.C, p.x, p.X, a.array().exp().matrix()) -
                         eval_gscaled_glinx(inst.C, p.x, p.X, b.array().exp().matrix())) /
                        (2 * h);
      CHECK(std::abs(fd - g(i)) <= 1e-4);
    }
  }
}

TEST_CASE("solve_relaxation on the rational instance") {
  const Instance inst = fixtures::rational_instance();
  const RelaxResult hat = solve_relaxation(inst, MatrixKind::Glinx, RegionSpec::no_soc());
  CHECK(hat.report.primal >= 11.80435);
  CHECK(hat.report.certificate_ok);
  CHECK(hat.report.certified >= hat.report.primal - 1e-7);
  CHECK(hat.report.certified - hat.report.primal <= 1e-6);
  const RelaxResult full = solve_relaxation(inst, MatrixKind::Glinx, RegionSpec::full());
  CHECK(full.report.certified <= 11.80436 + 1e-4);
  CHECK(full.report.certified >= fixtures::kRationalOptimum);
  CHECK(check_dual(inst, full.dual).ok);
}

TEST_CASE("t = s forces X onto Diag(x)") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Instance inst = random_instance(6, 3, 3, 0, seed);
    const RelaxResult r = solve_relaxation(inst, MatrixKind::Glinx, RegionSpec::no_soc());
    CHECK((r.point.X - Mat(r.point.x.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("Example 7.1 reduced and constrained bounds") {
  const Instance inst = make_instance(fixtures::branching3_C(), 2, 1);
  const Instance reduced = reduce(inst, {0});
  Instance constrained = inst;
  constrained.c(0) = 0.0;
  const double expect[3][2] = {{1.148, 1.322}, {0.962, 1.058}, {1.545, 1.636}};
  for (int k = 0; k < 3; ++k) {
    const RelaxResult r = solve_relaxation(reduced, kKinds[k], RegionSpec::full());
    const RelaxResult c = solve_relaxation(constrained, kKinds[k], RegionSpec::full());
    CHECK(std::abs(r.report.certified - expect[k][0]) <= 1e-3);
    CHECK(std::abs(c.report.certified - expect[k][1]) <= 1e-3);
  }
}

TEST_CASE("given dual point of the rational instance") {
  const Instance inst = fixtures::rational_instance();
  const DualCheck chk = check_dual(inst, fixtures::rational_dual());
  CHECK(chk.ok);
  CHECK(chk.max_residual <= 1e-6);
  CHECK(std::abs(chk.objective - fixtures::kRationalDual) <= 1e-6);
  MatrixDualPoint bad = fixtures::rational_dual();
  bad.nu(0) = -0.5;
  const DualCheck fail = check_dual(inst, bad);
  CHECK_FALSE(fail.ok);
}

TEST_CASE("certificate on the identity instance") {
  const Instance inst = make_instance(Mat::Identity(6, 6), 3, 2);
  RelaxPoint p{Vec::Constant(6, 0.5), Mat::Identity(6, 6) * (2.0 / 6.0)};
  for (MatrixKind k : {MatrixKind::Glinx}) {
    const MatrixDualPoint d = certify(inst, k, RegionSpec::no_soc(), p);
    CHECK(d.objective >= -1e-12);
    CHECK(check_dual(inst, d).ok);
  }
}

TEST_CASE("certify recomputes a consistent objective") {
  std::mt19937_64 rng(7);
  for (unsigned seed = 0; seed < 10; ++seed) {
    const Instance inst = random_instance(6, 3, 2, seed % 2 ? 2 : 0, seed);
    const RelaxPoint p = helpers::random_relax_point(inst, rng);
    for (MatrixKind k : kKinds)
      for (const RegionSpec& reg : {RegionSpec::no_soc(), RegionSpec::full(), RegionSpec::identity_cap()}) {
        const MatrixDualPoint d = certify(inst, k, reg, p);
        const DualCheck chk = check_dual(inst, d);
        CHECK(chk.ok);
        CHECK(std::abs(chk.objective - d.objective) <= 1e-9 * (1.0 + std::abs(d.objective)));
        CHECK(std::abs(dual_objective(inst, d) - d.objective) <= 1e-9 * (1.0 + std::abs(d.objective)));
      }
  }
}

TEST_CASE("o-scaling at the spectral gamma is no worse than spectral") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Instance inst = random_instance(8, 4, 2, 0, seed);
    ScalingState sc;
    sc.gamma = std::exp(default_psi(inst));
    const RelaxResult r = solve_relaxation(inst, MatrixKind::Glinx, RegionSpec::no_soc(), sc);
    CHECK(r.report.certified <= spectral_bound(inst.C, inst.t) + 1e-6);
    const GammaSearch gs = optimize_gamma(inst, RegionSpec::no_soc(), default_psi(inst));
    CHECK(gs.report.certified <= r.report.certified + 1e-8);
  }
}

TEST_CASE("optimize_upsilon_glinx is no worse than o-scaling") {
  const Instance inst = fixtures::rational_instance();
  const GammaSearch gs = optimize_gamma(inst, RegionSpec::no_soc(), default_psi(inst));
  const UpsilonSearch us =
      optimize_upsilon_glinx(inst, RegionSpec::no_soc(), Vec::Constant(6, std::pow(gs.gamma, 0.25)));
  CHECK(us.report.certified <= gs.report.certified + 1e-8);
  CHECK(us.report.certified >= fixtures::kRationalOptimum);
  for (std::size_t k = 1; k < us.best_trace.size(); ++k) CHECK(us.best_trace[k] <= us.best_trace[k - 1]);
}

TEST_CASE("matrix fixings") {
  const Instance inst = random_instance(8, 4, 2, 0, 3);
  const RelaxResult r = solve_relaxation(inst, MatrixKind::Glinx, RegionSpec::no_soc());
  const Fixings all = fix_variables(r.dual, r.dual.objective);
  for (int j = 0; j < 8; ++j) {
    const bool f0 = std::find(all.F0.begin(), all.F0.end(), j) != all.F0.end();
    const bool f1 = std::find(all.F1.begin(), all.F1.end(), j) != all.F1.end();
    CHECK(f0 == (r.dual.upsilon(j) > 1e-9));
    CHECK(f1 == (r.dual.nu(j) > 1e-9 && !(r.dual.upsilon(j) > 1e-9)));
  }
  const Fixings none = fix_variables(Vec::Zero(8), Vec::Zero(8), 1.0, 1.0);
  CHECK(none.F0.empty());
  CHECK(none.F1.empty());
}

TEST_CASE("soc_gap_bound") {
  CHECK(std::abs(soc_gap_bound(Mat::Identity(6, 6), 3, 2)) <= 1e-14);
  const double ab = soc_gap_bound(fixtures::rational_C(), 4, 3);
  CHECK(std::isfinite(ab));
  CHECK(ab > 0.0);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Mat C = random_covariance(10, seed);
    double prev = soc_gap_bound(C, 2, 2);
    for (int s = 3; s <= 9; ++s) {
      const double cur = soc_gap_bound(C, s, 2);
      CHECK(cur <= prev + 1e-15);
      prev = cur;
    }
  }
}

TEST_CASE("region parsing") {
  CHECK(parse_region("full").soc_rows);
  CHECK_FALSE(parse_region("no-soc").soc_rows);
  CHECK(parse_region("identity-cap").upper == UpperBound::Identity);
  CHECK(parse_region("identity-cap").name() == "identity-cap");
  CHECK_THROWS(parse_region("nope"));
}

}
