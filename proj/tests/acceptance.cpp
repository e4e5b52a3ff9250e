#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gmesp/bnb.hpp"
#include "gmesp/bounds.hpp"
#include "gmesp/fact_bounds.hpp"
#include "gmesp/io.hpp"
#include "gmesp/matrix_bounds.hpp"
#include "gmesp/spectral.hpp"
#include "helpers.hpp"

using namespace gmesp;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

const MatrixKind kKinds[] = {MatrixKind::Glinx, MatrixKind::GnlpId, MatrixKind::GnlpComp};

Outcome c1_primal_fixture() {
  Outcome o;
  const auto t0 = Clock::now();
  const Instance inst = read_instance(std::string(GMESP_DATA_DIR) + "/rational6.json");
  const RelaxPoint p = parse_relax_point(read_file(std::string(GMESP_DATA_DIR) + "/rational6_point.json"), 6);
  const double v = eval_glinx(inst.C, p.x, p.X, 1.0);
  const double secs = since(t0);
  o.require(std::abs(v - 11.80439587) <= 1e-6, "value " + fmt("%.10f", v));
  o.require(secs < 1.0, "runtime " + fmt("%.3f", secs));
  o.note("value " + fmt("%.10f", v) + ", " + fmt("%.4f", secs) + " s");
  return o;
}

Outcome c2_dual_fixture() {
  Outcome o;
  const Instance inst = read_instance(std::string(GMESP_DATA_DIR) + "/rational6.json");
  const MatrixDualPoint d = parse_matrix_dual(read_file(std::string(GMESP_DATA_DIR) + "/rational6_dual.json"), 6);
  const DualCheck chk = check_dual(inst, d, {}, 1e-6);
  o.require(chk.ok && chk.max_residual <= 1e-6, "residual " + chk.worst + " " + fmt("%.3g", chk.max_residual));
  o.require(std::abs(chk.objective - 11.80435231) <= 1e-6, "objective " + fmt("%.10f", chk.objective));
  o.note("objective " + fmt("%.10f", chk.objective) + ", max residual " + fmt("%.2e", chk.max_residual));
  return o;
}

Outcome c3_rational_solve() {
  Outcome o;
  const Instance inst = fixtures::rational_instance();
  const RelaxResult hat = solve_relaxation(inst, MatrixKind::Glinx, RegionSpec::no_soc());
  const RelaxResult full = solve_relaxation(inst, MatrixKind::Glinx, RegionSpec::full());
  o.require(hat.report.primal >= 11.80435, "no-soc primal " + fmt("%.8f", hat.report.primal));
  o.require(hat.report.certified <= 11.80444, "no-soc certified " + fmt("%.8f", hat.report.certified) + " > 11.80444");
  o.require(full.report.certificate_ok && full.report.certified <= 11.80436 + 1e-4,
            "full certified " + fmt("%.8f", full.report.certified));
  const double gap = hat.report.primal - full.report.certified;
  o.require(gap >= 3e-5, "soc gap " + fmt("%.3g", gap));
  o.note("no-soc primal " + fmt("%.8f", hat.report.primal) + " certified " + fmt("%.8f", hat.report.certified) +
         ", full certified " + fmt("%.8f", full.report.certified) + ", soc gap " + fmt("%.2e", gap));
  return o;
}

Outcome c4_branching3() {
  Outcome o;
  const Instance inst = make_instance(fixtures::branching3_C(), 2, 1);
  const Instance reduced = reduce(inst, {0});
  Instance constrained = inst;
  constrained.c(0) = 0.0;
  const double expect[3][2] = {{1.148, 1.322}, {0.962, 1.058}, {1.545, 1.636}};
  for (int k = 0; k < 3; ++k) {
    const double r = solve_relaxation(reduced, kKinds[k], RegionSpec::full()).report.certified;
    const double c = solve_relaxation(constrained, kKinds[k], RegionSpec::full()).report.certified;
    o.require(std::abs(r - expect[k][0]) <= 1e-3, std::string(to_string(kKinds[k])) + " reduced " + fmt("%.6f", r));
    o.require(std::abs(c - expect[k][1]) <= 1e-3,
              std::string(to_string(kKinds[k])) + " constrained " + fmt("%.6f", c));
    o.note(std::string(to_string(kKinds[k])) + " " + fmt("%.4f", r) + "/" + fmt("%.4f", c));
  }
  return o;
}

Outcome c5_gscaled_example() {
  Outcome o;
  Vec v(3), w(3), x(3);
  v << 1, -1, 1;
  w << 1, 1, 0;
  w /= std::sqrt(2.0);
  x << 1, 1, 0;
  const Mat C = v * v.transpose();
  const Mat X = w * w.transpose();
  auto f = [&](double psi1) {
    Vec ups = Vec::Ones(3);
    ups(0) = std::exp(psi1);
    return eval_gscaled_glinx(C, x, X, ups);
  };
  const double mid = f(2.0);
  const double avg = 0.5 * (f(1.0) + f(3.0));
  o.require(std::abs(mid - 1.0160) <= 1e-4, "midpoint value " + fmt("%.6f", mid));
  o.require(std::abs(avg - 0.7971) <= 1e-4, "average " + fmt("%.6f", avg));
  o.require(mid - avg > 0.0, "violation " + fmt("%.6f", mid - avg));
  o.note("h(mid) " + fmt("%.6f", mid) + ", average " + fmt("%.6f", avg) + ", violation " + fmt("%.6f", mid - avg));
  return o;
}

Outcome c6_oracle_suite() {
  Outcome o;
  const auto t0 = Clock::now();
  const BoundKind bnb_kinds[] = {BoundKind::Glinx, BoundKind::DDGFact, BoundKind::GnlpId, BoundKind::GnlpComp,
                                 BoundKind::Spectral};
  int bounds_checked = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_name;
  for (unsigned k = 0; k < 50; ++k) {
    const int n = 5 + static_cast<int>(k % 4);
    const int s = 2 + static_cast<int>(k % (n - 2));
    const int t = 1 + static_cast<int>(k % (s - 1));
    const int m = k % 2 ? 2 : 0;
    const Instance inst = random_instance(n, s, t, m, 1000 + k);
    const double opt = brute_force(inst).value;
    auto check = [&](const std::string& name, const BoundReport& r) {
      ++bounds_checked;
      const double slack = r.certified - opt;
      if (slack < worst) {
        worst = slack;
        worst_name = name;
      }
      o.require(r.certified >= opt - 1e-8, "instance " + std::to_string(k) + " " + name + " slack " + fmt("%.3g", slack));
    };
    for (BoundKind b : {BoundKind::Spectral, BoundKind::LagrangianSpectral, BoundKind::DDGFact, BoundKind::GnlpId,
                        BoundKind::GnlpComp})
      check(to_string(b), compute_bound(inst, b));
    for (const RegionSpec& reg : {RegionSpec::no_soc(), RegionSpec::full(), RegionSpec::identity_cap()}) {
      BoundOptions bo;
      bo.region = reg;
      check("glinx/" + reg.name(), compute_bound(inst, BoundKind::Glinx, bo));
    }
    BoundOptions so;
    so.scale = ScaleMode::O;
    check("glinx/o", compute_bound(inst, BoundKind::Glinx, so));
    so.scale = ScaleMode::G;
    check("glinx/g", compute_bound(inst, BoundKind::Glinx, so));
    check("ddgfact/g", compute_bound(inst, BoundKind::DDGFact, so));

    BnbOptions bo;
    bo.kind = bnb_kinds[k % 5];
    const BnbResult r = solve_bnb(inst, bo);
    o.require(r.stats.optimal && std::abs(r.best.value - opt) <= 1e-9,
              "bnb instance " + std::to_string(k) + " " + fmt("%.10f", r.best.value) + " vs " + fmt("%.10f", opt));
  }
  const double secs = since(t0);
  o.require(secs < 300.0, "runtime " + fmt("%.1f", secs));
  o.note(std::to_string(bounds_checked) + " bounds on 50 instances, min slack " + fmt("%.3g", worst) + " (" +
         worst_name + "), bnb exact on 50, " + fmt("%.1f", secs) + " s");
  return o;
}

Outcome c7_dominance() {
  Outcome o;
  std::mt19937_64 rng(77);
  int counts[6] = {0, 0, 0, 0, 0, 0};
  for (unsigned k = 0; k < 20; ++k) {
    const int n = 6 + static_cast<int>(k % 4);
    const int s = 3 + static_cast<int>(k % 3);
    const int t = 1 + static_cast<int>(k % s);
    const Instance inst = random_instance(n, s, t, 0, 2000 + k);
    const double spec = spectral_bound(inst.C, t);

    BoundOptions bo;
    bo.gamma = std::exp(default_psi(inst));
    const double g = compute_bound(inst, BoundKind::Glinx, bo).certified;
    o.require(g <= spec + 1e-6, "glinx at spectral gamma " + fmt("%.8f", g) + " > " + fmt("%.8f", spec));
    ++counts[0];

    const double f = compute_bound(inst, BoundKind::DDGFact).certified;
    o.require(f - spec <= t * std::log(double(s) / t) + 1e-8, "ddgfact - spectral " + fmt("%.8f", f - spec));
    ++counts[1];
  }
  for (unsigned k = 0; k < 20; ++k) {
    const int n = 6 + static_cast<int>(k % 3);
    const int s = 3 + static_cast<int>(k % 2);
    const int t = 1 + static_cast<int>(k % 2);
    const int mult = static_cast<int>(std::ceil(double(n) * t / s));
    Instance inst = make_instance(helpers::top_multiplicity(n, mult, rng), s, t);
    const FactResult f = ddgfact_bound(inst);
    const double spec = spectral_bound(inst.C, t);
    o.require(spec <= f.report.primal + 1e-6, "spectral " + fmt("%.8f", spec) + " > ddgfact " + fmt("%.8f", f.report.primal));
    ++counts[2];
  }
  for (unsigned k = 0; k < 20; ++k) {
    const int n = 6 + static_cast<int>(k % 3);
    const int s = 3 + static_cast<int>(k % 2);
    const int t = 1 + static_cast<int>(k % 2);
    const Instance hi = make_instance(helpers::top_multiplicity(n, t, rng), s, t);
    const double g1 = compute_bound(hi, BoundKind::GnlpId).certified;
    o.require(g1 <= spectral_bound(hi.C, t) + 1e-6, "gnlp-id " + fmt("%.8f", g1));
    ++counts[3];
    const Instance lo = make_instance(helpers::bottom_multiplicity(n, n - t, rng), s, t);
    const double g2 = compute_bound(lo, BoundKind::GnlpComp).certified;
    o.require(g2 <= spectral_bound(lo.C, t) + 1e-6, "gnlp-comp " + fmt("%.8f", g2));
    ++counts[4];
  }
  for (unsigned k = 0; k < 20; ++k) {
    const Instance inst = random_instance(6 + static_cast<int>(k % 3), 3, 1 + static_cast<int>(k % 3), 0, 3000 + k);
    const int j = static_cast<int>(k % static_cast<unsigned>(inst.n()));
    const Instance red = reduce(inst, {j});
    Instance con = inst;
    con.c(j) = 0.0;
    for (MatrixKind mk : kKinds) {
      const double r = solve_relaxation(red, mk, RegionSpec::no_soc()).report.primal;
      const double c = solve_relaxation(con, mk, RegionSpec::no_soc()).report.primal;
      o.require(r <= c + 1e-6, std::string(to_string(mk)) + " reduced " + fmt("%.8f", r) + " > " + fmt("%.8f", c));
    }
    ++counts[5];
  }
  o.note("instances per suite: " + std::to_string(counts[0]) + " glinx-vs-spectral, " + std::to_string(counts[1]) +
         " ddgfact-spectral gap, " + std::to_string(counts[2]) + " high multiplicity, " + std::to_string(counts[3]) +
         " gnlp-id, " + std::to_string(counts[4]) + " gnlp-comp, " + std::to_string(counts[5]) + " down-branching");
  return o;
}

Outcome c8_kronecker() {
  Outcome o;
  const Instance inst = fixtures::rational_instance();
  struct Item {
    std::string name;
    BoundKind kind;
    RegionSpec region;
  };
  const std::vector<Item> items = {{"spectral", BoundKind::Spectral, RegionSpec::no_soc()},
                                   {"lagrangian-spectral", BoundKind::LagrangianSpectral, RegionSpec::no_soc()},
                                   {"ddgfact", BoundKind::DDGFact, RegionSpec::no_soc()},
                                   {"glinx/no-soc", BoundKind::Glinx, RegionSpec::no_soc()},
                                   {"glinx/full", BoundKind::Glinx, RegionSpec::full()},
                                   {"gnlp-id", BoundKind::GnlpId, RegionSpec::no_soc()}};
  double worst = 0.0;
  for (const Item& it : items) {
    BoundOptions bo;
    bo.region = it.region;
    const double base = compute_bound(inst, it.kind, bo).certified;
    for (int k : {2, 3}) {
      const double lifted = compute_bound(kron_lift(inst, k), it.kind, bo).certified;
      const double rel = std::abs(lifted - k * base) / std::abs(k * base);
      worst = std::max(worst, rel);
      o.require(rel <= 1e-4, it.name + " k=" + std::to_string(k) + " relative " + fmt("%.3g", rel));
    }
  }
  o.note("max relative deviation " + fmt("%.2e", worst) + " over 6 bounds; gnlp-comp needs C positive definite (rank 3)");
  return o;
}

Outcome c9_oscaling() {
  Outcome o;
  double worst_convex = -1.0, worst_deriv = 0.0;
  for (unsigned k = 0; k < 10; ++k) {
    const Instance inst = random_instance(6 + static_cast<int>(k % 3), 3, 1 + static_cast<int>(k % 3), 0, 4000 + k);
    auto h = [&](double psi) {
      ScalingState sc;
      sc.gamma = std::exp(psi);
      return solve_relaxation(inst, MatrixKind::Glinx, RegionSpec::no_soc(), sc);
    };
    const double psi0 = default_psi(inst);
    std::array<double, 5> vals{};
    for (int i = 0; i < 5; ++i) vals[static_cast<std::size_t>(i)] = h(psi0 + 0.5 * (i - 2)).report.primal;
    for (int step = 1; step <= 2; ++step)
      for (int i = step; i + step < 5; ++i) {
        const double excess = vals[static_cast<std::size_t>(i)] -
                              0.5 * (vals[static_cast<std::size_t>(i - step)] + vals[static_cast<std::size_t>(i + step)]);
        worst_convex = std::max(worst_convex, excess);
        o.require(excess <= 1e-7, "instance " + std::to_string(k) + " midpoint excess " + fmt("%.3g", excess));
      }
    const RelaxResult at = h(psi0);
    const double analytic = glinx_dh_dpsi(inst.C, at.point.X, std::exp(psi0));
    const double d = 1e-3;
    const double fd = (h(psi0 + d).report.primal - h(psi0 - d).report.primal) / (2 * d);
    worst_deriv = std::max(worst_deriv, std::abs(fd - analytic));
    o.require(std::abs(fd - analytic) <= 1e-4, "instance " + std::to_string(k) + " derivative " + fmt("%.6f", analytic) +
                                                   " vs " + fmt("%.6f", fd));
  }
  o.note("max midpoint excess " + fmt("%.2e", worst_convex) + ", max derivative error " + fmt("%.2e", worst_deriv));
  return o;
}

Outcome c10_gscaling() {
  Outcome o;
  double worst_grad = 0.0;
  for (unsigned k = 0; k < 5; ++k) {
    const Instance inst = random_instance(8, 4, 1 + static_cast<int>(k % 3), 0, 5000 + k);
    const FactUpsilonSearch r = optimize_upsilon_fact(inst, Vec::Ones(8));
    const double g = r.last_gradient.cwiseAbs().maxCoeff();
    worst_grad = std::max(worst_grad, g);
    o.require(r.outer_iterations == 0 && g <= 1e-6,
              "instance " + std::to_string(k) + " iterations " + std::to_string(r.outer_iterations) + " gradient " +
                  fmt("%.3g", g));
  }
  o.note("unit start: max gradient " + fmt("%.2e", worst_grad) + ", 0 iterations");
  Mat D = Mat::Zero(8, 8);
  for (int i = 0; i < 8; ++i) D(i, i) = std::pow(4.0, i - 4);
  for (int fixed : {1, 2}) {
    Instance inst = make_instance(D * random_covariance(8, 0) * D, 4, 3);
    for (int j = 0; j < fixed; ++j) inst.l(j) = 1.0;
    const double plain = ddgfact_bound(inst).report.certified;
    const FactUpsilonSearch r = optimize_upsilon_fact(inst, Vec::Ones(8));
    o.require(r.report.certified <= plain + 1e-9,
              std::to_string(fixed) + " up-fixed: scaled " + fmt("%.8f", r.report.certified) + " > " + fmt("%.8f", plain));
    o.note(std::to_string(fixed) + " up-fixed: unscaled " + fmt("%.6f", plain) + ", scaled " +
           fmt("%.6f", r.report.certified) + " after " + std::to_string(r.outer_iterations) + " iterations");
  }
  return o;
}

struct Row {
  int instance, s, t;
  std::string kind;
  double gap;
};

Outcome c11_sweep() {
  Outcome o;
  const std::string out = "gmesp_acceptance_sweep.csv";
  const std::string cmd = std::string("GMESP_THREADS=2 \"") + GMESP_CLI +
                          "\" sweep --n 20 --count 2 --seed 11 --s-range 6,10 --kappa 0,1,4 --format csv --out " + out;
  const int rc = std::system(cmd.c_str());
  o.require(rc == 0, "sweep exit status " + std::to_string(rc));
  if (rc != 0) return o;
  std::istringstream in(read_file(out));
  std::string line;
  std::getline(in, line);
  o.require(line == "instance,n,s,t,kappa,kind,region,scaling,gamma,lb,primal,certified,gap,seconds,status", "header");
  std::map<std::tuple<int, int, int>, std::map<std::string, double>> table;
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 15) {
      o.require(false, "malformed row " + line);
      continue;
    }
    table[{std::stoi(f[0]), std::stoi(f[2]), std::stoi(f[3])}][f[5]] = std::stod(f[12]);
    ++rows;
  }
  std::remove(out.c_str());
  int compared = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [key, kinds] : table) {
    if (!kinds.count("glinx") || !kinds.count("spectral")) {
      o.require(false, "missing glinx or spectral row");
      continue;
    }
    const double diff = kinds.at("glinx") - kinds.at("spectral");
    worst = std::max(worst, diff);
    o.require(diff <= 1e-6, "glinx gap exceeds spectral gap by " + fmt("%.3g", diff));
    ++compared;
  }
  o.note(std::to_string(rows) + " rows, " + std::to_string(compared) + " (instance, s, t) groups, max glinx-spectral gap difference " +
         fmt("%.4f", worst));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"rational primal point evaluates to 11.80439587", c1_primal_fixture},
      {"rational dual point certifies 11.80435231", c2_dual_fixture},
      {"rational relaxation solve brackets and SOC gap", c3_rational_solve},
      {"reduced vs constrained table", c4_branching3},
      {"g-scaled glinx non-convexity example", c5_gscaled_example},
      {"oracle validity and exact branch and bound", c6_oracle_suite},
      {"dominance suites", c7_dominance},
      {"Kronecker scaling", c8_kronecker},
      {"o-scaling convexity and derivative", c9_oscaling},
      {"g-scaling stationarity and up-fixed improvement", c10_gscaling},
      {"sweep gap columns", c11_sweep},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu: %s (%s) [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
