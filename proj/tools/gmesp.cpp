#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gmesp/bnb.hpp"
#include "gmesp/bounds.hpp"
#include "gmesp/fact_bounds.hpp"
#include "gmesp/io.hpp"
#include "gmesp/matrix_bounds.hpp"

using namespace gmesp;
using nlohmann::json;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolver = 4;
constexpr int kExitCertificate = 5;

int exit_code_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::InvariantViolation: return kExitParse;
    case ErrorCode::Infeasible: return kExitInfeasible;
    case ErrorCode::CertificateFailure: return kExitCertificate;
    default: return kExitSolver;
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

std::vector<BoundKind> parse_bounds(const std::string& list) {
  std::vector<BoundKind> kinds;
  for (const auto& name : split(list, ',')) {
    try {
      kinds.push_back(parse_bound_kind(name));
    } catch (const Error&) {
      throw Error(ErrorCode::Parse, "unknown bound '" + name + "'");
    }
  }
  if (kinds.empty()) throw Error(ErrorCode::Parse, "at least one bound is required");
  return kinds;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) {
    const auto colon = part.find(':');
    try {
      if (colon == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        const int lo = std::stoi(part.substr(0, colon));
        const int hi = std::stoi(part.substr(colon + 1));
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "bad integer list '" + text + "'");
    }
  }
  return out;
}

double parse_gamma(const std::string& text, const Instance& inst) {
  if (text.empty() || text == "none") return 0.0;
  if (text == "lambda-t") return std::exp(default_psi(inst));
  try {
    const double g = std::stod(text);
    if (!(g > 0.0)) throw Error(ErrorCode::Parse, "gamma must be positive");
    return g;
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::Parse, "bad gamma '" + text + "'");
  }
}

double parse_lb(const std::string& text, const Instance& inst, unsigned seed) {
  if (text.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (text == "heuristic") return heuristic_lb(inst, 4, seed).value;
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, "bad lower bound '" + text + "'");
  }
}

void check_format(const std::string& format) {
  if (format != "json" && format != "csv") throw Error(ErrorCode::Parse, "format must be json or csv");
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") std::cout << text;
  else write_file(out, text);
}

int worker_count(std::size_t tasks) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GMESP_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) hw = std::min(hw, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(hw, tasks)));
}

struct Common {
  std::string instance;
  std::string bounds = "glinx";
  std::string region = "no-soc";
  std::string scale = "none";
  std::string gamma;
  double tol = 1e-7;
  unsigned seed = 0;
  std::string out;
  std::string format = "json";
  bool dual_lp = false;

  BoundOptions options(const Instance& inst) const {
    BoundOptions o;
    o.region = parse_region(region);
    o.scale = parse_scale_mode(scale);
    o.gamma = parse_gamma(gamma, inst);
    o.tol = tol;
    o.dual_lp = dual_lp;
    return o;
  }
};

void add_common(CLI::App* app, Common& c, bool need_instance) {
  auto* opt = app->add_option("--instance", c.instance, "instance JSON file");
  if (need_instance) opt->required();
  app->add_option("--region", c.region, "full | no-soc | identity-cap")
      ->check(CLI::IsMember({"full", "no-soc", "identity-cap", "identity-cap-no-soc"}));
  app->add_option("--scale", c.scale, "none | o | g")->check(CLI::IsMember({"none", "o", "g"}));
  app->add_option("--gamma", c.gamma, "fixed glinx scaling: a number or lambda-t");
  app->add_option("--tol", c.tol, "solver tolerance")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--out", c.out, "output path (stdout when omitted)");
  app->add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
}

int cmd_bound(const Common& c, const std::string& lb_text, const std::string& point_out) {
  const Instance inst = read_instance(c.instance);
  const auto kinds = parse_bounds(c.bounds);
  const BoundOptions opts = c.options(inst);
  const double lb = parse_lb(lb_text, inst, c.seed);
  if (!point_out.empty() && kinds.size() != 1) throw Error(ErrorCode::Parse, "--point-out takes exactly one bound");
  std::vector<BoundReport> reports;
  int rc = 0;
  for (BoundKind k : kinds) {
    try {
      RelaxPoint point;
      reports.push_back(compute_bound(inst, k, opts, point_out.empty() ? nullptr : &point));
      if (!point_out.empty()) {
        if (point.x.size() == 0) throw Error(ErrorCode::Parse, "--point-out needs an unscaled matrix bound");
        write_file(point_out, relax_point_to_json(point));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Parse || e.code() == ErrorCode::InvariantViolation) throw;
      BoundReport r;
      r.kind = k;
      r.status = to_string(e.code());
      r.diagnostics.push_back(e.what());
      reports.push_back(r);
      std::cerr << "gmesp: " << to_string(k) << ": " << to_string(e.code()) << ": " << e.what() << "\n";
      if (rc == 0) rc = exit_code_of(e.code());
    }
  }
  if (c.format == "csv") {
    std::string text = report_csv_header();
    for (const auto& r : reports) text += report_to_csv(r, lb);
    emit(text, c.out);
  } else {
    emit(reports_to_json(reports, lb), c.out);
  }
  if (rc != 0) return rc;
  for (const auto& r : reports)
    if (!r.certificate_ok) {
      std::cerr << "gmesp: " << to_string(r.kind) << " certificate failed: " << r.status << "\n";
      return kExitSolver;
    }
  return 0;
}

struct SweepRow {
  int instance = 0;
  int n = 0;
  int s = 0;
  int t = 0;
  double lb = 0.0;
  BoundReport report;
  std::string error;
};

int cmd_sweep(const Common& c, int n, int count, const std::string& s_range, const std::string& kappas) {
  const auto kinds = parse_bounds(c.bounds);
  std::vector<Instance> base;
  if (!c.instance.empty()) {
    base.push_back(read_instance(c.instance));
  } else {
    if (n < 2 || count < 1) throw Error(ErrorCode::Parse, "need --n >= 2 and --count >= 1");
    for (int i = 0; i < count; ++i) base.push_back(random_instance(n, 1, 1, 0, c.seed + static_cast<unsigned>(i)));
  }
  std::vector<int> svals = s_range.empty() ? std::vector<int>{} : parse_ints(s_range);
  const std::vector<int> kvals = parse_ints(kappas);

  struct Task {
    int instance;
    int s;
    int t;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const int nn = base[i].n();
    std::vector<int> ss = svals;
    if (ss.empty())
      for (int v = std::max(1, nn / 4); v <= std::max(1, nn / 2); ++v) ss.push_back(v);
    for (int s : ss)
      for (int kappa : kvals) {
        const int t = s - kappa;
        if (s < 1 || s > nn || t < 1 || kappa < 0) continue;
        tasks.push_back({static_cast<int>(i), s, t});
      }
  }
  if (tasks.empty()) throw Error(ErrorCode::Parse, "sweep ranges select no (s, t) pairs");

  std::vector<SweepRow> rows;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& task = tasks[k];
      Instance inst = base[static_cast<std::size_t>(task.instance)];
      inst.s = task.s;
      inst.t = task.t;
      std::vector<SweepRow> local;
      double lb = std::numeric_limits<double>::quiet_NaN();
      std::string lb_error;
      try {
        lb = heuristic_lb(inst, 4, c.seed).value;
      } catch (const Error& e) {
        lb_error = e.what();
      }
      for (BoundKind kind : kinds) {
        SweepRow row{task.instance, inst.n(), task.s, task.t, lb, {}, lb_error};
        row.report.kind = kind;
        if (lb_error.empty()) {
          try {
            row.report = compute_bound(inst, kind, c.options(inst));
          } catch (const Error& e) {
            row.error = e.what();
            row.report.status = to_string(e.code());
          }
        }
        local.push_back(row);
      }
      std::lock_guard<std::mutex> lock(mu);
      rows.insert(rows.end(), local.begin(), local.end());
    }
  };
  const int nthreads = worker_count(tasks.size());
  std::vector<std::thread> pool;
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.s != b.s) return a.s < b.s;
    if (a.t != b.t) return a.t > b.t;
    if (a.report.kind != b.report.kind) return a.report.kind < b.report.kind;
    return a.instance < b.instance;
  });

  std::ostringstream o;
  if (c.format == "csv") {
    o << "instance,n,s,t,kappa,kind,region,scaling,gamma,lb,primal,certified,gap,seconds,status\n";
    for (const auto& r : rows)
      o << r.instance << ',' << r.n << ',' << r.s << ',' << r.t << ',' << (r.s - r.t) << ','
        << to_string(r.report.kind) << ',' << r.report.region << ',' << r.report.scaling << ','
        << format_double(r.report.gamma) << ',' << format_double(r.lb) << ',' << format_double(r.report.primal)
        << ',' << format_double(r.report.certified) << ',' << format_double(r.report.certified - r.lb) << ','
        << format_double(r.report.seconds) << ',' << r.report.status << '\n';
  } else {
    json a = json::array();
    for (const auto& r : rows) {
      json j;
      j["instance"] = r.instance;
      j["n"] = r.n;
      j["s"] = r.s;
      j["t"] = r.t;
      j["kappa"] = r.s - r.t;
      j["kind"] = to_string(r.report.kind);
      j["region"] = r.report.region;
      j["scaling"] = r.report.scaling;
      j["gamma"] = r.report.gamma;
      j["lb"] = std::isfinite(r.lb) ? json(r.lb) : json(nullptr);
      j["primal"] = std::isfinite(r.report.primal) ? json(r.report.primal) : json(nullptr);
      j["certified"] = std::isfinite(r.report.certified) ? json(r.report.certified) : json(nullptr);
      const double gap = r.report.certified - r.lb;
      j["gap"] = std::isfinite(gap) ? json(gap) : json(nullptr);
      j["seconds"] = r.report.seconds;
      j["status"] = r.report.status;
      if (!r.error.empty()) j["error"] = r.error;
      a.push_back(j);
    }
    o << a.dump(1) << "\n";
  }
  emit(o.str(), c.out);
  for (const auto& r : rows)
    if (!r.error.empty()) return kExitSolver;
  return 0;
}

int cmd_solve(const Common& c, int max_nodes, bool oracle_check, bool log) {
  const Instance inst = read_instance(c.instance);
  const auto kinds = parse_bounds(c.bounds);
  if (kinds.size() != 1) throw Error(ErrorCode::Parse, "solve takes exactly one bound");
  BnbOptions opts;
  opts.kind = kinds.front();
  opts.region = parse_region(c.region);
  opts.scale = parse_scale_mode(c.scale);
  opts.max_nodes = max_nodes;
  opts.dual_lp = c.dual_lp;
  if (log) opts.log = &std::cerr;
  const BnbResult res = solve_bnb(inst, opts);
  if (!std::isfinite(res.best.value)) {
    std::cerr << "gmesp: no feasible subset\n";
    return kExitInfeasible;
  }
  const auto support = res.best.support();
  std::ostringstream o;
  if (c.format == "csv") {
    o << "value,support,nodes,fixings,max_depth,root_bound,global_bound,seconds,optimal\n";
    o << format_double(res.best.value) << ',';
    for (std::size_t i = 0; i < support.size(); ++i) o << (i ? " " : "") << support[i];
    o << ',' << res.stats.nodes << ',' << res.stats.fixings << ',' << res.stats.max_depth << ','
      << format_double(res.stats.root_bound) << ',' << format_double(res.stats.global_bound) << ','
      << format_double(res.stats.seconds) << ',' << (res.stats.optimal ? 1 : 0) << '\n';
  } else {
    json j;
    j["value"] = res.best.value;
    j["support"] = support;
    j["nodes"] = res.stats.nodes;
    j["fixings"] = res.stats.fixings;
    j["max_depth"] = res.stats.max_depth;
    j["root_bound"] = res.stats.root_bound;
    j["global_bound"] = res.stats.global_bound;
    j["seconds"] = res.stats.seconds;
    j["optimal"] = res.stats.optimal;
    o << j.dump(1) << "\n";
  }
  emit(o.str(), c.out);
  if (oracle_check) {
    const BinarySolution bf = brute_force(inst);
    const bool match = std::abs(bf.value - res.best.value) <= 1e-6 * (1.0 + std::abs(bf.value));
    std::cerr << (match ? "MATCH" : "MISMATCH") << " bnb=" << format_double(res.best.value)
              << " brute_force=" << format_double(bf.value) << "\n";
    if (!match) return kExitSolver;
  }
  if (!res.stats.optimal) {
    std::cerr << "gmesp: node budget exhausted, global bound " << format_double(res.stats.global_bound) << "\n";
    return kExitSolver;
  }
  return 0;
}

int emit_check(const Common& c, const DualCheck& chk, const json& extra) {
  std::ostringstream o;
  if (c.format == "csv") {
    o << "residual,value\n";
    for (const auto& [name, v] : chk.residuals) o << name << ',' << format_double(v) << '\n';
    o << "objective," << format_double(chk.objective) << '\n';
  } else {
    json j = extra;
    json res = json::object();
    for (const auto& [name, v] : chk.residuals) res[name] = v;
    j["residuals"] = res;
    j["max_residual"] = chk.max_residual;
    j["objective"] = chk.objective;
    j["ok"] = chk.ok;
    o << j.dump(1) << "\n";
  }
  emit(o.str(), c.out);
  if (!chk.ok) {
    std::cerr << "gmesp: certificate failed: " << chk.worst << " residual " << format_double(chk.max_residual)
              << "\n";
    return kExitCertificate;
  }
  return 0;
}

int cmd_certify(const Common& c, const std::string& dual_path, const std::string& point_path, double rtol) {
  const Instance inst = read_instance(c.instance);
  if (dual_path.empty() == point_path.empty())
    throw Error(ErrorCode::Parse, "certify needs exactly one of --dual and --point");
  ScalingState sc;
  const double g = parse_gamma(c.gamma, inst);
  if (g > 0.0) sc.gamma = g;
  if (!dual_path.empty()) {
    const MatrixDualPoint d = parse_matrix_dual(read_file(dual_path), inst.n());
    return emit_check(c, check_dual(inst, d, sc, rtol), json{{"source", "dual"}, {"kind", to_string(d.kind)}});
  }
  const auto kinds = parse_bounds(c.bounds);
  if (kinds.size() != 1) throw Error(ErrorCode::Parse, "certify takes exactly one bound");
  const BoundKind kind = kinds.front();
  if (kind == BoundKind::DDGFact) {
    const json pj = json::parse(read_file(point_path), nullptr, false);
    if (pj.is_discarded() || !pj.contains("x")) throw Error(ErrorCode::Parse, "point needs 'x'");
    Vec x(inst.n());
    if (pj["x"].size() != static_cast<std::size_t>(inst.n())) throw Error(ErrorCode::Parse, "x has wrong length");
    for (int i = 0; i < inst.n(); ++i) x(i) = pj["x"][static_cast<std::size_t>(i)].get<double>();
    const Mat F = factorize(inst.C).F;
    const FactDualPoint d = ddgfact_certificate(inst, F, x, c.dual_lp);
    return emit_check(c, check_fact_dual(inst, F, d, rtol), json{{"source", "point"}, {"kind", "ddgfact"}});
  }
  if (kind != BoundKind::Glinx && kind != BoundKind::GnlpId && kind != BoundKind::GnlpComp)
    throw Error(ErrorCode::Parse, "certify supports ddgfact, glinx, gnlp-id and gnlp-comp");
  const MatrixKind mk = kind == BoundKind::Glinx ? MatrixKind::Glinx
                        : kind == BoundKind::GnlpId ? MatrixKind::GnlpId
                                                    : MatrixKind::GnlpComp;
  const RelaxPoint p = parse_relax_point(read_file(point_path), inst.n());
  const MatrixDualPoint d = certify(inst, mk, parse_region(c.region), p, sc, nullptr, c.dual_lp);
  json extra{{"source", "point"}, {"kind", to_string(mk)}};
  extra["primal"] = eval_relaxation(inst.C, mk, sc, p.X, inst.t);
  return emit_check(c, check_dual(inst, d, sc, rtol), extra);
}

int cmd_gen(const Common& c, int n, int s, int t, int m) {
  if (n < 1 || s < 1 || t < 1 || t > s || s > n || m < 0) throw Error(ErrorCode::Parse, "require 0 < t <= s <= n");
  const Instance inst = random_instance(n, s, t, m, c.seed);
  if (c.format == "csv") {
    std::ostringstream o;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) o << format_double(inst.C(i, j)) << (j + 1 < n ? ',' : '\n');
    emit(o.str(), c.out);
  } else {
    emit(instance_to_json(inst), c.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized maximum-entropy sampling bounds and exact solver"};
  app.require_subcommand(1);

  Common c;
  std::string lb_text;
  std::string point_out;
  auto* bound = app.add_subcommand("bound", "compute certified upper bounds");
  add_common(bound, c, true);
  bound->add_option("--bound", c.bounds, "comma list of bounds");
  bound->add_option("--lb", lb_text, "lower bound for gaps: a number or heuristic");
  bound->add_flag("--dual-lp", c.dual_lp, "exact LP duals in certificates");
  bound->add_option("--point-out", point_out, "write the relaxation point as JSON");

  int sweep_n = 20;
  int sweep_count = 5;
  std::string s_range;
  std::string kappas = "0,1,4";
  auto* sweep = app.add_subcommand("sweep", "gap table over (s, t) on an instance or seeded ensemble");
  add_common(sweep, c, false);
  sweep->add_option("--bound", c.bounds, "comma list of bounds");
  sweep->add_option("--n", sweep_n, "ensemble dimension");
  sweep->add_option("--count", sweep_count, "ensemble size");
  sweep->add_option("--s-range", s_range, "s values, e.g. 5:10 or 4,6,8");
  sweep->add_option("--kappa", kappas, "kappa = s - t values, e.g. 0,1,4");
  sweep->add_flag("--dual-lp", c.dual_lp, "exact LP duals in certificates");

  int max_nodes = 100000;
  bool oracle_check = false;
  bool log = false;
  auto* solve = app.add_subcommand("solve", "exact branch and bound");
  add_common(solve, c, true);
  solve->add_option("--bound", c.bounds, "node bound");
  solve->add_option("--max-nodes", max_nodes, "node budget")->check(CLI::PositiveNumber);
  solve->add_flag("--oracle-check", oracle_check, "compare with brute force");
  solve->add_flag("--log", log, "progress lines on stderr");
  solve->add_flag("--dual-lp,!--no-dual-lp", c.dual_lp, "exact LP duals for fixing (default on)");

  std::string dual_path;
  std::string point_path;
  double rtol = 1e-6;
  auto* cert = app.add_subcommand("certify", "check a dual point or certify a primal point");
  add_common(cert, c, true);
  cert->add_option("--bound", c.bounds, "relaxation of the primal point");
  cert->add_option("--dual", dual_path, "dual point JSON");
  cert->add_option("--point", point_path, "primal point JSON");
  cert->add_option("--residual-tol", rtol, "residual tolerance")->check(CLI::PositiveNumber);
  cert->add_flag("--dual-lp", c.dual_lp, "exact LP duals in certificates");

  int gn = 8;
  int gs = 4;
  int gt = 3;
  int gm = 0;
  auto* gen = app.add_subcommand("gen", "seeded random instance, C = Q^T Q with Q standard normal");
  add_common(gen, c, false);
  gen->add_option("--n", gn, "dimension");
  gen->add_option("--s", gs, "subset size");
  gen->add_option("--t", gt, "eigenvalue count");
  gen->add_option("--m", gm, "side constraints");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  if (solve->parsed() && solve->count("--dual-lp") + solve->count("--no-dual-lp") == 0) c.dual_lp = true;

  try {
    check_format(c.format);
    if (bound->parsed()) return cmd_bound(c, lb_text, point_out);
    if (sweep->parsed()) {
      if (sweep->count("--bound") == 0) c.bounds = "spectral,ddgfact,glinx";
      if (sweep->count("--gamma") == 0 && c.scale == "none") c.gamma = "lambda-t";
      return cmd_sweep(c, sweep_n, sweep_count, s_range, kappas);
    }
    if (solve->parsed()) return cmd_solve(c, max_nodes, oracle_check, log);
    if (cert->parsed()) return cmd_certify(c, dual_path, point_path, rtol);
    if (gen->parsed()) return cmd_gen(c, gn, gs, gt, gm);
  } catch (const Error& e) {
    std::cerr << "gmesp: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_of(e.code());
  } catch (const std::exception& e) {
    std::cerr << "gmesp: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
