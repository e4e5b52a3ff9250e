#include "gmesp/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <random>

#include "gmesp/fact_bounds.hpp"
#include "gmesp/spectral.hpp"

namespace gmesp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_free(const Instance& inst, int j) { return inst.l(j) == 0.0 && inst.c(j) == 1.0; }

double partial_value(const Instance& inst, const std::vector<int>& S) {
  if (S.empty()) return 0.0;
  const int k = std::min(static_cast<int>(S.size()), inst.t);
  try {
    return top_t_logdet(inst.C, S, k);
  } catch (const Error&) {
    return kNegInf;
  }
}

bool partial_ok(const Instance& inst, const Vec& x) {
  if (inst.m() == 0) return true;
  return ((inst.A * x - inst.b).array() <= 1e-9).all();
}

double full_value(const Instance& inst, const Vec& x) {
  if (!is_feasible_binary(inst, x)) return kNegInf;
  try {
    return top_t_logdet(inst.C, support_of(x), inst.t);
  } catch (const Error&) {
    return kNegInf;
  }
}

// One greedy pass; rng == nullptr picks the best candidate, otherwise one of the best three.
Vec greedy(const Instance& inst, std::mt19937_64* rng) {
  const int n = inst.n();
  Vec x = inst.l;
  std::vector<int> S = support_of(x);
  while (static_cast<int>(S.size()) < inst.s) {
    std::vector<std::pair<double, int>> cand;
    for (int j = 0; j < n; ++j) {
      if (x(j) == 1.0 || inst.c(j) == 0.0) continue;
      x(j) = 1.0;
      if (partial_ok(inst, x)) {
        std::vector<int> T = S;
        T.push_back(j);
        std::sort(T.begin(), T.end());
        cand.emplace_back(partial_value(inst, T), j);
      }
      x(j) = 0.0;
    }
    if (cand.empty()) return Vec();
    std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::size_t pick = 0;
    if (rng) pick = std::uniform_int_distribution<std::size_t>(0, std::min<std::size_t>(2, cand.size() - 1))(*rng);
    x(cand[pick].second) = 1.0;
    S.push_back(cand[pick].second);
    std::sort(S.begin(), S.end());
  }
  return x;
}

double local_search(const Instance& inst, Vec& x) {
  const int n = inst.n();
  double best = full_value(inst, x);
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < n && !improved; ++i) {
      if (x(i) != 1.0 || inst.l(i) == 1.0) continue;
      for (int j = 0; j < n && !improved; ++j) {
        if (x(j) != 0.0 || inst.c(j) == 0.0) continue;
        x(i) = 0.0;
        x(j) = 1.0;
        const double v = full_value(inst, x);
        if (v > best + 1e-12) {
          best = v;
          improved = true;
        } else {
          x(i) = 1.0;
          x(j) = 0.0;
        }
      }
    }
  }
  return best;
}

void log_node(std::ostream* log, int id, int depth, double bound, double incumbent, int f0, int f1) {
  if (!log) return;
  char buf[256];
  std::snprintf(buf, sizeof buf, "node=%d depth=%d bound=%.10g incumbent=%.10g fixed0=%d fixed1=%d\n", id, depth, bound,
                incumbent, f0, f1);
  *log << buf;
}

Vec restrict_vec(const Vec& v, const std::vector<int>& keep) {
  if (v.size() == 0) return v;
  Vec out(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a) out(static_cast<Eigen::Index>(a)) = v(keep[a]);
  return out;
}

// Node without the variables in F0; false when the reduced node has no binary point.
bool drop_variables(Node& node, const std::vector<int>& F0) {
  if (F0.empty()) return true;
  std::vector<char> drop(node.inst.n(), 0);
  for (int j : F0) drop[j] = 1;
  std::vector<int> keep;
  for (int i = 0; i < node.inst.n(); ++i)
    if (!drop[i]) keep.push_back(i);
  if (static_cast<int>(keep.size()) < node.inst.s) return false;
  try {
    node.inst = reduce(node.inst, F0);
  } catch (const Error&) {
    return false;
  }
  std::vector<int> map;
  for (int i : keep) map.push_back(node.map[i]);
  node.map = map;
  node.upsilon = restrict_vec(node.upsilon, keep);
  return node.inst.c.sum() >= node.inst.s;
}

struct Queued {
  double key;
  int id;
  Node node;
};

struct QueueOrder {
  bool operator()(const Queued& a, const Queued& b) const {
    if (a.key != b.key) return a.key < b.key;
    return a.id > b.id;
  }
};

}  // namespace

const char* to_string(ScaleMode mode) {
  switch (mode) {
    case ScaleMode::None: return "none";
    case ScaleMode::O: return "o";
    case ScaleMode::G: return "g";
  }
  return "none";
}

ScaleMode parse_scale_mode(const std::string& name) {
  if (name == "none") return ScaleMode::None;
  if (name == "o") return ScaleMode::O;
  if (name == "g") return ScaleMode::G;
  throw Error(ErrorCode::Parse, "unknown scale mode '" + name + "'");
}

// Depth-first search for any feasible full-rank support; false when the budget runs out first.
bool feasible_dfs(const Instance& inst, Vec& x, int next, int count, long& budget, bool monotone) {
  if (--budget < 0) return false;
  if (count == inst.s) return full_value(inst, x) > kNegInf;
  const int n = inst.n();
  if (n - next < inst.s - count) return false;
  for (int j = next; j < n; ++j) {
    if (x(j) == 1.0 || inst.c(j) == 0.0) continue;
    x(j) = 1.0;
    if ((!monotone || partial_ok(inst, x)) && feasible_dfs(inst, x, j + 1, count + 1, budget, monotone)) return true;
    x(j) = 0.0;
    if (budget < 0) return false;
  }
  return false;
}

BinarySolution heuristic_lb(const Instance& inst, int restarts, unsigned seed) {
  validate(inst);
  BinarySolution best;
  best.value = kNegInf;
  std::mt19937_64 rng(seed);
  for (int r = 0; r <= restarts; ++r) {
    Vec x = greedy(inst, r == 0 ? nullptr : &rng);
    if (x.size() == 0) continue;
    const double v = local_search(inst, x);
    if (v > best.value) {
      best.value = v;
      best.x = x;
    }
  }
  if (!(best.value > kNegInf)) {
    Vec x = inst.l;
    long budget = 2000000;
    const bool monotone = inst.m() == 0 || (inst.A.array() >= 0.0).all();
    if (!feasible_dfs(inst, x, 0, static_cast<int>(x.sum()), budget, monotone)) {
      if (budget < 0) throw Error(ErrorCode::MaxIterations, "heuristic search budget exhausted");
      throw Error(ErrorCode::Infeasible, "no feasible binary point of full rank");
    }
    best.value = local_search(inst, x);
    best.x = x;
  }
  return best;
}

std::pair<Node, Node> branch(const Node& node, int j) {
  Node down = node;
  Node up = node;
  down.depth = up.depth = node.depth + 1;
  up.inst.l(j) = 1.0;
  std::vector<int> keep;
  for (int i = 0; i < node.inst.n(); ++i)
    if (i != j) keep.push_back(i);
  down.inst = reduce(node.inst, {j});
  down.map.clear();
  for (int i : keep) down.map.push_back(node.map[i]);
  down.upsilon = restrict_vec(node.upsilon, keep);
  return {down, up};
}

NodeBound bound_node(const Node& node, const BnbOptions& opts) {
  const Instance& inst = node.inst;
  NodeBound nb;
  nb.gamma = node.gamma;
  nb.scaling = node.upsilon;
  switch (opts.kind) {
    case BoundKind::Spectral:
      nb.certified = spectral_bound(inst.C, inst.t);
      return nb;
    case BoundKind::LagrangianSpectral:
      nb.certified = lagrangian_spectral_bound(inst).value;
      return nb;
    case BoundKind::DDGFact: {
      FactOptions fo;
      fo.dual_lp = opts.dual_lp;
      if (opts.scale == ScaleMode::G && node.upsilon.size() == inst.n()) {
        const FactResult r = ddgfact_gscaled_bound(inst, node.upsilon, fo);
        nb.certified = r.report.certified;
        nb.x = r.x;
        return nb;
      }
      const FactResult r = ddgfact_bound(inst, fo);
      nb.certified = r.report.certified;
      nb.x = r.x;
      if (r.report.certificate_ok) {
        nb.has_dual = true;
        nb.upsilon = r.dual.upsilon;
        nb.nu = r.dual.nu;
      }
      return nb;
    }
    case BoundKind::Glinx:
    case BoundKind::GnlpId:
    case BoundKind::GnlpComp: {
      const MatrixKind mk = opts.kind == BoundKind::Glinx    ? MatrixKind::Glinx
                            : opts.kind == BoundKind::GnlpId ? MatrixKind::GnlpId
                                                             : MatrixKind::GnlpComp;
      ScalingState sc;
      if (mk == MatrixKind::Glinx && opts.scale == ScaleMode::O) sc.gamma = node.gamma;
      if (mk == MatrixKind::Glinx && opts.scale == ScaleMode::G && node.upsilon.size() == inst.n())
        sc.upsilon = node.upsilon;
      SolverOptions so;
      so.dual_lp = opts.dual_lp;
      const RelaxResult r = solve_relaxation(inst, mk, opts.region, sc, so);
      nb.x = r.point.x;
      if (r.report.certificate_ok) {
        nb.certified = r.report.certified;
        nb.has_dual = true;
        nb.upsilon = r.dual.upsilon;
        nb.nu = r.dual.nu;
      } else {
        nb.certified = spectral_bound(inst.C, inst.t);
      }
      return nb;
    }
  }
  throw Error(ErrorCode::Internal, "unknown bound kind");
}

BnbResult solve_bnb(const Instance& root_inst, const BnbOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(root_inst);
  const int n_root = root_inst.n();
  BnbResult res;
  res.best.value = kNegInf;
  try {
    res.best = heuristic_lb(root_inst, opts.heuristic_restarts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Infeasible) throw;
  }

  Node root;
  root.inst = root_inst;
  root.map.resize(n_root);
  for (int i = 0; i < n_root; ++i) root.map[i] = i;
  root.parent_bound = std::numeric_limits<double>::infinity();
  const bool glinx = opts.kind == BoundKind::Glinx;
  if (glinx && opts.scale != ScaleMode::None) {
    SolverOptions so;
    so.dual_lp = opts.dual_lp;
    root.gamma = optimize_gamma(root_inst, opts.region, default_psi(root_inst), so).gamma;
    if (opts.scale == ScaleMode::G) {
      const Vec ups0 = Vec::Constant(n_root, std::pow(root.gamma, 0.25));
      root.upsilon = optimize_upsilon_glinx(root_inst, opts.region, ups0, 30, so).upsilon;
    }
  } else if (opts.kind == BoundKind::DDGFact && opts.scale == ScaleMode::G) {
    FactOptions fo;
    fo.dual_lp = opts.dual_lp;
    root.upsilon = optimize_upsilon_fact(root_inst, Vec::Ones(n_root), 30, fo).upsilon;
  }

  auto lift = [&](const Node& node, const Vec& x) {
    Vec full = Vec::Zero(n_root);
    for (std::size_t a = 0; a < node.map.size(); ++a) full(node.map[a]) = x(static_cast<Eigen::Index>(a));
    return full;
  };
  // Leaves have every binary point determined by the budget.
  auto leaf_point = [&](const Instance& inst, Vec& x) {
    int free = 0;
    for (int j = 0; j < inst.n(); ++j) free += is_free(inst, j) ? 1 : 0;
    const int r = inst.s - static_cast<int>(inst.l.sum());
    if (free != 0 && r != 0 && r != free) return false;
    x = r == 0 ? inst.l : inst.c;
    return true;
  };

  std::priority_queue<Queued, std::vector<Queued>, QueueOrder> open;
  int next_id = 0;
  open.push({std::numeric_limits<double>::infinity(), next_id++, root});
  double budget_bound = kNegInf;
  bool first = true;
  while (!open.empty()) {
    if (open.top().key <= res.best.value + opts.tol) break;
    if (res.stats.nodes >= opts.max_nodes) {
      budget_bound = open.top().key;
      break;
    }
    Queued q = open.top();
    open.pop();
    Node node = std::move(q.node);
    ++res.stats.nodes;
    res.stats.max_depth = std::max(res.stats.max_depth, node.depth);

    Vec xl;
    if (leaf_point(node.inst, xl)) {
      const double v = full_value(node.inst, xl);
      if (v > res.best.value) {
        res.best.value = v;
        res.best.x = lift(node, xl);
      }
      log_node(opts.log, q.id, node.depth, v, res.best.value, 0, 0);
      if (first) res.stats.root_bound = v;
      first = false;
      continue;
    }

    NodeBound nb;
    try {
      nb = bound_node(node, opts);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Infeasible) {
        log_node(opts.log, q.id, node.depth, kNegInf, res.best.value, 0, 0);
        first = false;
        continue;
      }
      try {
        nb = NodeBound{};
        nb.certified = spectral_bound(node.inst.C, node.inst.t);
      } catch (const Error&) {
        log_node(opts.log, q.id, node.depth, kNegInf, res.best.value, 0, 0);
        first = false;
        continue;
      }
    }
    const double bound = std::min(nb.certified, node.parent_bound);
    if (first) res.stats.root_bound = bound;
    first = false;

    std::vector<int> F0;
    std::vector<int> F1;
    if (nb.has_dual && res.best.value > kNegInf && bound > res.best.value + opts.tol) {
      const Fixings fx = fix_variables(nb.upsilon, nb.nu, nb.certified, res.best.value, node.inst.l, node.inst.c);
      for (int j : fx.F0)
        if (is_free(node.inst, j)) F0.push_back(j);
      for (int j : fx.F1)
        if (is_free(node.inst, j)) F1.push_back(j);
    }
    log_node(opts.log, q.id, node.depth, bound, res.best.value, static_cast<int>(F0.size()),
             static_cast<int>(F1.size()));
    if (bound <= res.best.value + opts.tol) continue;
    res.stats.fixings += static_cast<int>(F0.size() + F1.size());

    Vec x = nb.x;
    for (int j : F1) {
      node.inst.l(j) = 1.0;
      if (x.size()) x(j) = 1.0;
    }
    if (node.inst.l.sum() > node.inst.s) continue;
    if (!F0.empty()) {
      std::vector<int> keep;
      std::vector<char> drop(node.inst.n(), 0);
      for (int j : F0) drop[j] = 1;
      for (int i = 0; i < node.inst.n(); ++i)
        if (!drop[i]) keep.push_back(i);
      if (!drop_variables(node, F0)) continue;
      x = restrict_vec(x, keep);
    }
    node.parent_bound = bound;
    node.gamma = nb.gamma;

    if (leaf_point(node.inst, xl)) {
      open.push({bound, next_id++, node});
      continue;
    }
    int j = -1;
    double score = -1.0;
    for (int i = 0; i < node.inst.n(); ++i) {
      if (!is_free(node.inst, i)) continue;
      const double sc = x.size() ? std::min(x(i), 1.0 - x(i)) : node.inst.C(i, i);
      if (sc > score + 1e-12) {
        score = sc;
        j = i;
      }
    }
    if (j < 0) continue;
    Node up = node;
    up.depth = node.depth + 1;
    up.inst.l(j) = 1.0;
    Node down = node;
    down.depth = node.depth + 1;
    const bool down_ok = drop_variables(down, {j});
    if (down_ok) open.push({bound, next_id++, down});
    if (up.inst.l.sum() <= up.inst.s) open.push({bound, next_id++, up});
  }

  double gb = res.best.value;
  if (budget_bound > kNegInf) gb = std::max(gb, budget_bound);
  res.stats.optimal = !(budget_bound > kNegInf);
  res.stats.incumbent = res.best.value;
  res.stats.global_bound = gb;
  res.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!(res.best.value > kNegInf) && res.stats.optimal) throw Error(ErrorCode::Infeasible, "no feasible binary point");
  return res;
}

}  // namespace gmesp
