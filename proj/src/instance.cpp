#include "gmesp/instance.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace gmesp {

Instance make_instance(const Mat& C, int s, int t) {
  Instance inst;
  inst.C = C;
  inst.s = s;
  inst.t = t;
  inst.A = Mat(0, C.rows());
  inst.b = Vec(0);
  inst.l = Vec::Zero(C.rows());
  inst.c = Vec::Ones(C.rows());
  return inst;
}

void validate(const Instance& inst) {
  const int n = inst.n();
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvariantViolation, msg); };
  if (n <= 0 || inst.C.cols() != n) fail("C must be square and non-empty");
  if (!inst.C.allFinite()) fail("C has non-finite entries");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(inst.C(i, j) - inst.C(j, i)) > 1e-10 * (1.0 + std::abs(inst.C(i, j))))
        fail("C is not symmetric");
  if (inst.t <= 0 || inst.t > inst.s || inst.s > n) fail("require 0 < t <= s <= n");
  if (inst.l.size() != n || inst.c.size() != n) fail("box bounds have wrong length");
  if (inst.A.cols() != n && inst.A.rows() > 0) fail("A has wrong number of columns");
  if (inst.b.size() != inst.A.rows()) fail("b has wrong length");
  for (int i = 0; i < n; ++i) {
    const bool lb = inst.l(i) == 0.0 || inst.l(i) == 1.0;
    const bool ub = inst.c(i) == 0.0 || inst.c(i) == 1.0;
    if (!lb || !ub) fail("box bounds must be binary");
    if (inst.l(i) > inst.c(i)) fail("l > c");
  }
  if (inst.l.sum() > inst.s || inst.c.sum() < inst.s)
    throw Error(ErrorCode::Infeasible, "require sum(l) <= s <= sum(c)");
}

std::vector<int> BinarySolution::support() const { return support_of(x); }

std::vector<int> support_of(const Vec& x) {
  std::vector<int> S;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) > 0.5) S.push_back(static_cast<int>(i));
  return S;
}

Vec indicator(int n, const std::vector<int>& S) {
  Vec x = Vec::Zero(n);
  for (int i : S) x(i) = 1.0;
  return x;
}

double top_t_logdet(const Mat& C, const std::vector<int>& S, int t) {
  const int k = static_cast<int>(S.size());
  if (k < t) throw Error(ErrorCode::RankDeficient, "top_t_logdet: |S| < t");
  Mat sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = C(S[i], S[j]);
  return top_logeig_sum(sym_eigenvalues(sub), t);
}

bool is_feasible_binary(const Instance& inst, const Vec& x, double tol) {
  if (std::abs(x.sum() - inst.s) > tol) return false;
  for (int i = 0; i < inst.n(); ++i)
    if (x(i) < inst.l(i) - tol || x(i) > inst.c(i) + tol) return false;
  if (inst.m() > 0 && ((inst.A * x - inst.b).array() > tol).any()) return false;
  return true;
}

namespace {

// Visits all s-subsets of {0..n-1} with rank in [begin, end) of lexicographic order.
struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<int> S;
};

bool next_combination(std::vector<int>& comb, int n) {
  const int k = static_cast<int>(comb.size());
  int i = k - 1;
  while (i >= 0 && comb[i] == n - k + i) --i;
  if (i < 0) return false;
  ++comb[i];
  for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  return true;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void scan_block(const Instance& inst, int first, Best& best) {
  // Enumerates subsets whose smallest element is `first`.
  const int n = inst.n();
  const int s = inst.s;
  if (first + s > n) return;
  std::vector<int> rest(s - 1);
  for (int j = 0; j < s - 1; ++j) rest[j] = first + 1 + j;
  const int span = n - first - 1;
  std::vector<int> local(s - 1);
  for (int j = 0; j < s - 1; ++j) local[j] = j;
  std::vector<int> S(s);
  while (true) {
    S[0] = first;
    for (int j = 0; j < s - 1; ++j) S[j + 1] = first + 1 + local[j];
    const Vec x = indicator(n, S);
    if (is_feasible_binary(inst, x)) {
      try {
        const double v = top_t_logdet(inst.C, S, inst.t);
        if (v > best.value) {
          best.value = v;
          best.S = S;
        }
      } catch (const Error&) {
      }
    }
    if (s - 1 == 0 || !next_combination(local, span)) break;
  }
}

}  // namespace

BinarySolution brute_force(const Instance& inst, int guard) {
  validate(inst);
  const int n = inst.n();
  if (n > guard) throw Error(ErrorCode::TooLarge, "brute_force: n exceeds enumeration guard");
  // Blocks keyed by smallest element, scanned in parallel; lexicographic order within
  // and across blocks makes the strict improvement rule pick the lexicographically smallest support.
  std::vector<Best> blocks(n);
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GMESP_THREADS")) threads = std::max(1, std::atoi(env));
  if (binom(n, inst.s) < 2000) threads = 1;
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int f = next++; f < n; f = next++) scan_block(inst, f, blocks[f]);
  };
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  Best best;
  for (int f = 0; f < n; ++f)
    if (blocks[f].value > best.value) best = blocks[f];
  if (best.S.empty()) throw Error(ErrorCode::Infeasible, "brute_force: no feasible subset of full rank");
  BinarySolution sol;
  sol.x = indicator(n, best.S);
  sol.value = best.value;
  return sol;
}

RelaxPoint binary_to_projector(const Instance& inst, const Vec& xhat) {
  const int n = inst.n();
  const Mat D = xhat.asDiagonal();
  const Spectrum sp = sym_eigen(Mat(D * inst.C * D));
  const double thr = 1e-12 * std::max(1.0, sp.values(0));
  if (!(sp.values(inst.t - 1) > thr)) throw Error(ErrorCode::RankDeficient, "binary_to_projector: rank < t");
  RelaxPoint p;
  p.x = xhat;
  const Mat V = sp.vectors.leftCols(inst.t);
  p.X = V * V.transpose();
  for (int i = 0; i < n; ++i)
    if (xhat(i) < 0.5) {
      p.X.row(i).setZero();
      p.X.col(i).setZero();
    }
  return p;
}

Instance kron_lift(const Instance& inst, int k) {
  if (k < 1) throw Error(ErrorCode::InvariantViolation, "kron_lift: k must be >= 1");
  const int n = inst.n();
  const int m = inst.m();
  Instance out;
  out.C = Mat::Zero(k * n, k * n);
  out.A = Mat::Zero(k * m, k * n);
  out.b = Vec(k * m);
  out.l = Vec(k * n);
  out.c = Vec(k * n);
  for (int j = 0; j < k; ++j) {
    out.C.block(j * n, j * n, n, n) = inst.C;
    if (m) {
      out.A.block(j * m, j * n, m, n) = inst.A;
      out.b.segment(j * m, m) = inst.b;
    }
    out.l.segment(j * n, n) = inst.l;
    out.c.segment(j * n, n) = inst.c;
  }
  out.s = k * inst.s;
  out.t = k * inst.t;
  return out;
}

Instance reduce(const Instance& inst, const std::vector<int>& F0) {
  const int n = inst.n();
  std::vector<char> drop(n, 0);
  for (int j : F0) {
    if (j < 0 || j >= n) throw Error(ErrorCode::InvariantViolation, "reduce: index out of range");
    drop[j] = 1;
  }
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (!drop[i]) keep.push_back(i);
  const int k = static_cast<int>(keep.size());
  if (inst.s > k) throw Error(ErrorCode::InvariantViolation, "reduce: s exceeds remaining variables");
  Instance out;
  out.s = inst.s;
  out.t = inst.t;
  out.C = Mat(k, k);
  out.A = Mat(inst.m(), k);
  out.b = inst.b;
  out.l = Vec(k);
  out.c = Vec(k);
  for (int a = 0; a < k; ++a) {
    for (int bb = 0; bb < k; ++bb) out.C(a, bb) = inst.C(keep[a], keep[bb]);
    if (inst.m()) out.A.col(a) = inst.A.col(keep[a]);
    out.l(a) = inst.l(keep[a]);
    out.c(a) = inst.c(keep[a]);
  }
  if (out.l.sum() > out.s) throw Error(ErrorCode::InvariantViolation, "reduce: too many variables fixed to one");
  return out;
}

Mat random_covariance(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat Q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Q(i, j) = normal(rng);
  Mat C = Q.transpose() * Q;
  return (C + C.transpose()) / 2.0;
}

Instance random_instance(int n, int s, int t, int m, unsigned seed) {
  Instance inst = make_instance(random_covariance(n, seed), s, t);
  if (m > 0) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    Vec xref = Vec::Zero(n);
    for (int i = 0; i < s; ++i) xref(idx[i]) = 1.0;
    inst.A = Mat(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) inst.A(i, j) = unif(rng);
    inst.b = inst.A * xref + Vec::Constant(m, 0.05);
  }
  return inst;
}

}  // namespace gmesp
