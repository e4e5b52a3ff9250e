#ifndef GMESP_BNB_HPP
#define GMESP_BNB_HPP

#include <ostream>
#include <vector>

#include "gmesp/instance.hpp"
#include "gmesp/matrix_bounds.hpp"
#include "gmesp/report.hpp"

namespace gmesp {

enum class ScaleMode { None, O, G };

const char* to_string(ScaleMode mode);
ScaleMode parse_scale_mode(const std::string& name);

// Greedy construction followed by 1-swap local search; best over restarts.
BinarySolution heuristic_lb(const Instance& inst, int restarts = 4, unsigned seed = 0);

struct Node {
  Instance inst;
  std::vector<int> map;  // node index -> root index
  double parent_bound = 0.0;
  int depth = 0;
  double gamma = 1.0;
  Vec upsilon;
};

// Down child deletes j; up child sets l_j = 1.
std::pair<Node, Node> branch(const Node& node, int j);

struct NodeBound {
  double certified = 0.0;
  Vec x;  // relaxation point used for branching (may be empty)
  bool has_dual = false;
  Vec upsilon;  // fixing multipliers
  Vec nu;
  double gamma = 1.0;
  Vec scaling;
};

struct BnbOptions {
  BoundKind kind = BoundKind::Glinx;
  RegionSpec region = RegionSpec::no_soc();
  ScaleMode scale = ScaleMode::None;
  int max_nodes = 100000;
  double tol = 1e-6;
  bool dual_lp = true;
  int heuristic_restarts = 4;
  std::ostream* log = nullptr;
};

// Certified bound of a node instance with the options' relaxation.
NodeBound bound_node(const Node& node, const BnbOptions& opts);

struct SearchStats {
  int nodes = 0;
  int fixings = 0;
  int max_depth = 0;
  double incumbent = 0.0;
  double global_bound = 0.0;
  double root_bound = 0.0;
  double seconds = 0.0;
  bool optimal = false;
};

struct BnbResult {
  BinarySolution best;
  SearchStats stats;
};

BnbResult solve_bnb(const Instance& inst, const BnbOptions& opts = {});

}  // namespace gmesp

#endif  // GMESP_BNB_HPP
