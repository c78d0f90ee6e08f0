#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tap/contraction.hpp"
#include "tap/matching.hpp"
#include "tap/structure.hpp"

namespace tap {

enum class CoverMode { accumulate, listing };

enum class StepKind { independence, extra_credit, primal_dual, root_final };

// Which rule produced B(T_v).
enum class StepCase {
  independence,   // link between a compound node and another compound node or leaf
  pattern,        // golden-ticket pattern tree contracted ahead of time
  merged_paths,   // several matched paths collapsing into one component
  small_tree,     // at most two leaves
  many_matched,   // three or more matched pairs
  enlarged,       // two pairs and ten or more unmatched leaves
  constant_size,  // at most nine leaves, optimal sub-cover
  basic,          // one matched pair or none
  root,           // the tree is the whole current tree
  gap,            // no rule applies; basic cover used
};

const char* to_string(CoverMode m);
const char* to_string(StepKind k);
const char* to_string(StepCase c);

enum class CreditSource { leaf, banked, deferred };
const char* to_string(CreditSource s);

// Credit in thirds. Every current leaf and compound node owns one unit of 3.
struct CreditUnit {
  int id = -1;
  NodeId node = kNoNode;
  int amount3 = 3;
  CreditSource source = CreditSource::leaf;
  int created_by = -1;  // step index, -1 for initial leaf credit
  int spent_by = -1;
};

struct Consumption {
  int unit = -1;
  int counted3 = 0;  // share of the unit usable by the step
};

struct CoverStep {
  int index = 0;
  int round = 0;  // restart round in listing mode
  NodeId root = kNoNode;
  StepKind kind = StepKind::primal_dual;
  StepCase rule = StepCase::basic;
  std::vector<LinkUse> links;
  int credit3 = 0;
  int cost3 = 0;
  int banked3 = 0;
  int leaves = 0;
  int matched = 0;
  int unmatched = 0;
  // B covers T_v; always true for steps that are not subtree steps.
  bool covers = true;
  bool discarded = false;  // dropped by a listing-mode restart
  std::vector<Consumption> consumed;
};

struct Falsification {
  std::string kind;
  int step = -1;
  std::string detail;
};

struct CoverTrace {
  CoverMode mode = CoverMode::accumulate;
  std::vector<CoverStep> steps;
  std::vector<CreditUnit> units;
  std::vector<Falsification> falsifications;
  int iterations = 0;
  int restarts = 0;
  // Leaf edge cover on the input tree: weight in thirds, |M|, |U|.
  long long initial_cover3 = 0;
  int initial_matched = 0;
  int initial_unmatched = 0;
  int stem_matchings = 0;
  int weight_increases = 0;
  // Matchings used without pending proposals that fail is_usable.
  int unusable_matchings = 0;
};

struct CoverOptions {
  CoverMode mode = CoverMode::accumulate;
  // -1: detect golden tickets; otherwise every link gets this value.
  int forced_gt = -1;
  int exact_leaf_limit = 9;
  int exact_link_budget = 24;
  // Called after every stem matching with the view it was computed on.
  std::function<void(const TreeView&, const UsableMatching&)> on_stem_matching;
};

struct CoverResult {
  Solution solution;
  std::vector<LinkUse> uses;
  CoverTrace trace;
};

// Throws InfeasibleError when some tree edge cannot be covered.
CoverResult cover(const Instance& instance, const CoverOptions& options = {});

struct AuditReport {
  std::vector<std::string> violations;
  bool clean() const { return violations.empty(); }
};

// Checks the ledger of a trace: single spending, per-step credit, banking,
// coverage, conservation, and disjointness of links across steps. With a
// known optimum also checks the leaf cover lower bound.
AuditReport audit_ledger(const CoverTrace& trace, std::optional<int> opt = std::nullopt);

// Splits links at their lca and solves the vertical instance greedily.
Solution baseline_two_approx(const Instance& instance);

enum class OracleStatus { optimal, infeasible, budget_exceeded };
const char* to_string(OracleStatus s);

struct OracleOptions {
  // Skip when more shadow-maximal links remain than this.
  int max_links = 24;
  long long node_budget = 20'000'000;
  // Drop links whose path lies inside another link's path before searching.
  bool prune_shadows = true;
};

struct OracleResult {
  OracleStatus status = OracleStatus::budget_exceeded;
  int value = -1;
  Solution solution;                  // optimal, shadow-maximal links
  std::vector<LinkUse> shadow_minimal;  // the same optimum shrunk to a shadow-minimal one
  std::vector<int> degree;            // deg_F per node for shadow_minimal
  int candidate_links = 0;
  long long nodes = 0;
};

OracleResult exact_opt(const Instance& instance, const OracleOptions& options = {});

struct OptimaList {
  OracleStatus status = OracleStatus::budget_exceeded;
  int value = -1;
  std::vector<std::vector<LinkUse>> optima;  // each sorted by endpoint pair
  bool truncated = false;
};

// All shadow-minimal optimal solutions over the shadow completion, up to
// `limit`. Links are reported as endpoint pairs with their original link.
OptimaList enumerate_shadow_minimal_optima(const Instance& instance, int limit = 1000,
                                           const OracleOptions& options = {});

// deg_F(x) for every node.
std::vector<int> degrees(const Instance& instance, const std::vector<LinkUse>& f);

// Optimal cover of T_v in the current view using links restricted to T_v;
// nullopt if the oracle budget is exceeded.
std::optional<std::vector<LinkUse>> exact_subcover(const TreeView& view, NodeId v, int link_budget);

}  // namespace tap
