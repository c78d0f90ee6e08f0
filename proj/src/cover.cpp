#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tap/solver.hpp"

namespace tap {

const char* to_string(CoverMode m) { return m == CoverMode::accumulate ? "accumulate" : "listing"; }

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::independence: return "independence";
    case StepKind::extra_credit: return "extra-credit";
    case StepKind::primal_dual: return "primal-dual";
    case StepKind::root_final: return "root-final";
  }
  return "?";
}

const char* to_string(StepCase c) {
  switch (c) {
    case StepCase::independence: return "independence";
    case StepCase::pattern: return "pattern";
    case StepCase::merged_paths: return "merged-paths";
    case StepCase::small_tree: return "small-tree";
    case StepCase::many_matched: return "many-matched";
    case StepCase::enlarged: return "enlarged";
    case StepCase::constant_size: return "constant-size";
    case StepCase::basic: return "basic";
    case StepCase::root: return "root";
    case StepCase::gap: return "gap";
  }
  return "?";
}

const char* to_string(CreditSource s) {
  switch (s) {
    case CreditSource::leaf: return "leaf";
    case CreditSource::banked: return "banked";
    case CreditSource::deferred: return "deferred";
  }
  return "?";
}

namespace {

// How leaf credit is shared while a matching is in force: both leaves of a
// pair together hold 4+gt thirds.
struct PairShares {
  std::unordered_map<NodeId, std::pair<NodeId, int>> partner;

  void add(NodeId a, NodeId b, int weight3) {
    partner[a] = {b, weight3};
    partner[b] = {a, weight3};
  }
};

class Runner {
 public:
  Runner(const Instance& instance, const CoverOptions& options)
      : base_(instance), options_(options), state_(instance) {
    trace_.mode = options.mode;
    holder_.assign(instance.node_count(), -1);
    members_.resize(instance.node_count());
    for (NodeId x = 0; x < instance.node_count(); ++x) members_[x] = {x};
    incident_.resize(instance.node_count());
    for (const Link& l : instance.links()) {
      incident_[l.u].push_back(l.id);
      incident_[l.v].push_back(l.id);
    }
    for (NodeId x : instance.tree().leaves()) mint(x, CreditSource::leaf, -1);
  }

  CoverResult run() {
    bool first = true;
    while (state_.node_count() > 1) {
      const int before = state_.node_count();
      ++trace_.iterations;
      TreeView view(state_);
      std::vector<StemRecord> stems = find_stems(view);
      GoldenTicketMap gt = options_.forced_gt >= 0 ? uniform_tickets(base_, options_.forced_gt)
                                                   : golden_tickets(view, stems);
      EdgeCoverResult ec = min_weight_edge_cover(leaf_cover_graph(view, gt));
      if (first) {
        trace_.initial_cover3 = ec.weight;
        trace_.initial_matched = static_cast<int>(ec.matched.size());
        trace_.initial_unmatched = static_cast<int>(ec.unmatched.size());
        first = false;
      }
      UsableMatching um = stem_matching(view, ec, gt, stems);
      ++trace_.stem_matchings;
      if (um.weight_after > um.weight_before) {
        ++trace_.weight_increases;
        falsify("stem-matching weight increase", -1,
                std::to_string(um.weight_before) + " -> " + std::to_string(um.weight_after));
      }
      if (!um.usable && um.proposals.empty()) ++trace_.unusable_matchings;
      if (options_.on_stem_matching) options_.on_stem_matching(view, um);
      unresolved_ = static_cast<int>(um.unresolved_twins.size() + um.unresolved_stems.size());

      // Credit follows the minimum cover, which the lower bound certifies;
      // stem matching may only make the matching heavier.
      shares_ = PairShares{};
      for (const LinkUse& u : ec.pairs) {
        NodeId a = state_.rep(u.u);
        NodeId b = state_.rep(u.v);
        if (view.is_leaf(a) && view.is_leaf(b)) shares_.add(a, b, gt.weight3(u.origin));
      }

      // One proposal per iteration: the others refer to credit this one may
      // consume.
      if (!um.proposals.empty()) {
        const ExtraCreditProposal& p = um.proposals.front();
        StepCase rule = p.reason == "merged paths" ? StepCase::merged_paths : StepCase::pattern;
        bool covers = rule == StepCase::pattern ? covers_subtree(view, p.root, p.links) : true;
        NodeId r = execute(p.links, rule, p.root, covers, -1, -1, -1, false);
        enforce_independence(r);
        if (state_.node_count() < before) continue;
      }

      SemiClosedTree sct = semi_closed_subtree(view, um.matching, stems);
      NodeId root = sct.root;
      std::vector<LinkUse> b = sct.basic;
      StepCase rule = StepCase::basic;
      int pairs = 0;
      for (const LinkUse& u : sct.matched)
        if (view.is_leaf(state_.rep(u.u)) && view.is_leaf(state_.rep(u.v))) ++pairs;
      const int leaves = static_cast<int>(sct.leaves.size());
      const int unmatched = static_cast<int>(sct.unmatched.size());
      auto try_exact = [&] {
        if (auto ex = exact_subcover(view, root, options_.exact_link_budget)) {
          if (ex->size() < b.size()) b = *ex;
        }
      };
      if (root == view.root()) {
        rule = StepCase::root;
        if (leaves <= options_.exact_leaf_limit) try_exact();
      } else if (leaves <= 2) {
        rule = StepCase::small_tree;
      } else if (pairs >= 3) {
        rule = StepCase::many_matched;
      } else if (pairs == 2 && unmatched >= 10) {
        rule = StepCase::enlarged;
        std::vector<bool> closed = leaf_closed_flags(view);
        NodeId w = view.parent(root);
        while (!closed[w]) w = view.parent(w);
        std::vector<LinkUse> bw;
        std::unordered_set<std::uint64_t> seen;
        for (NodeId leaf : view.leaves_in(w)) {
          const Link& l = base_.link(up_link(view, leaf));
          if (seen.insert(pair_key(l.u, l.v)).second) bw.push_back(LinkUse{l.id, l.u, l.v});
        }
        if (covers_subtree(view, w, bw)) {
          root = w;
          b = bw;
        } else {
          falsify("enlarged tree not covered by its up-links", -1, "w=" + std::to_string(w));
          rule = StepCase::basic;
        }
      } else if (leaves <= options_.exact_leaf_limit) {
        rule = StepCase::constant_size;
        try_exact();
      } else if (pairs <= 1) {
        rule = StepCase::basic;
      } else {
        rule = StepCase::gap;
        falsify("no classification rule applies", static_cast<int>(trace_.steps.size()),
                "v=" + std::to_string(root) + " leaves=" + std::to_string(leaves) +
                    " pairs=" + std::to_string(pairs) + " unmatched=" + std::to_string(unmatched));
      }
      if (root != sct.root) {
        // The enlarged tree is charged with its own leaves.
        leaves_for_step_ = static_cast<int>(view.leaves_in(root).size());
      } else {
        leaves_for_step_ = leaves;
      }
      bool covers = covers_subtree(view, root, b);
      if (!covers) falsify("cover does not cover its tree", static_cast<int>(trace_.steps.size()), "v=" + std::to_string(root));
      const bool at_root = root == view.root();
      NodeId r = execute(b, rule, root, covers, leaves_for_step_, pairs, unmatched, at_root);
      const CoverStep& step = trace_.steps.back();
      if (options_.mode == CoverMode::listing && step.kind == StepKind::primal_dual) {
        for (const LinkUse& u : b) kept_.push_back(u);
        restart();
        continue;
      }
      enforce_independence(r);
      if (state_.node_count() >= before) stall(view);
    }
    return finish();
  }

 private:
  int mint(NodeId node, CreditSource source, int step) {
    CreditUnit u;
    u.id = static_cast<int>(trace_.units.size());
    u.node = node;
    u.source = source;
    u.created_by = step;
    trace_.units.push_back(u);
    holder_[node] = u.id;
    return u.id;
  }

  void falsify(std::string kind, int step, std::string detail) {
    trace_.falsifications.push_back(Falsification{std::move(kind), step, std::move(detail)});
  }

  // Contracts `uses`, charges the credit of every node that disappears or
  // absorbs others, and records the step. Returns the new representative.
  NodeId execute(const std::vector<LinkUse>& uses, StepCase rule,
                 NodeId root, bool covers, int leaves, int pairs, int unmatched, bool at_root) {
    CoverStep step;
    step.index = static_cast<int>(trace_.steps.size());
    step.round = trace_.restarts;
    step.rule = rule;
    step.links = uses;
    step.covers = covers;
    step.leaves = leaves;
    step.matched = pairs;
    step.unmatched = unmatched;
    std::set<NodeId> touched;
    for (const LinkUse& u : uses)
      for (NodeId x : state_.path(u.u, u.v)) touched.insert(x);
    int credit = 0;
    for (NodeId x : touched) {
      int unit = holder_[x];
      if (unit < 0) continue;
      // A pair holds w thirds in total. Taken alone, a member leaves a full
      // unit with its partner, which is unmatched from then on.
      int counted = 3;
      if (auto it = shares_.partner.find(x); it != shares_.partner.end() && !state_.is_compound(x)) {
        auto [y, w] = it->second;
        counted = touched.count(y) ? (x < y ? 3 : w - 3) : w - 3;
      }
      if (trace_.units[unit].spent_by >= 0) {
        falsify("credit spent twice", step.index, "node " + std::to_string(x));
      }
      trace_.units[unit].spent_by = step.index;
      holder_[x] = -1;
      step.consumed.push_back(Consumption{unit, counted});
      credit += counted;
    }
    for (NodeId x : touched) {
      if (auto it = shares_.partner.find(x); it != shares_.partner.end()) {
        shares_.partner.erase(it->second.first);
        shares_.partner.erase(it);
      }
    }
    for (const LinkUse& u : uses) state_.contract(u);
    NodeId r = state_.rep(*touched.begin());
    for (NodeId x : touched) {
      if (x == r) continue;
      auto& m = members_[x];
      members_[r].insert(members_[r].end(), m.begin(), m.end());
      m.clear();
      m.shrink_to_fit();
    }
    step.root = root == kNoNode ? r : root;
    step.credit3 = credit;
    step.cost3 = 3 * static_cast<int>(uses.size());
    if (rule == StepCase::independence) {
      step.kind = StepKind::independence;
    } else if (at_root) {
      step.kind = StepKind::root_final;
    } else if (credit >= step.cost3 + 3) {
      step.kind = StepKind::extra_credit;
    } else {
      step.kind = StepKind::primal_dual;
    }
    if ((rule == StepCase::pattern || rule == StepCase::merged_paths) &&
        step.kind != StepKind::extra_credit) {
      falsify("proposal lacks extra credit", step.index,
              "credit " + std::to_string(credit) + " cost " + std::to_string(step.cost3));
    }
    if (credit < step.cost3) {
      falsify("credit shortfall", step.index,
              std::string(to_string(rule)) + " v=" + std::to_string(step.root) + " credit " +
                  std::to_string(credit) + " cost " + std::to_string(step.cost3) +
                  (unresolved_ > 0 ? "; stem without a partner" : ""));
    }
    trace_.steps.push_back(step);
    CoverStep& s = trace_.steps.back();
    if (s.kind == StepKind::extra_credit || s.kind == StepKind::independence) {
      mint(r, CreditSource::banked, s.index);
      s.banked3 = 3;
    } else if (s.kind == StepKind::primal_dual) {
      mint(r, CreditSource::deferred, s.index);
    }
    for (const LinkUse& u : uses) applied_.push_back(u);
    return r;
  }

  // Members of C u U: compound nodes and leaves not matched in the current
  // matching. The root holds no credit, so it never takes part.
  bool in_cl(NodeId x) const {
    if (x == state_.root()) return false;
    return state_.is_compound(x) || (state_.is_leaf(x) && !shares_.partner.count(x));
  }

  // First member of C u L after r on the current path of a link at r's set,
  // if any.
  std::optional<LinkUse> violation_at(NodeId r) {
    auto scan = [&](LinkId id) -> std::optional<LinkUse> {
      const Link& l = base_.link(id);
      NodeId a = state_.rep(l.u);
      NodeId b = state_.rep(l.v);
      if (a == b) return std::nullopt;
      std::vector<NodeId> p = state_.path(a, b);
      auto at = std::find(p.begin(), p.end(), r);
      if (at == p.end()) return std::nullopt;
      // Nearest member on either side of r.
      std::optional<LinkUse> best;
      std::size_t dist = 0;
      std::size_t i = static_cast<std::size_t>(at - p.begin());
      for (std::size_t j = i + 1; j < p.size(); ++j) {
        if (in_cl(p[j])) {
          best = LinkUse{id, r, p[j]};
          dist = j - i;
          break;
        }
      }
      for (std::size_t j = i; j-- > 0;) {
        if (in_cl(p[j])) {
          if (!best || i - j < dist) best = LinkUse{id, r, p[j]};
          break;
        }
      }
      return best;
    };
    if (state_.is_leaf(r)) {
      for (NodeId x : members_[r])
        for (LinkId id : incident_[x])
          if (auto v = scan(id)) return v;
      return std::nullopt;
    }
    const RootedTree& t = base_.tree();
    for (const Link& l : base_.links()) {
      NodeId a = state_.rep(l.u);
      NodeId b = state_.rep(l.v);
      if (a == b) continue;
      bool ia = t.is_ancestor(r, a);
      bool ib = t.is_ancestor(r, b);
      if (!ia && !ib) continue;
      if (auto v = scan(l.id)) return v;
    }
    return std::nullopt;
  }

  void enforce_independence(NodeId r) {
    std::vector<NodeId> work{r};
    while (!work.empty() && state_.node_count() > 1) {
      NodeId x = state_.rep(work.back());
      work.pop_back();
      if (!in_cl(x) || !state_.is_compound(x)) continue;
      if (auto v = violation_at(x)) {
        NodeId nr = execute({*v}, StepCase::independence, kNoNode, true, -1, -1, -1, false);
        work.push_back(nr);
      }
    }
  }

  // No progress in an iteration: cover everything left by up-links.
  void stall(const TreeView& view) {
    falsify("no progress", static_cast<int>(trace_.steps.size()), "covering remaining tree by up-links");
    TreeView now(state_);
    std::vector<LinkUse> b;
    std::unordered_set<std::uint64_t> seen;
    for (NodeId leaf : now.leaves()) {
      const Link& l = base_.link(up_link(now, leaf));
      if (seen.insert(pair_key(l.u, l.v)).second) b.push_back(LinkUse{l.id, l.u, l.v});
    }
    (void)view;
    shares_ = PairShares{};
    execute(b, StepCase::root, now.root(), covers_subtree(now, now.root(), b),
            static_cast<int>(now.leaves().size()), 0, static_cast<int>(now.leaves().size()), true);
  }

  void restart() {
    ++trace_.restarts;
    std::set<std::tuple<LinkId, NodeId, NodeId>> keep;
    for (const LinkUse& u : kept_) keep.emplace(u.origin, u.u, u.v);
    for (CoverStep& s : trace_.steps) {
      if (s.kind == StepKind::primal_dual && s.root != base_.tree().root()) continue;
      bool all_kept = std::all_of(s.links.begin(), s.links.end(), [&](const LinkUse& u) {
        return keep.count({u.origin, u.u, u.v}) > 0;
      });
      if (!all_kept) s.discarded = true;
    }
    for (CreditUnit& u : trace_.units)
      if (u.spent_by == -1) u.spent_by = -2;  // void
    state_ = ContractionState(base_);
    shares_ = PairShares{};
    applied_.clear();
    std::fill(holder_.begin(), holder_.end(), -1);
    for (NodeId x = 0; x < base_.node_count(); ++x) members_[x] = {x};
    for (const LinkUse& u : kept_) {
      std::vector<NodeId> p = state_.path(u.u, u.v);
      state_.contract(u);
      NodeId r = state_.rep(u.u);
      for (NodeId x : p) {
        if (x == r) continue;
        members_[r].insert(members_[r].end(), members_[x].begin(), members_[x].end());
        members_[x].clear();
      }
      applied_.push_back(u);
    }
    for (NodeId x : state_.nodes()) {
      if (state_.is_compound(x)) {
        mint(x, CreditSource::deferred, static_cast<int>(trace_.steps.size()) - 1);
      } else if (state_.is_leaf(x)) {
        mint(x, CreditSource::leaf, -1);
      }
    }
    for (NodeId x : state_.nodes())
      if (state_.is_compound(x)) enforce_independence(x);
  }

  CoverResult finish() {
    CoverResult r;
    std::set<LinkId> ids;
    for (const LinkUse& u : applied_) {
      r.uses.push_back(u);
      ids.insert(u.origin);
    }
    r.solution.links.assign(ids.begin(), ids.end());
    if (!is_feasible(base_, r.solution)) falsify("infeasible output", -1, "");
    r.trace = std::move(trace_);
    return r;
  }

  const Instance& base_;
  CoverOptions options_;
  ContractionState state_;
  CoverTrace trace_;
  std::vector<int> holder_;
  std::vector<std::vector<NodeId>> members_;
  std::vector<std::vector<LinkId>> incident_;
  std::vector<LinkUse> applied_;
  std::vector<LinkUse> kept_;
  PairShares shares_;
  int unresolved_ = 0;
  int leaves_for_step_ = 0;
};

}  // namespace

CoverResult cover(const Instance& instance, const CoverOptions& options) {
  if (!instance_feasible(instance)) throw InfeasibleError("some tree edge is covered by no link");
  Runner runner(instance, options);
  return runner.run();
}

AuditReport audit_ledger(const CoverTrace& trace, std::optional<int> opt) {
  AuditReport rep;
  auto violation = [&](const std::string& s) { rep.violations.push_back(s); };
  std::map<int, int> spent_count;
  for (const CoverStep& s : trace.steps) {
    int credit = 0;
    for (const Consumption& c : s.consumed) {
      if (c.unit < 0 || c.unit >= static_cast<int>(trace.units.size())) {
        violation("step " + std::to_string(s.index) + ": unknown credit unit " + std::to_string(c.unit));
        continue;
      }
      const CreditUnit& u = trace.units[c.unit];
      if (++spent_count[c.unit] == 2) {
        violation("credit unit " + std::to_string(c.unit) + " at node " + std::to_string(u.node) +
                  " spent twice (second time in step " + std::to_string(s.index) + ")");
      }
      if (u.created_by >= s.index) {
        violation("step " + std::to_string(s.index) + ": unit " + std::to_string(c.unit) +
                  " consumed before it was created");
      }
      if (c.counted3 > u.amount3 || c.counted3 < 0) {
        violation("step " + std::to_string(s.index) + ": unit " + std::to_string(c.unit) +
                  " counted beyond its amount");
      }
      credit += c.counted3;
    }
    if (credit != s.credit3) {
      violation("step " + std::to_string(s.index) + ": recorded credit " + std::to_string(s.credit3) +
                " but consumed " + std::to_string(credit));
    }
    if (s.cost3 != 3 * static_cast<int>(s.links.size())) {
      violation("step " + std::to_string(s.index) + ": cost does not match its links");
    }
    if (s.credit3 < s.cost3) {
      violation("step " + std::to_string(s.index) + " (" + to_string(s.kind) + ", v=" +
                std::to_string(s.root) + "): credit " + std::to_string(s.credit3) + " < cost " +
                std::to_string(s.cost3));
    }
    if (s.kind == StepKind::extra_credit || s.kind == StepKind::independence) {
      if (s.banked3 != 3) violation("step " + std::to_string(s.index) + ": extra credit must bank 3");
      if (s.credit3 < s.cost3 + 3) {
        violation("step " + std::to_string(s.index) + ": banked credit not backed by surplus");
      }
    } else if (s.banked3 != 0) {
      violation("step " + std::to_string(s.index) + ": only extra-credit steps bank credit");
    }
    if (!s.covers) violation("step " + std::to_string(s.index) + ": links do not cover T_" + std::to_string(s.root));
  }
  for (const CreditUnit& u : trace.units) {
    int times = spent_count.count(u.id) ? spent_count[u.id] : 0;
    if (u.spent_by >= 0 && times == 0) {
      violation("credit unit " + std::to_string(u.id) + " marked spent but no step consumed it");
    }
    if (u.spent_by < 0 && times > 0 && u.spent_by != -2) {
      violation("credit unit " + std::to_string(u.id) + " consumed but still marked outstanding");
    }
  }
  // Conservation: created = consumed + outstanding (+ voided by restarts).
  long long created = 0;
  long long consumed = 0;
  long long outstanding = 0;
  for (const CreditUnit& u : trace.units) {
    created += u.amount3;
    if (u.spent_by >= 0)
      consumed += u.amount3;
    else
      outstanding += u.amount3;
  }
  if (created != consumed + outstanding) violation("credit not conserved");
  // Links of different kept steps are disjoint.
  std::set<std::tuple<LinkId, NodeId, NodeId>> seen;
  for (const CoverStep& s : trace.steps) {
    if (s.discarded) continue;
    for (const LinkUse& u : s.links) {
      if (!seen.emplace(u.origin, std::min(u.u, u.v), std::max(u.u, u.v)).second) {
        violation("step " + std::to_string(s.index) + " reuses link " + std::to_string(u.origin));
      }
    }
  }
  if (opt && trace.initial_cover3 > 4LL * *opt) {
    violation("leaf cover weight " + std::to_string(trace.initial_cover3) + "/3 exceeds 4/3 of OPT=" +
              std::to_string(*opt));
  }
  return rep;
}

}  // namespace tap
