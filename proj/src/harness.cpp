#include "tap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <queue>
#include <thread>

namespace tap {

int Rng::uniform(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<int>(x % span);
}

bool Rng::coin(double p) {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p;
}

const char* to_string(Shape s) {
  switch (s) {
    case Shape::random: return "random";
    case Shape::caterpillar: return "caterpillar";
    case Shape::balanced: return "balanced";
    case Shape::gadget_chain: return "gadget-chain";
  }
  return "?";
}

std::optional<Shape> parse_shape(const std::string& s) {
  for (Shape x : {Shape::random, Shape::caterpillar, Shape::balanced, Shape::gadget_chain})
    if (s == to_string(x)) return x;
  return std::nullopt;
}

namespace {

using Edges = std::vector<std::pair<NodeId, NodeId>>;

Edges orient(int n, const std::vector<std::vector<int>>& adj) {
  Edges out;
  std::vector<bool> seen(n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : adj[v]) {
      if (seen[u]) continue;
      seen[u] = true;
      out.emplace_back(v, u);
      stack.push_back(u);
    }
  }
  return out;
}

Edges pruefer_tree(int n, Rng& rng) {
  if (n == 1) return {};
  if (n == 2) return {{0, 1}};
  std::vector<int> code(n - 2);
  for (int& c : code) c = rng.uniform(0, n - 1);
  std::vector<int> degree(n, 1);
  for (int c : code) ++degree[c];
  std::priority_queue<int, std::vector<int>, std::greater<>> leaves;
  for (int v = 0; v < n; ++v)
    if (degree[v] == 1) leaves.push(v);
  std::vector<std::vector<int>> adj(n);
  auto join = [&](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int c : code) {
    int leaf = leaves.top();
    leaves.pop();
    join(leaf, c);
    if (--degree[c] == 1) leaves.push(c);
  }
  int a = leaves.top();
  leaves.pop();
  join(a, leaves.top());
  return orient(n, adj);
}

Edges caterpillar_tree(int n, Rng& rng) {
  Edges out;
  int spine = std::max(1, n / 3);
  for (int i = 1; i < spine; ++i) out.emplace_back(i - 1, i);
  for (int i = spine; i < n; ++i) out.emplace_back(rng.uniform(0, spine - 1), i);
  return out;
}

Edges balanced_tree(int n, Rng& rng) {
  int d = rng.uniform(2, 3);
  Edges out;
  for (int i = 1; i < n; ++i) out.emplace_back((i - 1) / d, i);
  return out;
}

// Random walk down from v for at most `steps` steps.
NodeId descend(const RootedTree& t, NodeId v, int steps, Rng& rng) {
  for (int i = 0; i < steps; ++i) {
    auto ch = t.children(v);
    if (ch.empty()) break;
    v = ch[rng.uniform(0, static_cast<int>(ch.size()) - 1)];
  }
  return v;
}

NodeId ascend(const RootedTree& t, NodeId v, int steps) {
  for (int i = 0; i < steps && v != t.root(); ++i) v = t.parent(v);
  return v;
}

Instance gadget_chain(int n) {
  const int k = std::max(1, (n - 1) / 6);
  Edges edges;
  Edges links;
  NodeId next = 1;
  NodeId spine_parent = 0;
  for (int i = 0; i < k; ++i) {
    NodeId s = next++, v = next++, a = next++, t = next++, b = next++, c = next++;
    edges.insert(edges.end(), {{spine_parent, s}, {s, v}, {v, a}, {v, t}, {t, b}, {t, c}});
    links.insert(links.end(), {{a, b}, {c, v}, {t, 0}});
    spine_parent = s;
  }
  return build_instance(next, 0, edges, links);
}

}  // namespace

Instance generate(const GenParams& p) {
  if (p.n < 1) throw Error("generator needs at least one node");
  if (p.shape == Shape::gadget_chain) return gadget_chain(p.n);
  Rng rng(p.seed);
  Edges edges;
  switch (p.shape) {
    case Shape::random: edges = pruefer_tree(p.n, rng); break;
    case Shape::caterpillar: edges = caterpillar_tree(p.n, rng); break;
    case Shape::balanced: edges = balanced_tree(p.n, rng); break;
    case Shape::gadget_chain: break;
  }
  RootedTree t = RootedTree::from_edges(p.n, 0, edges);
  Edges links;
  const std::vector<NodeId> leaves = t.leaves();
  auto any_leaf = [&] { return leaves[rng.uniform(0, static_cast<int>(leaves.size()) - 1)]; };
  if (p.n > 1) {
    for (int i = 0; i < p.m; ++i) {
      NodeId u = p.leaf_links_only ? any_leaf() : rng.uniform(0, p.n - 1);
      NodeId v;
      if (p.leaf_links_only) {
        v = any_leaf();
      } else if (rng.coin(0.5)) {
        v = rng.uniform(0, p.n - 1);
      } else {
        v = descend(t, ascend(t, u, rng.uniform(1, 3)), rng.uniform(0, 3), rng);
      }
      if (u != v) links.emplace_back(u, v);
    }
  }
  // Repair: deepest uncovered edges first, each by a link from a leaf below
  // to an ancestor above.
  std::vector<int> diff(p.n, 0);
  for (auto [u, v] : links) {
    ++diff[u];
    ++diff[v];
    diff[t.lca(u, v)] -= 2;
  }
  const auto& pre = t.preorder();
  std::vector<int> load(diff);
  for (auto it = pre.rbegin(); it != pre.rend(); ++it)
    if (*it != t.root()) load[t.parent(*it)] += load[*it];
  std::vector<bool> covered(p.n, false);
  for (NodeId x = 0; x < p.n; ++x) covered[x] = x == t.root() || load[x] > 0;
  for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
    NodeId c = *it;
    if (covered[c]) continue;
    NodeId low = descend(t, c, p.n, rng);
    NodeId high = ascend(t, c, rng.uniform(1, 3));
    if (p.leaf_links_only) {
      std::vector<NodeId> outside;
      for (NodeId l : leaves)
        if (!t.is_ancestor(c, l)) outside.push_back(l);
      high = outside.empty() ? t.root() : outside[rng.uniform(0, static_cast<int>(outside.size()) - 1)];
    }
    links.emplace_back(low, high);
    const NodeId top = t.lca(low, high);
    for (NodeId x : t.path(low, high))
      if (x != top) covered[x] = true;
  }
  return build_instance(p.n, 0, edges, links);
}

std::vector<std::string> check_instance(const Instance& instance, const CoverOptions& cover_options,
                                        const OracleOptions& oracle_options, bool run_oracle,
                                        FuzzCase* record) {
  std::vector<std::string> failures;
  try {
    CoverResult res = cover(instance, cover_options);
    const int alg = static_cast<int>(res.solution.size());
    std::optional<int> opt;
    if (run_oracle) {
      OracleResult o = exact_opt(instance, oracle_options);
      if (o.status == OracleStatus::optimal) opt = o.value;
    }
    if (!is_feasible(instance, res.solution)) failures.push_back("infeasible");
    // |cover| <= ceil(4 OPT / 3)
    if (opt && 3 * alg > 4 * *opt + 2) {
      failures.push_back("ratio: " + std::to_string(alg) + " > ceil(4/3 * " + std::to_string(*opt) + ")");
    }
    const int base = static_cast<int>(baseline_two_approx(instance).size());
    if (opt && base > 2 * *opt) {
      failures.push_back("baseline: " + std::to_string(base) + " > 2 * " + std::to_string(*opt));
    }
    AuditReport audit = audit_ledger(res.trace, opt);
    for (const std::string& v : audit.violations) failures.push_back("audit: " + v);
    if (record) {
      record->n = instance.node_count();
      record->m = instance.link_count();
      record->alg = alg;
      record->opt = opt ? *opt : -1;
      record->baseline = base;
      record->falsifications = static_cast<int>(res.trace.falsifications.size());
      record->steps = static_cast<int>(res.trace.steps.size());
      record->extra_credit_steps = static_cast<int>(
          std::count_if(res.trace.steps.begin(), res.trace.steps.end(),
                        [](const CoverStep& s) { return s.kind == StepKind::extra_credit; }));
    }
  } catch (const std::exception& e) {
    failures.push_back(std::string("error: ") + e.what());
  }
  return failures;
}

namespace {

Instance without_link(const Instance& in, LinkId drop) {
  Edges edges;
  for (NodeId x = 0; x < in.node_count(); ++x)
    if (x != in.tree().root()) edges.emplace_back(in.tree().parent(x), x);
  Edges links;
  for (const Link& l : in.links())
    if (l.id != drop && !l.is_shadow()) links.emplace_back(l.u, l.v);
  return build_instance(in.node_count(), in.tree().root(), edges, links);
}

Instance without_leaf(const Instance& in, NodeId leaf) {
  auto id = [&](NodeId x) { return x < leaf ? x : x - 1; };
  Edges edges;
  for (NodeId x = 0; x < in.node_count(); ++x)
    if (x != in.tree().root() && x != leaf) edges.emplace_back(id(in.tree().parent(x)), id(x));
  Edges links;
  for (const Link& l : in.links())
    if (!l.is_shadow() && l.u != leaf && l.v != leaf) links.emplace_back(id(l.u), id(l.v));
  return build_instance(in.node_count() - 1, id(in.tree().root()), edges, links);
}

std::string category(const std::string& failure) { return failure.substr(0, failure.find(':')); }

}  // namespace

Instance minimize_instance(const Instance& instance, const std::function<bool(const Instance&)>& fails) {
  Instance cur = instance;
  int budget = 4000;
  bool changed = true;
  while (changed && budget > 0) {
    changed = false;
    for (LinkId id = cur.link_count() - 1; id >= 0 && budget > 0; --id) {
      if (cur.link(id).is_shadow()) continue;
      Instance next = without_link(cur, id);
      --budget;
      if (instance_feasible(next) && fails(next)) {
        cur = std::move(next);
        changed = true;
      }
    }
    for (NodeId leaf : cur.tree().leaves()) {
      if (budget <= 0 || cur.node_count() <= 2) break;
      Instance next = without_leaf(cur, leaf);
      --budget;
      if (instance_feasible(next) && fails(next)) {
        cur = std::move(next);
        changed = true;
        break;  // leaf ids shifted
      }
    }
  }
  return cur;
}

FuzzReport fuzz(const FuzzOptions& o) {
  FuzzReport report;
  report.cases.resize(o.count);
  Rng seeder(o.seed);
  for (int i = 0; i < o.count; ++i) {
    FuzzCase& c = report.cases[i];
    c.index = i;
    c.params.seed = seeder.next();
    Rng local(c.params.seed);
    c.params.n = local.uniform(o.min_n, o.max_n);
    const int hi_m = std::max(1, std::min(o.max_m, 4 * c.params.n));
    c.params.m = local.uniform(std::min(c.params.n, hi_m), hi_m);
    c.params.shape = static_cast<Shape>(i % 4);
  }
  std::atomic<int> next{0};
  std::mutex io;
  auto work = [&] {
    for (int i = next++; i < o.count; i = next++) {
      FuzzCase& c = report.cases[i];
      Instance inst = generate(c.params);
      const bool oracle = inst.node_count() <= o.oracle_max_n;
      c.failures = check_instance(inst, o.cover, o.oracle, oracle, &c);
      if (c.failures.empty() || o.out_dir.empty()) continue;
      Instance small = inst;
      if (o.minimize) {
        const std::string want = category(c.failures.front());
        small = minimize_instance(inst, [&](const Instance& x) {
          for (const std::string& f : check_instance(x, o.cover, o.oracle, true))
            if (category(f) == want) return true;
          return false;
        });
      }
      std::string text = serialize(small);
      std::string header;
      for (const std::string& f : check_instance(small, o.cover, o.oracle, true)) header += "# " + f + "\n";
      text.insert(text.find('\n') + 1, header);
      std::lock_guard lock(io);
      std::filesystem::create_directories(o.out_dir);
      c.counterexample = o.out_dir + "/case-" + std::to_string(c.params.seed) + ".tap";
      std::ofstream(c.counterexample) << text;
    }
  };
  int threads = o.threads > 0 ? o.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max(1, o.count));
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();

  for (const FuzzCase& c : report.cases) {
    if (c.opt >= 0) {
      ++report.oracle_solved;
      if (c.opt > 0) report.worst_ratio = std::max(report.worst_ratio, static_cast<double>(c.alg) / c.opt);
    }
    bool audit = false;
    for (const std::string& f : c.failures) {
      std::string k = category(f);
      if (k == "ratio") ++report.ratio_violations;
      if (k == "infeasible") ++report.infeasible_outputs;
      if (k == "error") ++report.errors;
      if (k == "audit") audit = true;
    }
    if (audit) ++report.audit_failures;
  }
  return report;
}

std::vector<BenchRow> bench(const std::vector<std::pair<int, int>>& sizes, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  auto ms = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  std::vector<BenchRow> rows;
  for (auto [n, m] : sizes) {
    Instance inst = generate(GenParams{n, m, Shape::random, false, seed});
    ContractionState state(inst);
    TreeView view(state);
    auto t0 = Clock::now();
    std::vector<StemRecord> stems = find_stems(view);
    GoldenTicketMap gt = golden_tickets(view, stems);
    auto t1 = Clock::now();
    EdgeCoverResult ec = min_weight_edge_cover(leaf_cover_graph(view, gt));
    auto t2 = Clock::now();
    CoverResult res = cover(inst);
    auto t3 = Clock::now();
    (void)ec;
    (void)res;
    rows.push_back({n, m, "golden-tickets", ms(t0, t1)});
    rows.push_back({n, m, "edge-cover", ms(t1, t2)});
    rows.push_back({n, m, "cover", ms(t2, t3)});
  }
  return rows;
}

}  // namespace tap
