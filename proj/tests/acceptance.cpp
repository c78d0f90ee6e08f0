// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance <tap binary> <two_stems instance> [work dir]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "brute.hpp"
#include "tap/harness.hpp"

using namespace tap;
namespace fs = std::filesystem;

namespace {

int failed = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << "criterion " << id << " " << (ok ? "PASS" : "FAIL") << " " << what << ": " << detail << std::endl;
  if (!ok) ++failed;
}

std::pair<NodeId, NodeId> key(NodeId p, NodeId q) { return {std::min(p, q), std::max(p, q)}; }

FuzzOptions campaign(int count, std::uint64_t seed, int oracle_max_n) {
  FuzzOptions o;
  o.count = count;
  o.seed = seed;
  o.min_n = 4;
  o.max_n = 40;
  o.max_m = 160;
  o.threads = 0;
  o.oracle_max_n = oracle_max_n;
  o.minimize = false;
  return o;
}

// Instances of a campaign, regenerated from their recorded parameters.
Instance instance_of(const FuzzCase& c) { return generate(c.params); }

bool internal(const Instance& in, NodeId x) { return !in.tree().is_leaf(x); }

std::vector<NodeId> subtree_nodes(const Instance& in, NodeId w) {
  std::vector<NodeId> out{w};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (NodeId c : in.tree().children(out[i])) out.push_back(c);
  return out;
}

// Some current leaf outside T_s has a link into T_s.
bool leaf_reaches(const TreeView& view, NodeId s) {
  for (const CurrentLink& cl : view.links()) {
    bool in_u = view.in_subtree(s, cl.u), in_v = view.in_subtree(s, cl.v);
    if (in_u == in_v) continue;
    NodeId out = in_u ? cl.v : cl.u;
    if (view.is_leaf(out) && !view.is_compound(out)) return true;
  }
  return false;
}

// Contracting the matching leaves the root with a single leaf child.
bool closes_into_root(const TreeView& view, const std::vector<LinkUse>& matching) {
  ContractionState after = view.state();
  for (const LinkUse& u : matching) after.contract(u);
  const NodeId root = after.rep(after.root());
  if (after.children(root).size() != 1) return false;
  const NodeId only = after.children(root)[0];
  return after.is_leaf(only) && !view.is_leaf(only);
}

void feasibility_and_ratio(const fs::path& work) {
  // 1
  FuzzReport big = fuzz(campaign(10000, 101, -1));
  report(1, big.infeasible_outputs == 0 && big.errors == 0 && big.cases.size() >= 10000, "feasibility",
         std::to_string(big.cases.size() - big.infeasible_outputs - big.errors) + "/" +
             std::to_string(big.cases.size()) + " feasible, " + std::to_string(big.errors) + " errors");

  FuzzOptions o = campaign(4000, 11, 40);
  FuzzReport r = fuzz(o);
  // 2: violations are minimized and written for re-running.
  std::vector<std::string> written;
  for (const FuzzCase& c : r.cases) {
    bool ratio = std::any_of(c.failures.begin(), c.failures.end(),
                             [](const std::string& f) { return f.rfind("ratio", 0) == 0; });
    if (!ratio) continue;
    auto still = [&](const Instance& x) {
      for (const std::string& f : check_instance(x, o.cover, o.oracle, true))
        if (f.rfind("ratio", 0) == 0) return true;
      return false;
    };
    Instance small = minimize_instance(instance_of(c), still);
    CoverResult res = cover(small, o.cover);
    std::string text = serialize(small);
    std::string header;
    for (const std::string& f : check_instance(small, o.cover, o.oracle, true)) header += "# " + f + "\n";
    for (const CoverStep& s : res.trace.steps)
      header += "# step " + std::to_string(s.index) + " " + to_string(s.kind) + "/" + to_string(s.rule) +
                " credit " + std::to_string(s.credit3) + " cost " + std::to_string(s.cost3) + "\n";
    text.insert(text.find('\n') + 1, header);
    fs::create_directories(work / "counterexamples");
    fs::path p = work / "counterexamples" / ("ratio-" + std::to_string(c.params.seed) + ".tap");
    std::ofstream(p) << text;
    written.push_back(p.string());
  }
  std::ostringstream d2;
  d2 << r.oracle_solved << " oracle-solved, worst ratio " << r.worst_ratio << ", " << r.ratio_violations
     << " violations";
  for (const std::string& p : written) d2 << "; counterexample " << p;
  d2 << "; ledger audit findings on " << r.audit_failures << " instances";
  report(2, r.oracle_solved >= 2000 && r.ratio_violations == 0, "ratio |cover| <= ceil(4 OPT/3)", d2.str());

  // 3
  int base_bad = 0;
  for (const FuzzCase& c : r.cases)
    for (const std::string& f : c.failures)
      if (f.rfind("baseline", 0) == 0) ++base_bad;
  report(3, base_bad == 0 && r.oracle_solved >= 2000, "baseline <= 2 OPT",
         std::to_string(base_bad) + " violations over " + std::to_string(r.oracle_solved) + " instances");

  // 4 and 5 on the same oracle-solved instances.
  int lb_bad = 0, lemma_bad = 0, checked = 0;
  std::string lemma_witness;
  for (const FuzzCase& c : r.cases) {
    if (c.opt < 0) continue;
    Instance in = instance_of(c);
    OracleResult opt = exact_opt(in, o.oracle);
    if (opt.status != OracleStatus::optimal) continue;
    ++checked;
    int matched = 0, unmatched = 0, internal_deg = 0;
    for (const LinkUse& u : opt.shadow_minimal) {
      bool lu = in.tree().is_leaf(u.u), lv = in.tree().is_leaf(u.v);
      if (lu && lv) ++matched;
      else if (lu || lv) ++unmatched;
    }
    for (NodeId x = 0; x < in.node_count(); ++x)
      if (internal(in, x)) internal_deg += opt.degree[x];
    if (4 * matched + 3 * unmatched + internal_deg > 4 * opt.value) ++lb_bad;

    ContractionState st(in);
    TreeView view(st);
    GoldenTicketMap gt = golden_tickets(view, find_stems(view));
    EdgeCoverResult ec = min_weight_edge_cover(leaf_cover_graph(view, gt));
    long long w3 = 0;
    for (const LinkUse& p : ec.pairs) w3 += gt.weight3(p.origin);
    const long long u = static_cast<long long>(ec.unmatched_nodes.size());
    // 3 w(M) + 9 |U| <= 12 OPT with w(M) counted in thirds, i.e. w3(M) + 3|U| <= 4 OPT.
    if (w3 + 3 * u > 4LL * opt.value) {
      if (++lemma_bad == 1) {
        std::ostringstream wit;
        wit << "seed " << c.params.seed << " w3(M)=" << w3 << " |U|=" << u << " OPT=" << opt.value;
        for (const LinkUse& p : ec.pairs) {
          if (gt.value(p.origin) == 0) continue;
          wit << "; gt(" << p.u << "-" << p.v << ")=" << gt.value(p.origin) << " witness T_"
              << gt.witness[p.origin] << " {";
          for (NodeId y : subtree_nodes(in, gt.witness[p.origin])) wit << " " << y;
          wit << " }";
        }
        lemma_witness = wit.str();
      }
    }
  }
  report(4, lb_bad == 0 && checked >= 2000, "lower bound claim 4|M_F|+3|U_F|+sum deg_F(x) <= 4 OPT",
         std::to_string(lb_bad) + " violations over " + std::to_string(checked) + " optima");
  report(5, lemma_bad == 0 && checked >= 2000, "lower bound lemma 3w(M)+9|U| <= 12 OPT",
         std::to_string(lemma_bad) + " violations over " + std::to_string(checked) + " instances" +
             (lemma_witness.empty() ? "" : "; first: " + lemma_witness));
}

void golden_ticket_soundness() {
  int instances = 0, ticketed_links = 0, optima_checked = 0, bad = 0;
  std::string first;
  Rng rng(6);
  for (std::uint64_t seed = 1; instances < 600 && seed < 20000; ++seed) {
    const int n = rng.uniform(5, 13);
    GenParams p{n, rng.uniform(n, 2 * n), static_cast<Shape>(seed % 3), seed % 2 == 0, seed};
    if (seed % 7 == 0) p = GenParams{13, 0, Shape::gadget_chain, false, seed};
    Instance in = generate(p);
    ContractionState st(in);
    TreeView view(st);
    GoldenTicketMap gt = golden_tickets(view, find_stems(view));
    OptimaList list = enumerate_shadow_minimal_optima(in, 2000);
    if (list.status != OracleStatus::optimal) continue;
    ++instances;
    for (LinkId e : gt.ticketed()) {
      ++ticketed_links;
      const Link& l = in.link(e);
      const int need = gt.value(e);
      std::vector<NodeId> inside;
      for (NodeId y : subtree_nodes(in, gt.witness[e]))
        if (internal(in, y)) inside.push_back(y);
      for (const auto& f : list.optima) {
        bool contains = std::any_of(f.begin(), f.end(), [&](const LinkUse& u) { return key(u.u, u.v) == key(l.u, l.v); });
        if (!contains) continue;
        ++optima_checked;
        std::vector<int> deg = degrees(in, f);
        int ones = 0;
        bool ok = false;
        for (NodeId y : inside) {
          if (deg[y] >= need) ok = true;
          if (deg[y] >= 1) ++ones;
        }
        if (need == 2 && ones >= 2) ok = true;
        if (!ok && bad++ == 0) {
          first = "seed " + std::to_string(seed) + " link " + std::to_string(l.u) + "-" + std::to_string(l.v) +
                  " gt " + std::to_string(need) + " pattern " + to_string(gt.pattern[e]);
        }
      }
    }
  }
  report(6, bad == 0 && instances >= 500, "golden-ticket soundness",
         std::to_string(instances) + " instances, " + std::to_string(ticketed_links) + " ticketed links, " +
             std::to_string(optima_checked) + " optima containing them, " + std::to_string(bad) + " violations" +
             (first.empty() ? "" : "; first: " + first));
}

void cover_claim() {
  int trees = 0, bad = 0;
  Rng rng(7);
  for (std::uint64_t seed = 1; seed <= 3000; ++seed) {
    const int n = rng.uniform(4, 40);
    Instance in = generate(GenParams{n, rng.uniform(n, 4 * n), static_cast<Shape>(seed % 4), seed % 3 == 0, seed});
    ContractionState st(in);
    // The initial tree and a few contracted ones.
    for (int round = 0; round < 4 && st.node_count() > 1; ++round) {
      TreeView view(st);
      NodeId v = minimally_leaf_closed(view);
      std::vector<LinkUse> ups;
      for (NodeId leaf : view.leaves_in(v)) {
        const Link& l = in.link(up_link(view, leaf));
        ups.push_back(LinkUse{l.id, l.u, l.v});
      }
      ++trees;
      if (!covers_subtree(view, v, ups)) ++bad;
      const auto& links = view.links();
      const CurrentLink& pick = links[rng.uniform(0, static_cast<int>(links.size()) - 1)];
      st.contract(LinkUse{pick.id, pick.u, pick.v});
    }
  }
  report(7, bad == 0, "cover claim up(L_v) covers T_v",
         std::to_string(trees - bad) + "/" + std::to_string(trees) + " minimally leaf-closed subtrees");
}

void matching_equivalence() {
  std::mt19937_64 rng(8);
  int bad = 0, graphs = 0;
  for (; graphs < 1000; ++graphs) {
    WeightedGraph g;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int v = 0; v < n; ++v) g.add_vertex();
    const double density = 0.2 + 0.6 * static_cast<double>(rng() % 100) / 100.0;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (static_cast<double>(rng() % 1000) / 1000.0 < density) g.add_edge(u, v, 1 + static_cast<long long>(rng() % 20));
    if (max_weight_matching(g).weight != brute::max_matching_weight(g)) ++bad;
    if (graphs % 2 && n < 10) {
      g.aux = g.add_vertex();
      for (int v = 0; v < g.aux; ++v)
        if (rng() % 4) g.add_edge(v, g.aux, 3);
    }
    long long want = brute::min_edge_cover_dp(g);
    try {
      if (min_weight_edge_cover(g).weight != want) ++bad;
    } catch (const InfeasibleError&) {
      if (want >= 0) ++bad;
    }
  }
  report(8, bad == 0, "matching and edge cover vs brute force",
         std::to_string(graphs) + " graphs, " + std::to_string(bad) + " mismatches");
}

void shadow_invariance() {
  int solved = 0, bad = 0;
  Rng rng(9);
  OracleOptions plain;
  plain.max_links = 60;
  plain.prune_shadows = false;
  for (std::uint64_t seed = 1; solved < 500 && seed < 5000; ++seed) {
    const int n = rng.uniform(4, 10);
    Instance in = generate(GenParams{n, rng.uniform(n, 2 * n), static_cast<Shape>(seed % 3), seed % 2 == 0, seed});
    OracleResult a = exact_opt(in, plain);
    OracleResult b = exact_opt(shadow_complete(in), plain);
    if (a.status != OracleStatus::optimal || b.status != OracleStatus::optimal) continue;
    ++solved;
    if (a.value != b.value) ++bad;
  }
  report(9, bad == 0 && solved >= 500, "shadow invariance",
         std::to_string(solved) + " instances, " + std::to_string(bad) + " differences");
}

void stem_matching_monotone() {
  int runs = 0, increases = 0, unusable = 0, fallback = 0, unsanctioned = 0, root_closures = 0;
  std::string first;
  Rng rng(10);
  std::uint64_t seed = 0;
  CoverOptions o;
  o.on_stem_matching = [&](const TreeView& view, const UsableMatching& um) {
    ++runs;
    if (um.weight_after > um.weight_before) ++increases;
    if (!um.proposals.empty() || is_usable(view, um.matching)) return;
    if (closes_into_root(view, um.matching)) {
      ++root_closures;
      return;
    }
    if (um.unresolved_twins.empty() && um.unresolved_stems.empty()) {
      if (unusable++ == 0) first = "seed " + std::to_string(seed);
      return;
    }
    // Unpaired stems are the allowed fallback only if no leaf can reach them.
    ++fallback;
    std::vector<NodeId> tops = um.unresolved_stems;
    for (LinkId t : um.unresolved_twins) {
      const Link& l = view.base().link(t);
      tops.push_back(view.lca(view.state().rep(l.u), view.state().rep(l.v)));
    }
    for (NodeId s : tops) {
      if (leaf_reaches(view, s)) {
        ++unsanctioned;
        if (first.empty()) first = "seed " + std::to_string(seed) + " stem " + std::to_string(s);
        break;
      }
    }
  };
  for (seed = 1; seed <= 4000; ++seed) {
    const int n = rng.uniform(4, 40);
    Shape shape = static_cast<Shape>(seed % 4);
    cover(generate(GenParams{n, rng.uniform(n, 4 * n), shape, seed % 2 == 1, seed}), o);
  }
  report(10, increases == 0 && unusable == 0 && unsanctioned == 0, "stem matching monotone and usable",
         std::to_string(runs) + " runs, " + std::to_string(increases) + " weight increases, " +
             std::to_string(unusable) + " unusable results, " + std::to_string(root_closures) +
             " closing into the root, " + std::to_string(fallback) +
             " with an unpaired stem (" + std::to_string(unsanctioned) + " of them reachable by a leaf)" +
             (first.empty() ? "" : "; first: " + first));
}

void scale(const std::string& tap, const fs::path& work) {
  fs::create_directories(work);
  const fs::path inst = work / "scale.tap";
  const fs::path csv = work / "bench.csv";
  std::ofstream(inst) << serialize(generate(GenParams{10000, 100000, Shape::random, false, 1}));
  auto t0 = std::chrono::steady_clock::now();
  int rc = std::system(("\"" + tap + "\" solve \"" + inst.string() + "\" > \"" + (work / "scale.sol").string() +
                        "\" 2>/dev/null")
                           .c_str());
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int rc2 = std::system(("\"" + tap + "\" bench --sizes 10000:100000 > \"" + csv.string() + "\"").c_str());
  int rows = 0;
  std::ifstream in(csv);
  for (std::string line; std::getline(in, line);) ++rows;
  std::ostringstream d;
  d << "solve n=10000 m=100000 in " << secs << " s (exit " << rc << "), bench CSV " << csv.string() << " with "
    << rows - 1 << " rows";
  report(11, rc == 0 && secs < 10.0 && rc2 == 0 && rows >= 4, "scale", d.str());
}

void two_stems(const std::string& path) {
  Instance in = read_instance_file(path);
  enum : NodeId { r = 0, s = 1, a = 2, b = 3, v = 4, x = 5, w = 6, u = 7, c = 8, d = 9 };
  std::vector<std::string> problems;
  OracleResult opt = exact_opt(in);
  if (opt.value != 4) problems.push_back("OPT " + std::to_string(opt.value));

  OptimaList list = enumerate_shadow_minimal_optima(in);
  std::set<std::pair<NodeId, NodeId>> want{key(a, b), key(w, s), key(c, d), key(v, u)};
  bool listed = false;
  for (const auto& f : list.optima) {
    std::set<std::pair<NodeId, NodeId>> got;
    for (const LinkUse& l : f) got.insert(key(l.u, l.v));
    if (got == want) listed = true;
  }
  if (!listed) {
    // Diagnose: the set is an optimum, but vu has the shadow xu that keeps it feasible.
    Instance full = shadow_complete(in);
    auto id_of = [&](NodeId p, NodeId q) {
      for (const Link& l : full.links())
        if (key(l.u, l.v) == key(p, q)) return l.id;
      return kNoLink;
    };
    Solution f{{id_of(a, b), id_of(w, s), id_of(c, d), id_of(v, u)}};
    Solution g{{id_of(a, b), id_of(w, s), id_of(c, d), id_of(x, u)}};
    problems.push_back("{ab,ws,cd,vu} not among " + std::to_string(list.optima.size()) +
                       " shadow-minimal optima (feasible " + (is_feasible(full, f) ? "yes" : "no") +
                       "; replacing vu by its shadow xu stays feasible " + (is_feasible(full, g) ? "yes" : "no") + ")");
  }

  ContractionState st(in);
  TreeView view(st);
  std::set<std::pair<NodeId, std::pair<NodeId, NodeId>>> stems;
  for (const StemRecord& rec : find_stems(view)) {
    const Link& l = in.link(rec.twin);
    stems.insert({rec.stem, key(l.u, l.v)});
  }
  if (stems != std::set<std::pair<NodeId, std::pair<NodeId, NodeId>>>{{s, key(a, b)}, {u, key(c, d)}})
    problems.push_back("stems differ");

  const std::vector<std::pair<NodeId, std::pair<NodeId, NodeId>>> ups{
      {c, key(c, w)}, {a, key(a, w)}, {d, key(d, v)}, {b, key(a, b)}, {w, key(w, a)}};
  for (const auto& [leaf, link] : ups) {
    const Link& l = in.link(up_link(view, leaf));
    if (key(l.u, l.v) != link) problems.push_back("up(" + std::to_string(leaf) + ") differs");
  }
  std::string detail = "OPT " + std::to_string(opt.value) + ", stems and up-links checked";
  for (const std::string& p : problems) detail += "; " + p;
  report(12, problems.empty(), "two_stems regression", detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <tap binary> <two_stems instance> [work dir]\n";
    return 2;
  }
  const std::string tap = argv[1];
  const fs::path work = argc > 3 ? fs::path(argv[3]) : fs::current_path() / "acceptance-work";
  try {
    feasibility_and_ratio(work);
    golden_ticket_soundness();
    cover_claim();
    matching_equivalence();
    shadow_invariance();
    stem_matching_monotone();
    scale(tap, work);
    two_stems(argv[2]);
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
