#include <algorithm>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "tap/harness.hpp"

using namespace tap;
namespace f = tap::fixtures;

namespace {

std::vector<NodeId> sorted(std::vector<NodeId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::pair<NodeId, NodeId> ends(const Instance& in, LinkId id) {
  const Link& l = in.link(id);
  return {std::min(l.u, l.v), std::max(l.u, l.v)};
}

// Independent minimality check: v is leaf-closed and no proper non-leaf
// descendant is.
bool minimally_closed_by_definition(const TreeView& view, NodeId v) {
  auto closed = [&](NodeId y) {
    for (NodeId leaf : view.leaves_in(y))
      if (!is_node_closed(view, y, leaf)) return false;
    return true;
  };
  if (!closed(v)) return false;
  for (NodeId y : view.subtree(v))
    if (y != v && !view.is_leaf(y) && closed(y)) return false;
  return true;
}

}  // namespace

TEST_CASE("node closedness on two_stems") {
  Instance in = f::two_stems();
  ContractionState st(in);
  TreeView view(st);
  CHECK(is_node_closed(view, f::v, f::c));
  CHECK(is_node_closed(view, f::v, f::d));
  CHECK_FALSE(is_node_closed(view, f::v, f::w));
  CHECK_FALSE(is_node_closed(view, f::v, f::x));
  CHECK_THROWS_AS(is_node_closed(view, f::v, f::a), Error);
}

TEST_CASE("a node without links is closed") {
  Instance in = parse_instance("tap 1\nnodes 4 root 0\nedge 0 1\nedge 1 2\nedge 1 3\nlink 2 0\nlink 3 0\n");
  ContractionState st(in);
  TreeView view(st);
  CHECK(is_node_closed(view, 0, 1));
  CHECK(is_node_closed(view, 1, 1));
}

TEST_CASE("minimally leaf-closed subtrees") {
  SUBCASE("two_stems: only the whole tree") {
    Instance in = f::two_stems();
    ContractionState st(in);
    CHECK(minimally_leaf_closed(TreeView(st)) == f::r);
  }
  SUBCASE("star linked to its centre") {
    Instance in = parse_instance("tap 1\nnodes 4 root 0\nedge 0 1\nedge 0 2\nedge 0 3\nlink 1 0\nlink 2 0\nlink 3 0\n");
    ContractionState st(in);
    CHECK(minimally_leaf_closed(TreeView(st)) == 0);
  }
  SUBCASE("two closed siblings: smaller id wins") {
    Instance in = parse_instance(
        "tap 1\nnodes 7 root 0\nedge 0 2\nedge 0 1\nedge 2 5\nedge 2 6\nedge 1 3\nedge 1 4\n"
        "link 3 4\nlink 5 6\nlink 1 0\nlink 2 0\n");
    ContractionState st(in);
    TreeView view(st);
    CHECK(minimally_leaf_closed(view) == 1);
    CHECK(minimally_closed_by_definition(view, 1));
    CHECK(minimally_closed_by_definition(view, 2));
  }
}

TEST_CASE("up-links on two_stems") {
  Instance in = f::two_stems();
  ContractionState st(in);
  TreeView view(st);
  CHECK(ends(in, up_link(view, f::c)) == std::pair<NodeId, NodeId>{f::w, f::c});
  CHECK(up_node(view, f::c) == f::x);
  CHECK(ends(in, up_link(view, f::a)) == std::pair<NodeId, NodeId>{f::a, f::w});
  CHECK(up_node(view, f::a) == f::r);
  CHECK(ends(in, up_link(view, f::d)) == std::pair<NodeId, NodeId>{f::v, f::d});
  CHECK(up_node(view, f::d) == f::v);
  CHECK(ends(in, up_link(view, f::b)) == std::pair<NodeId, NodeId>{f::a, f::b});
  CHECK(up_node(view, f::b) == f::s);
  CHECK(ends(in, up_link(view, f::w)) == std::pair<NodeId, NodeId>{f::a, f::w});
  CHECK(up_node(view, f::w) == f::r);
}

TEST_CASE("up-link of an isolated leaf signals infeasibility") {
  Instance in = parse_instance("tap 1\nnodes 3 root 0\nedge 0 1\nedge 0 2\nlink 1 0\n");
  ContractionState st(in);
  CHECK_THROWS_AS(up_link(TreeView(st), 2), InfeasibleError);
}

TEST_CASE("stems") {
  SUBCASE("two_stems has stems s and u") {
    Instance in = f::two_stems();
    ContractionState st(in);
    auto stems = find_stems(TreeView(st));
    REQUIRE(stems.size() == 2);
    std::set<std::pair<NodeId, std::pair<NodeId, NodeId>>> got;
    for (const StemRecord& r : stems) got.insert({r.stem, ends(in, r.twin)});
    CHECK(got.count({f::s, {f::a, f::b}}));
    CHECK(got.count({f::u, {f::c, f::d}}));
  }
  SUBCASE("a link spanning the whole tree makes no stem") {
    Instance in = parse_instance("tap 1\nnodes 3 root 0\nedge 0 1\nedge 0 2\nlink 1 2\n");
    ContractionState st(in);
    CHECK(find_stems(TreeView(st)).empty());
  }
  SUBCASE("contracting a twin alone turns its stem into a leaf") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      Instance in = generate(GenParams{14, 18, Shape::random, true, seed});
      ContractionState st(in);
      for (const StemRecord& r : find_stems(TreeView(st))) {
        ContractionState copy = st;
        copy.contract_links(std::vector<LinkId>{r.twin});
        CHECK(copy.is_leaf(r.stem));
      }
    }
  }
}

TEST_CASE("golden tickets") {
  SUBCASE("two_stems twins get one ticket each") {
    Instance in = f::two_stems();
    ContractionState st(in);
    TreeView view(st);
    GoldenTicketMap gt = golden_tickets(view, find_stems(view));
    CHECK(gt.value(f::link_between(in, f::a, f::b)) == 1);
    CHECK(gt.value(f::link_between(in, f::c, f::d)) == 1);
    CHECK(gt.pattern[f::link_between(in, f::a, f::b)] == TicketPattern::twin);
    CHECK(gt.value(f::link_between(in, f::a, f::w)) == 0);
    CHECK(gt.weight3(f::link_between(in, f::a, f::w)) == 4);
    CHECK(gt.value(f::link_between(in, f::x, f::s)) == 0);
  }
  SUBCASE("two_stems: cw spans a three-leaf subtree whose third leaf is closed") {
    Instance in = f::two_stems();
    ContractionState st(in);
    TreeView view(st);
    GoldenTicketMap gt = golden_tickets(view, find_stems(view));
    const LinkId cw = f::link_between(in, f::c, f::w);
    CHECK(gt.value(cw) == 2);
    CHECK(gt.pattern[cw] == TicketPattern::B);
    CHECK(gt.witness[cw] == f::v);
  }
  SUBCASE("stemless three-leaf gadget") {
    Instance in = f::three_leaf_gadget();
    ContractionState st(in);
    TreeView view(st);
    GoldenTicketMap gt = golden_tickets(view, find_stems(view));
    const LinkId ab = f::link_between(in, 2, 4);
    CHECK(gt.value(ab) == 2);
    CHECK(gt.weight3(ab) == 6);
    CHECK(gt.witness[ab] == 1);
  }
  SUBCASE("uniform control map") {
    GoldenTicketMap gt = uniform_tickets(f::two_stems(), 2);
    for (int g : gt.gt) CHECK(g == 2);
  }
  SUBCASE("witness subtrees are node-disjoint") {
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
      Instance in = generate(GenParams{16, 20, static_cast<Shape>(seed % 3), seed % 2 == 0, seed});
      ContractionState st(in);
      TreeView view(st);
      GoldenTicketMap gt = golden_tickets(view, find_stems(view));
      std::set<NodeId> roots;
      for (LinkId id : gt.ticketed()) {
        if (gt.value(id) == 2) roots.insert(gt.witness[id]);
      }
      for (NodeId p : roots)
        for (NodeId q : roots)
          if (p != q) CHECK_FALSE(view.in_subtree(p, q));
    }
  }
}

TEST_CASE("semi-closed subtrees") {
  Instance in = f::two_stems();
  ContractionState st(in);
  TreeView view(st);
  SUBCASE("matching {wc} on two_stems") {
    const LinkId cw = f::link_between(in, f::c, f::w);
    SemiClosedTree t = semi_closed_subtree(view, {LinkUse{cw, f::c, f::w}});
    CHECK(t.root == f::v);
    CHECK(t.matched.size() == 1);
    CHECK(t.unmatched == std::vector<NodeId>{f::d});
    CHECK(sorted(t.leaves) == std::vector<NodeId>{f::w, f::c, f::d});
    CHECK(covers_subtree(view, t.root, t.basic));
  }
  SUBCASE("empty matching is the minimally leaf-closed tree") {
    SemiClosedTree t = semi_closed_subtree(view, {});
    CHECK(t.root == minimally_leaf_closed(view));
    CHECK(t.matched.empty());
  }
  SUBCASE("the tree respects the matching") {
    const LinkId ab = f::link_between(in, f::a, f::b);
    SemiClosedTree t = semi_closed_subtree(view, {LinkUse{ab, f::a, f::b}});
    bool ia = view.in_subtree(t.root, f::a);
    bool ib = view.in_subtree(t.root, f::b);
    CHECK(ia == ib);
  }
}

TEST_CASE("semi-closed tree properties on random instances") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Instance in = generate(GenParams{14, 20, static_cast<Shape>(seed % 3), seed % 3 == 0, seed});
    ContractionState st(in);
    TreeView view(st);
    auto stems = find_stems(view);
    GoldenTicketMap gt = golden_tickets(view, stems);
    EdgeCoverResult ec = min_weight_edge_cover(leaf_cover_graph(view, gt));
    SemiClosedTree t = semi_closed_subtree(view, ec.pairs, stems);
    CAPTURE(seed);
    // Basic cover covers T_v.
    CHECK(covers_subtree(view, t.root, t.basic));
    // Unmatched leaves keep their links inside T_v.
    for (NodeId y : t.unmatched) CHECK(is_node_closed(view, t.root, y));
    // Both ends of each matched pair are on the same side.
    for (const LinkUse& u : ec.pairs)
      CHECK(view.in_subtree(t.root, st.rep(u.u)) == view.in_subtree(t.root, st.rep(u.v)));
  }
}

TEST_CASE("cover claim: up-links of a minimally leaf-closed tree cover it") {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    Instance in = generate(GenParams{18, 24, static_cast<Shape>(seed % 3), seed % 4 == 0, seed});
    ContractionState st(in);
    TreeView view(st);
    NodeId v = minimally_leaf_closed(view);
    CHECK(minimally_closed_by_definition(view, v));
    std::vector<LinkUse> ups;
    for (NodeId leaf : view.leaves_in(v)) {
      const Link& l = in.link(up_link(view, leaf));
      ups.push_back(LinkUse{l.id, l.u, l.v});
    }
    CAPTURE(seed);
    CHECK(covers_subtree(view, v, ups));
  }
}
