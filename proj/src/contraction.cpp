#include "tap/contraction.hpp"

#include <algorithm>

namespace tap {

ContractionState::ContractionState(const Instance& base)
    : base_(&base), node_count_(base.node_count()) {
  const int n = base.node_count();
  dsu_.resize(n);
  for (NodeId v = 0; v < n; ++v) dsu_[v] = v;
  size_.assign(n, 1);
  children_.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    auto ch = base.tree().children(v);
    children_[v].assign(ch.begin(), ch.end());
  }
}

NodeId ContractionState::rep(NodeId x) const {
  NodeId r = x;
  while (dsu_[r] != r) r = dsu_[r];
  while (dsu_[x] != r) {
    NodeId next = dsu_[x];
    dsu_[x] = r;
    x = next;
  }
  return r;
}

NodeId ContractionState::parent(NodeId r) const {
  if (r == root()) return r;
  return rep(base_->tree().parent(r));
}

std::vector<NodeId> ContractionState::nodes() const {
  std::vector<NodeId> out;
  for (NodeId v : base_->tree().preorder())
    if (is_rep(v)) out.push_back(v);
  return out;
}

std::vector<NodeId> ContractionState::current_leaves() const {
  std::vector<NodeId> out;
  for (NodeId v : base_->tree().preorder())
    if (is_rep(v) && is_leaf(v)) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

NodeId ContractionState::lca(NodeId a, NodeId b) const {
  return rep(base_->tree().lca(a, b));
}

std::vector<NodeId> ContractionState::path(NodeId a, NodeId b) const {
  const RootedTree& t = base_->tree();
  NodeId x = rep(a);
  NodeId y = rep(b);
  std::vector<NodeId> up;
  std::vector<NodeId> down;
  // Representatives are top nodes, so base depth is monotone along current
  // root paths and can drive the equalization.
  while (x != y) {
    if (t.depth(x) >= t.depth(y)) {
      up.push_back(x);
      x = parent(x);
    } else {
      down.push_back(y);
      y = parent(y);
    }
  }
  up.push_back(x);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

std::optional<CurrentLink> ContractionState::current_link(LinkId id) const {
  if (!base_->valid_link(id)) throw Error("unknown link id " + std::to_string(id));
  const Link& l = base_->link(id);
  NodeId a = rep(l.u);
  NodeId b = rep(l.v);
  if (a == b) return std::nullopt;
  return CurrentLink{id, a, b};
}

std::vector<CurrentLink> ContractionState::current_links() const {
  std::vector<CurrentLink> out;
  for (const Link& l : base_->links()) {
    NodeId a = rep(l.u);
    NodeId b = rep(l.v);
    if (a != b) out.push_back(CurrentLink{l.id, a, b});
  }
  return out;
}

NodeId ContractionState::contract_path(NodeId a, NodeId b) {
  std::vector<NodeId> p = path(a, b);
  if (p.size() < 2) return p.front();
  NodeId top = p.front();
  for (NodeId x : p)
    if (base_->tree().depth(x) < base_->tree().depth(top)) top = x;
  std::vector<NodeId> merged;
  for (NodeId x : p)
    if (x != top) merged.push_back(x);
  std::sort(merged.begin(), merged.end());
  auto on_path = [&](NodeId x) { return std::binary_search(merged.begin(), merged.end(), x); };
  std::vector<NodeId> kids;
  for (NodeId c : children_[top])
    if (!on_path(c)) kids.push_back(c);
  for (NodeId x : merged) {
    for (NodeId c : children_[x])
      if (!on_path(c)) kids.push_back(c);
    children_[x].clear();
    children_[x].shrink_to_fit();
    dsu_[x] = top;
    size_[top] += size_[x];
  }
  std::sort(kids.begin(), kids.end());
  children_[top] = std::move(kids);
  node_count_ -= static_cast<int>(merged.size());
  return top;
}

NodeId ContractionState::contract(const LinkUse& use) {
  if (!base_->valid_link(use.origin)) throw Error("unknown link id " + std::to_string(use.origin));
  NodeId r = contract_path(use.u, use.v);
  history_.push_back(use);
  return r;
}

NodeId ContractionState::contract_links(std::span<const LinkId> ids) {
  for (LinkId id : ids) {
    if (!current_link(id)) {
      throw Error("link " + std::to_string(id) + " is not in the current view");
    }
  }
  NodeId last = kNoNode;
  for (LinkId id : ids) {
    const Link& l = base_->link(id);
    last = contract(LinkUse{id, l.u, l.v});
  }
  return last;
}

Solution ContractionState::lift_solution(std::span<const LinkId> ids) const {
  Solution sol;
  for (LinkId id : ids) {
    if (!current_link(id)) {
      throw Error("link " + std::to_string(id) + " was contracted away and cannot be lifted");
    }
    sol.links.push_back(id);
  }
  return sol;
}

TreeView::TreeView(const ContractionState& state) : state_(&state) {
  const int n = state.base().node_count();
  parent_.assign(n, kNoNode);
  depth_.assign(n, -1);
  tin_.assign(n, -1);
  tout_.assign(n, -1);
  leaf_index_.assign(n, -1);
  incident_.assign(n, {});
  const NodeId root = state.root();
  // Iterative preorder over current children.
  std::vector<std::pair<NodeId, std::size_t>> frames{{root, 0}};
  parent_[root] = root;
  depth_[root] = 0;
  tin_[root] = 0;
  preorder_.push_back(root);
  while (!frames.empty()) {
    auto& [x, i] = frames.back();
    const auto& ch = state.children(x);
    if (i < ch.size()) {
      NodeId y = ch[i++];
      parent_[y] = x;
      depth_[y] = depth_[x] + 1;
      tin_[y] = static_cast<int>(preorder_.size());
      preorder_.push_back(y);
      frames.emplace_back(y, 0);
    } else {
      tout_[x] = static_cast<int>(preorder_.size()) - 1;
      frames.pop_back();
    }
  }
  for (NodeId v : preorder_) {
    if (v != root && state.children(v).empty()) {
      leaf_index_[v] = static_cast<int>(leaves_.size());
      leaves_.push_back(v);
    }
  }
  link_index_.assign(state.base().link_count(), -1);
  for (const CurrentLink& cl : state.current_links()) {
    int idx = static_cast<int>(links_.size());
    link_index_[cl.id] = idx;
    links_.push_back(cl);
    incident_[cl.u].push_back(idx);
    incident_[cl.v].push_back(idx);
  }
}

NodeId TreeView::lca(NodeId a, NodeId b) const {
  while (depth_[a] > depth_[b]) a = parent_[a];
  while (depth_[b] > depth_[a]) b = parent_[b];
  while (a != b) {
    a = parent_[a];
    b = parent_[b];
  }
  return a;
}

std::vector<NodeId> TreeView::path(NodeId a, NodeId b) const {
  std::vector<NodeId> up;
  std::vector<NodeId> down;
  while (depth_[a] > depth_[b]) {
    up.push_back(a);
    a = parent_[a];
  }
  while (depth_[b] > depth_[a]) {
    down.push_back(b);
    b = parent_[b];
  }
  while (a != b) {
    up.push_back(a);
    down.push_back(b);
    a = parent_[a];
    b = parent_[b];
  }
  up.push_back(a);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

std::span<const NodeId> TreeView::subtree(NodeId v) const {
  return std::span<const NodeId>(preorder_).subspan(tin_[v], tout_[v] - tin_[v] + 1);
}

std::vector<NodeId> TreeView::leaves_in(NodeId v) const {
  auto lo = std::lower_bound(leaves_.begin(), leaves_.end(), tin_[v],
                             [&](NodeId leaf, int t) { return tin_[leaf] < t; });
  auto hi = std::upper_bound(leaves_.begin(), leaves_.end(), tout_[v],
                             [&](int t, NodeId leaf) { return t < tin_[leaf]; });
  return std::vector<NodeId>(lo, hi);
}

}  // namespace tap
