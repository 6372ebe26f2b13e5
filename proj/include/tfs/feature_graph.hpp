// tfs/feature_graph.hpp - rooted feature graphs labelled with species sets
#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tfs/bitset.hpp"
#include "tfs/diagnostics.hpp"
#include "tfs/signature.hpp"

namespace tfs
{

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

/// One node: a nonempty set of species it may resolve to, and outgoing
/// arcs sorted by feature id (at most one arc per feature).
struct Node
{
  Bitset label;
  std::vector<std::pair<FeatureId, NodeId>> arcs;

  [[nodiscard]] std::optional<NodeId> arc_target(FeatureId f) const
  {
    for (const auto& [g, m] : arcs) {
      if (g == f) return m;
      if (g > f) break;
    }
    return std::nullopt;
  }

  void add_arc(FeatureId f, NodeId m)
  {
    arcs.emplace_back(f, m);
    std::sort(arcs.begin(), arcs.end());
  }

  friend bool operator==(const Node& a, const Node& b)
  {
    return a.label == b.label && a.arcs == b.arcs;
  }
};

/// A rooted graph over a signature's species universe. Cycles and shared
/// substructure are allowed; every node is reachable from the root.
struct FeatureGraph
{
  std::vector<Node> nodes;
  NodeId root = 0;

  friend bool operator==(const FeatureGraph& a, const FeatureGraph& b)
  {
    return a.root == b.root && a.nodes == b.nodes;
  }
};

/// Checks structural invariants; throws Error on the first violation.
inline void validate_graph(const CompiledSignature& sig, const FeatureGraph& g)
{
  if (g.nodes.empty()) throw Error("feature graph has no nodes");
  if (g.root >= g.nodes.size()) throw Error("feature graph root out of range");
  for (const auto& node : g.nodes) {
    if (node.label.size() != sig.num_species()) {
      throw Error("feature graph label has wrong universe size");
    }
    if (node.label.none()) throw Error("feature graph node has empty label");
    for (std::size_t i = 0; i < node.arcs.size(); ++i) {
      if (node.arcs[i].second >= g.nodes.size()) {
        throw Error("feature graph arc target out of range");
      }
      if (node.arcs[i].first >= sig.num_features()) {
        throw Error("feature graph arc feature out of range");
      }
      if (i > 0 && node.arcs[i - 1].first >= node.arcs[i].first) {
        throw Error("feature graph arcs not strictly sorted by feature");
      }
    }
  }
  std::vector<bool> seen(g.nodes.size(), false);
  std::vector<NodeId> stack{g.root};
  seen[g.root] = true;
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    for (const auto& [f, m] : g.nodes[n].arcs) {
      if (!seen[m]) {
        seen[m] = true;
        stack.push_back(m);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error("feature graph has unreachable nodes");
  }
}

/// Nodes in depth-first preorder from the root, arcs taken in feature-id
/// order. Unreachable nodes are omitted.
inline std::vector<NodeId> dfs_preorder(const FeatureGraph& g)
{
  std::vector<NodeId> order;
  std::vector<bool> seen(g.nodes.size(), false);
  std::vector<NodeId> stack{g.root};
  seen[g.root] = true;
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    order.push_back(n);
    // Push arcs in reverse so the lowest feature id is visited first.
    for (auto it = g.nodes[n].arcs.rbegin(); it != g.nodes[n].arcs.rend(); ++it) {
      if (!seen[it->second]) {
        seen[it->second] = true;
        stack.push_back(it->second);
      }
    }
  }
  return order;
}

/// Nodes in depth-first finishing order (children before parents where the
/// graph is acyclic); arcs taken in feature-id order.
inline std::vector<NodeId> dfs_finish_order(const FeatureGraph& g)
{
  std::vector<NodeId> order;
  std::vector<std::uint8_t> state(g.nodes.size(), 0); // 0 new, 1 open, 2 done
  // Explicit stack of (node, next-arc-index).
  std::vector<std::pair<NodeId, std::size_t>> stack;
  stack.emplace_back(g.root, 0);
  state[g.root] = 1;
  while (!stack.empty()) {
    auto& [n, i] = stack.back();
    if (i < g.nodes[n].arcs.size()) {
      const NodeId m = g.nodes[n].arcs[i].second;
      ++i;
      if (state[m] == 0) {
        state[m] = 1;
        stack.emplace_back(m, 0);
      }
    } else {
      state[n] = 2;
      order.push_back(n);
      stack.pop_back();
    }
  }
  return order;
}

/// Renumbers nodes to depth-first preorder, giving the canonical form:
/// two graphs are isomorphic iff their canonical forms are equal.
inline FeatureGraph canonicalize(const FeatureGraph& g)
{
  const auto order = dfs_preorder(g);
  std::vector<NodeId> rename(g.nodes.size(), kNoNode);
  for (NodeId i = 0; i < order.size(); ++i) rename[order[i]] = i;
  FeatureGraph out;
  out.root = 0;
  out.nodes.reserve(order.size());
  for (const NodeId n : order) {
    Node node;
    node.label = g.nodes[n].label;
    for (const auto& [f, m] : g.nodes[n].arcs) {
      assert(rename[m] != kNoNode);
      node.arcs.emplace_back(f, rename[m]);
    }
    out.nodes.push_back(std::move(node));
  }
  return out;
}

inline bool isomorphic(const FeatureGraph& a, const FeatureGraph& b)
{
  return canonicalize(a) == canonicalize(b);
}

/// Whether f subsumes g: some arc- and root-preserving map from f's nodes
/// to g's nodes under which every g label refines the corresponding f
/// label. Such a map is forced arc by arc from the roots, so at most one
/// exists.
inline bool fs_subsumes(const FeatureGraph& f, const FeatureGraph& g)
{
  std::vector<NodeId> h(f.nodes.size(), kNoNode);
  std::vector<NodeId> stack;
  h[f.root] = g.root;
  stack.push_back(f.root);
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (!g.nodes[h[n]].label.subset_of(f.nodes[n].label)) return false;
    for (const auto& [feat, m] : f.nodes[n].arcs) {
      const auto target = g.nodes[h[n]].arc_target(feat);
      if (!target) return false;
      if (h[m] == kNoNode) {
        h[m] = *target;
        stack.push_back(m);
      } else if (h[m] != *target) {
        return false;
      }
    }
  }
  return true;
}

/// Result of merging two graphs over their root identification: the
/// quotient graph with intersected labels (possibly empty — callers decide
/// whether that is failure) and, for each original node (first graph's
/// nodes then the second's), the merged node it maps to.
struct GraphMerge
{
  FeatureGraph graph;
  std::vector<NodeId> node_class;
};

/// Merges two rooted graphs by identifying the roots and closing under
/// the rule that identified nodes share arc targets per feature. Labels
/// of identified nodes are intersected, and may come out empty.
inline GraphMerge merge_graphs(const FeatureGraph& a, const FeatureGraph& b)
{
  assert(!a.nodes.empty() && !b.nodes.empty());
  const std::size_t total = a.nodes.size() + b.nodes.size();
  const auto node = [&](bool second, NodeId n) -> std::size_t {
    return second ? a.nodes.size() + n : n;
  };

  // Union-find with per-class arc maps.
  std::vector<std::size_t> parent(total);
  for (std::size_t i = 0; i < total; ++i) parent[i] = i;
  const auto find = [&parent](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  std::vector<std::vector<std::pair<FeatureId, std::size_t>>> class_arcs(total);
  for (NodeId n = 0; n < a.nodes.size(); ++n) {
    for (const auto& [f, m] : a.nodes[n].arcs) {
      class_arcs[node(false, n)].emplace_back(f, node(false, m));
    }
  }
  for (NodeId n = 0; n < b.nodes.size(); ++n) {
    for (const auto& [f, m] : b.nodes[n].arcs) {
      class_arcs[node(true, n)].emplace_back(f, node(true, m));
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> worklist;
  worklist.emplace_back(node(false, a.root), node(true, b.root));
  while (!worklist.empty()) {
    auto [x, y] = worklist.back();
    worklist.pop_back();
    x = find(x);
    y = find(y);
    if (x == y) continue;
    // Keep the class with more arcs as representative.
    if (class_arcs[x].size() < class_arcs[y].size()) std::swap(x, y);
    parent[y] = x;
    auto& ax = class_arcs[x];
    for (const auto& [f, m] : class_arcs[y]) {
      const auto it =
          std::find_if(ax.begin(), ax.end(), [f = f](const auto& p) { return p.first == f; });
      if (it == ax.end()) {
        ax.emplace_back(f, m);
      } else {
        worklist.emplace_back(it->second, m);
      }
    }
    class_arcs[y].clear();
  }

  // Number the classes and build the quotient.
  GraphMerge out;
  out.node_class.assign(total, kNoNode);
  std::vector<std::size_t> class_rep;
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t r = find(i);
    if (out.node_class[r] == kNoNode) {
      out.node_class[r] = static_cast<NodeId>(class_rep.size());
      class_rep.push_back(r);
    }
    out.node_class[i] = out.node_class[r];
  }

  out.graph.nodes.resize(class_rep.size());
  out.graph.root = out.node_class[node(false, a.root)];
  for (std::size_t c = 0; c < class_rep.size(); ++c) {
    auto& merged = out.graph.nodes[c];
    for (const auto& [f, m] : class_arcs[class_rep[c]]) {
      merged.arcs.emplace_back(f, out.node_class[find(m)]);
    }
    std::sort(merged.arcs.begin(), merged.arcs.end());
  }
  for (NodeId n = 0; n < a.nodes.size(); ++n) {
    auto& label = out.graph.nodes[out.node_class[node(false, n)]].label;
    if (label.size() == 0) label = a.nodes[n].label;
    else label &= a.nodes[n].label;
  }
  for (NodeId n = 0; n < b.nodes.size(); ++n) {
    auto& label = out.graph.nodes[out.node_class[node(true, n)]].label;
    if (label.size() == 0) label = b.nodes[n].label;
    else label &= b.nodes[n].label;
  }
  return out;
}

/// Unifies two feature graphs: identifies the roots, closes under shared
/// arcs, and intersects labels. Fails (nullopt) iff some intersection is
/// empty. The result is in canonical form.
inline std::optional<FeatureGraph> graph_unify(const FeatureGraph& a, const FeatureGraph& b)
{
  auto merge = merge_graphs(a, b);
  for (const auto& node : merge.graph.nodes) {
    if (node.label.none()) return std::nullopt;
  }
  return canonicalize(merge.graph);
}

} // namespace tfs
