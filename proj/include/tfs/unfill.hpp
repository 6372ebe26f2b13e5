// tfs/unfill.hpp - removing features whose values the signature predicts
#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "tfs/diagnostics.hpp"
#include "tfs/drfs.hpp"
#include "tfs/feature_graph.hpp"
#include "tfs/resolve.hpp"
#include "tfs/signature.hpp"

namespace tfs
{

/// Reintroduces a missing feature on a node: a fresh target is added and
/// every choice of the structure is extended with every species the
/// appropriateness table allows for it. Choices whose species make the
/// feature inappropriate are pruned; nullopt when none survive. Throws
/// Error if the node already carries the feature.
inline std::optional<CompactDRFS> fill_node(const CompiledSignature& sig, const CompactDRFS& d,
                                            NodeId node, FeatureId f)
{
  if (d.graph.nodes[node].arc_target(f)) {
    throw Error("fill_node: node already has an arc for feature '" + sig.feature_name(f) + "'");
  }

  const auto rel = expand_relation(d);
  LabellingRelation extended;
  extended.num_nodes = rel.num_nodes + 1;
  for (const auto& tuple : rel.tuples) {
    const auto& av = sig.spec_approp(tuple[node], f);
    if (!av) continue;
    for (const auto v : av->members()) {
      auto t2 = tuple;
      t2.push_back(v);
      extended.tuples.push_back(std::move(t2));
    }
  }
  extended.normalize();
  if (extended.empty()) return std::nullopt;

  FeatureGraph g2 = d.graph;
  const auto target = static_cast<NodeId>(g2.nodes.size());
  Node fresh;
  fresh.label = Bitset(sig.num_species());
  for (const auto& tuple : extended.tuples) fresh.label.set(tuple.back());
  g2.nodes.push_back(std::move(fresh));
  g2.nodes[node].add_arc(f, target);

  return canonical_drfs(sig, compact(sig, g2, extended));
}

namespace detail
{

/// The structure with one leaf node and its single incoming arc removed.
inline CompactDRFS drop_leaf(const CompiledSignature& sig, const CompactDRFS& d, NodeId src,
                             FeatureId f, NodeId leaf)
{
  FeatureGraph g2;
  g2.nodes.reserve(d.graph.nodes.size() - 1);
  const auto rename = [leaf](NodeId n) { return n > leaf ? n - 1 : n; };
  for (NodeId n = 0; n < d.graph.nodes.size(); ++n) {
    if (n == leaf) continue;
    Node node;
    node.label = d.graph.nodes[n].label;
    for (const auto& [feat, m] : d.graph.nodes[n].arcs) {
      if (n == src && feat == f) continue;
      node.arcs.emplace_back(feat, rename(m));
    }
    g2.nodes.push_back(std::move(node));
  }
  g2.root = rename(d.graph.root);

  const auto rel = expand_relation(d);
  LabellingRelation projected;
  projected.num_nodes = rel.num_nodes - 1;
  projected.tuples.reserve(rel.size());
  for (const auto& tuple : rel.tuples) {
    std::vector<SpeciesId> p;
    p.reserve(tuple.size() - 1);
    for (NodeId n = 0; n < tuple.size(); ++n) {
      if (n != leaf) p.push_back(tuple[n]);
    }
    projected.tuples.push_back(std::move(p));
  }
  projected.normalize();
  return compact(sig, g2, projected);
}

} // namespace detail

/// Removes every redundant arc: an arc to a non-root leaf with no other
/// incoming arcs whose removal fill_node undoes exactly (up to node and
/// name renumbering). Candidates are tried bottom-up, in DFS finishing
/// order, and the pass restarts after each removal until a fixpoint.
inline CompactDRFS unfill(const CompiledSignature& sig, const CompactDRFS& d)
{
  CompactDRFS cur = canonical_drfs(sig, d);
  for (bool removed = true; removed;) {
    removed = false;
    std::vector<std::uint32_t> incoming(cur.graph.nodes.size(), 0);
    std::vector<std::pair<NodeId, FeatureId>> source(cur.graph.nodes.size(), {kNoNode, 0});
    for (NodeId n = 0; n < cur.graph.nodes.size(); ++n) {
      for (const auto& [f, m] : cur.graph.nodes[n].arcs) {
        ++incoming[m];
        source[m] = {n, f};
      }
    }
    for (const NodeId leaf : dfs_finish_order(cur.graph)) {
      if (leaf == cur.graph.root) continue;
      if (!cur.graph.nodes[leaf].arcs.empty()) continue;
      if (incoming[leaf] != 1) continue;
      const auto [src, f] = source[leaf];
      CompactDRFS reduced = detail::drop_leaf(sig, cur, src, f, leaf);
      const NodeId src2 = src > leaf ? src - 1 : src;
      const auto refilled = fill_node(sig, reduced, src2, f);
      if (refilled && drfs_equivalent(sig, *refilled, cur)) {
        cur = canonical_drfs(sig, reduced);
        removed = true;
        break;
      }
    }
  }
  return cur;
}

} // namespace tfs
