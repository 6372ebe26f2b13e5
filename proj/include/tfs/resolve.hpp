// tfs/resolve.hpp - well-typedness, well-typability, and type resolution
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tfs/bitset.hpp"
#include "tfs/diagnostics.hpp"
#include "tfs/feature_graph.hpp"
#include "tfs/signature.hpp"

namespace tfs
{

inline constexpr std::uint64_t kDefaultResolveBound = 1'000'000;

/// The set of species labellings of one graph: each tuple assigns the
/// species tuple[n] to node n. Tuples are kept sorted and distinct; the
/// empty relation is a normal value (it means unsatisfiable).
struct LabellingRelation
{
  std::size_t num_nodes = 0;
  std::vector<std::vector<SpeciesId>> tuples;

  [[nodiscard]] bool empty() const { return tuples.empty(); }
  [[nodiscard]] std::size_t size() const { return tuples.size(); }

  void normalize()
  {
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
  }

  friend bool operator==(const LabellingRelation& a, const LabellingRelation& b)
  {
    return a.num_nodes == b.num_nodes && a.tuples == b.tuples;
  }
};

/// Whether every arc is licensed by a type denoting its source label:
/// some type t with species_set(t) == label(n) has approp(t, f) defined
/// and species_set of the value covering label(m), for all arcs (n,f,m)
/// at once. Labels that no type denotes make the answer false (with a
/// diagnostic), not an error.
inline bool is_well_typed(const CompiledSignature& sig, const FeatureGraph& g,
                          std::string* diag = nullptr)
{
  for (NodeId n = 0; n < g.nodes.size(); ++n) {
    const auto cands = sig.denoting_types(g.nodes[n].label);
    if (cands.empty()) {
      if (diag) *diag = "label of node " + std::to_string(n) + " is not denoted by any type";
      return false;
    }
    bool ok = false;
    for (const TypeId t : cands) {
      bool all_arcs = true;
      for (const auto& [f, m] : g.nodes[n].arcs) {
        const auto v = sig.approp(t, f);
        if (!v || !g.nodes[m].label.subset_of(sig.species_set(*v))) {
          all_arcs = false;
          break;
        }
      }
      if (all_arcs) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      if (diag) {
        *diag = "no type denoting the label of node " + std::to_string(n) +
                " makes all its arcs appropriate";
      }
      return false;
    }
  }
  return true;
}

namespace detail
{

/// Prunes domains to arc consistency: a species survives at an arc's
/// source only if its appropriateness on the feature is defined and meets
/// the target's domain, and at the target only if some surviving source
/// species supports it. Returns false on a domain wipeout.
inline bool arc_consistent(const CompiledSignature& sig, const FeatureGraph& g,
                           std::vector<Bitset>& dom)
{
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId src = 0; src < g.nodes.size(); ++src) {
      for (const auto& [f, dst] : g.nodes[src].arcs) {
        Bitset keep(sig.num_species());
        Bitset support(sig.num_species());
        for (const auto s : dom[src].members()) {
          const auto& av = sig.spec_approp(s, f);
          if (av && av->intersects(dom[dst])) {
            keep.set(s);
            support |= *av;
          }
        }
        if (keep != dom[src]) {
          dom[src] = keep;
          changed = true;
          if (keep.none()) return false;
        }
        const Bitset narrowed = dom[dst] & support;
        if (narrowed != dom[dst]) {
          dom[dst] = narrowed;
          changed = true;
          if (narrowed.none()) return false;
        }
      }
    }
  }
  return true;
}

inline void resolve_search(const CompiledSignature& sig, const FeatureGraph& g,
                           const std::vector<NodeId>& order, std::size_t depth,
                           const std::vector<Bitset>& dom,
                           std::vector<std::vector<SpeciesId>>& out)
{
  if (depth == order.size()) {
    std::vector<SpeciesId> tuple(dom.size());
    for (std::size_t n = 0; n < dom.size(); ++n) tuple[n] = dom[n].first();
    out.push_back(std::move(tuple));
    return;
  }
  const NodeId var = order[depth];
  for (const auto s : dom[var].members()) {
    std::vector<Bitset> next = dom;
    next[var] = Bitset(sig.num_species());
    next[var].set(s);
    if (arc_consistent(sig, g, next)) resolve_search(sig, g, order, depth + 1, next, out);
  }
}

} // namespace detail

/// All species labellings L with L(n) drawn from label(n) and, per arc
/// (n,f,m), specApprop(L(n), f) defined and containing L(m). Implemented
/// as an arc-consistency prefilter followed by depth-first enumeration;
/// the result is independent of enumeration order.
inline LabellingRelation resolve(const CompiledSignature& sig, const FeatureGraph& g)
{
  LabellingRelation rel;
  rel.num_nodes = g.nodes.size();

  std::vector<Bitset> dom;
  dom.reserve(g.nodes.size());
  for (const auto& node : g.nodes) dom.push_back(node.label);
  if (!detail::arc_consistent(sig, g, dom)) return rel;

  std::vector<NodeId> order(g.nodes.size());
  for (NodeId n = 0; n < order.size(); ++n) order[n] = n;
  std::sort(order.begin(), order.end(), [&dom](NodeId a, NodeId b) {
    return std::make_pair(dom[a].count(), a) < std::make_pair(dom[b].count(), b);
  });

  detail::resolve_search(sig, g, order, 0, dom, rel.tuples);
  rel.normalize();
  return rel;
}

inline bool is_satisfiable(const CompiledSignature& sig, const FeatureGraph& g)
{
  return !resolve(sig, g).empty();
}

/// The definition of resolution, executed literally: every combination of
/// per-node species choices, filtered by the arc condition. Throws
/// BoundError when the combination count exceeds the bound.
inline LabellingRelation brute_force_resolve(const CompiledSignature& sig, const FeatureGraph& g,
                                             std::uint64_t bound = kDefaultResolveBound)
{
  LabellingRelation rel;
  rel.num_nodes = g.nodes.size();

  std::vector<std::vector<SpeciesId>> choices;
  choices.reserve(g.nodes.size());
  std::uint64_t total = 1;
  for (const auto& node : g.nodes) {
    auto ms = node.label.members();
    if (ms.empty()) return rel;
    if (total > bound / ms.size()) {
      throw BoundError("brute-force resolution bound exceeded (more than " +
                       std::to_string(bound) + " labellings)");
    }
    total *= ms.size();
    choices.push_back(std::move(ms));
  }

  std::vector<std::size_t> idx(g.nodes.size(), 0);
  std::vector<SpeciesId> tuple(g.nodes.size());
  for (;;) {
    for (std::size_t n = 0; n < idx.size(); ++n) tuple[n] = choices[n][idx[n]];
    bool ok = true;
    for (NodeId src = 0; src < g.nodes.size() && ok; ++src) {
      for (const auto& [f, dst] : g.nodes[src].arcs) {
        const auto& av = sig.spec_approp(tuple[src], f);
        if (!av || !av->test(tuple[dst])) {
          ok = false;
          break;
        }
      }
    }
    if (ok) rel.tuples.push_back(tuple);
    std::size_t n = idx.size();
    while (n > 0) {
      --n;
      if (++idx[n] < choices[n].size()) break;
      idx[n] = 0;
      if (n == 0) {
        rel.normalize();
        return rel;
      }
    }
  }
}

/// Whether some same-graph relabelling by declared types — each new label
/// the species set of a type refining the old label — is well-typed.
inline bool is_well_typable(const CompiledSignature& sig, const FeatureGraph& g)
{
  std::vector<std::vector<TypeId>> dom(g.nodes.size());
  for (NodeId n = 0; n < g.nodes.size(); ++n) {
    for (TypeId t = 0; t < sig.num_types(); ++t) {
      if (sig.species_set(t).subset_of(g.nodes[n].label)) dom[n].push_back(t);
    }
    if (dom[n].empty()) return false;
  }

  const auto arc_ok = [&sig](TypeId tn, FeatureId f, TypeId tm) {
    const auto v = sig.approp(tn, f);
    return v && sig.species_set(tm).subset_of(sig.species_set(*v));
  };

  std::vector<NodeId> order(g.nodes.size());
  for (NodeId n = 0; n < order.size(); ++n) order[n] = n;
  std::sort(order.begin(), order.end(), [&dom](NodeId a, NodeId b) {
    return std::make_pair(dom[a].size(), a) < std::make_pair(dom[b].size(), b);
  });

  // Backtracking with full consistency checks against assigned neighbours.
  std::vector<std::optional<TypeId>> assign(g.nodes.size());
  const auto consistent = [&](NodeId n, TypeId t) {
    for (const auto& [f, m] : g.nodes[n].arcs) {
      if (m == n && !arc_ok(t, f, t)) return false;
      if (m != n && assign[m] && !arc_ok(t, f, *assign[m])) return false;
    }
    for (NodeId src = 0; src < g.nodes.size(); ++src) {
      if (src == n || !assign[src]) continue;
      for (const auto& [f, m] : g.nodes[src].arcs) {
        if (m == n && !arc_ok(*assign[src], f, t)) return false;
      }
    }
    return true;
  };

  const auto search = [&](auto&& self, std::size_t depth) -> bool {
    if (depth == order.size()) return true;
    const NodeId n = order[depth];
    for (const TypeId t : dom[n]) {
      if (!consistent(n, t)) continue;
      assign[n] = t;
      if (self(self, depth + 1)) return true;
      assign[n] = std::nullopt;
    }
    return false;
  };
  return search(search, 0);
}

/// The graph of one tuple: same shape, each label the chosen singleton.
inline FeatureGraph materialize(const CompiledSignature& sig, const FeatureGraph& g,
                                const std::vector<SpeciesId>& tuple)
{
  FeatureGraph out = g;
  for (NodeId n = 0; n < out.nodes.size(); ++n) {
    out.nodes[n].label = Bitset(sig.num_species());
    out.nodes[n].label.set(tuple[n]);
  }
  return out;
}

inline std::vector<FeatureGraph> resolvent_graphs(const CompiledSignature& sig,
                                                  const FeatureGraph& g,
                                                  const LabellingRelation& rel)
{
  std::vector<FeatureGraph> out;
  out.reserve(rel.tuples.size());
  for (const auto& tuple : rel.tuples) out.push_back(materialize(sig, g, tuple));
  return out;
}

} // namespace tfs
