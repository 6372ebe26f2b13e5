// tfs/drfs.hpp - disjunctive resolved feature structures with named disjunction
#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <variant>
#include <vector>

#include "tfs/bitset.hpp"
#include "tfs/diagnostics.hpp"
#include "tfs/feature_graph.hpp"
#include "tfs/resolve.hpp"
#include "tfs/signature.hpp"

namespace tfs
{

using DisjName = std::uint32_t;

/// The node's species is the same in every expansion.
struct FixedBinding
{
  SpeciesId species;
  friend bool operator==(const FixedBinding&, const FixedBinding&) = default;
};

/// The node's species ranges over the set independently of every other
/// choice in the structure.
struct FreeBinding
{
  Bitset set;
  friend bool operator==(const FreeBinding&, const FreeBinding&) = default;
};

/// One column of a named disjunction: alternative i of the name selects
/// alts[i] here and the i-th alternative at every other column of the
/// same name.
struct ColumnBinding
{
  DisjName name;
  std::vector<SpeciesId> alts;
  friend bool operator==(const ColumnBinding&, const ColumnBinding&) = default;
};

using NodeBinding = std::variant<FixedBinding, FreeBinding, ColumnBinding>;

/// A set of resolved feature structures over one underlying graph,
/// stored as the graph plus per-node bindings. Graph labels mirror the
/// binding value sets. Names are dense and local to the structure;
/// arities[name] is the alternative count of that name.
struct CompactDRFS
{
  FeatureGraph graph;
  std::vector<NodeBinding> bindings;
  std::vector<std::uint32_t> arities;

  friend bool operator==(const CompactDRFS&, const CompactDRFS&) = default;
};

/// The set of species a binding can take.
inline Bitset binding_set(const NodeBinding& b, std::size_t num_species)
{
  Bitset out(num_species);
  if (const auto* fx = std::get_if<FixedBinding>(&b)) {
    out.set(fx->species);
  } else if (const auto* fr = std::get_if<FreeBinding>(&b)) {
    out = fr->set;
  } else {
    for (const SpeciesId s : std::get<ColumnBinding>(b).alts) out.set(s);
  }
  return out;
}

/// Checks CompactDRFS structural invariants; throws Error on violation.
/// Canonical minimality of the factoring is not checked here (tests do
/// that by re-compacting the expansion).
inline void validate_drfs(const CompiledSignature& sig, const CompactDRFS& d)
{
  validate_graph(sig, d.graph);
  if (d.bindings.size() != d.graph.nodes.size()) {
    throw Error("binding count does not match node count");
  }
  std::vector<std::uint32_t> uses(d.arities.size(), 0);
  for (NodeId n = 0; n < d.bindings.size(); ++n) {
    const auto& b = d.bindings[n];
    if (const auto* fx = std::get_if<FixedBinding>(&b)) {
      if (fx->species >= sig.num_species()) throw Error("fixed binding species out of range");
    } else if (const auto* fr = std::get_if<FreeBinding>(&b)) {
      if (fr->set.size() != sig.num_species()) throw Error("free binding has wrong universe");
      if (fr->set.count() < 2) throw Error("free binding with fewer than two species");
    } else {
      const auto& col = std::get<ColumnBinding>(b);
      if (col.name >= d.arities.size()) throw Error("column names an undeclared disjunction");
      if (col.alts.size() != d.arities[col.name]) throw Error("column arity mismatch");
      if (col.alts.size() < 2) throw Error("disjunction arity below two");
      for (const SpeciesId s : col.alts) {
        if (s >= sig.num_species()) throw Error("column species out of range");
      }
      if (std::adjacent_find(col.alts.begin(), col.alts.end(), std::not_equal_to<>()) ==
          col.alts.end()) {
        throw Error("constant column in a named disjunction");
      }
      ++uses[col.name];
    }
    if (binding_set(b, sig.num_species()) != d.graph.nodes[n].label) {
      throw Error("graph label does not mirror its binding");
    }
  }
  for (std::size_t name = 0; name < uses.size(); ++name) {
    if (uses[name] < 2) throw Error("disjunction name used by fewer than two nodes");
  }
}

/// All labellings the structure stands for: one alternative per name,
/// one member per Free set, jointly. Throws BoundError if the expansion
/// would exceed the bound.
inline LabellingRelation expand_relation(const CompactDRFS& d,
                                         std::uint64_t bound = kDefaultResolveBound)
{
  LabellingRelation rel;
  rel.num_nodes = d.bindings.size();

  std::vector<SpeciesId> base(d.bindings.size(), 0);
  // A dimension is one independent choice: a name or a Free node.
  struct Dim
  {
    std::vector<std::pair<NodeId, std::vector<SpeciesId>>> cols; // node -> value per index
    std::size_t size = 0;
  };
  std::vector<Dim> dims(d.arities.size());
  for (std::size_t name = 0; name < d.arities.size(); ++name) {
    dims[name].size = d.arities[name];
  }
  for (NodeId n = 0; n < d.bindings.size(); ++n) {
    const auto& b = d.bindings[n];
    if (const auto* fx = std::get_if<FixedBinding>(&b)) {
      base[n] = fx->species;
    } else if (const auto* fr = std::get_if<FreeBinding>(&b)) {
      Dim dim;
      std::vector<SpeciesId> members;
      for (const auto s : fr->set.members()) members.push_back(s);
      dim.size = members.size();
      dim.cols.emplace_back(n, std::move(members));
      dims.push_back(std::move(dim));
    } else {
      const auto& col = std::get<ColumnBinding>(b);
      dims[col.name].cols.emplace_back(n, col.alts);
    }
  }

  std::uint64_t total = 1;
  for (const auto& dim : dims) {
    assert(dim.size > 0);
    if (total > bound / dim.size) {
      throw BoundError("expansion bound exceeded (more than " + std::to_string(bound) +
                       " structures)");
    }
    total *= dim.size;
  }

  std::vector<std::size_t> idx(dims.size(), 0);
  for (;;) {
    std::vector<SpeciesId> tuple = base;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      for (const auto& [node, vals] : dims[k].cols) tuple[node] = vals[idx[k]];
    }
    rel.tuples.push_back(std::move(tuple));
    std::size_t k = idx.size();
    bool done = idx.empty();
    while (k > 0) {
      --k;
      if (++idx[k] < dims[k].size) break;
      idx[k] = 0;
      if (k == 0) done = true;
    }
    if (done) break;
  }
  rel.normalize();
  return rel;
}

/// The structures a CompactDRFS stands for, as singleton-labelled graphs.
inline std::vector<FeatureGraph> expand(const CompiledSignature& sig, const CompactDRFS& d,
                                        std::uint64_t bound = kDefaultResolveBound)
{
  return resolvent_graphs(sig, d.graph, expand_relation(d, bound));
}

namespace detail
{

/// Distinct projections of the relation onto the given nodes, sorted.
inline std::vector<std::vector<SpeciesId>> project_relation(const LabellingRelation& rel,
                                                            const std::vector<NodeId>& nodes)
{
  std::vector<std::vector<SpeciesId>> out;
  out.reserve(rel.size());
  for (const auto& tuple : rel.tuples) {
    std::vector<SpeciesId> p;
    p.reserve(nodes.size());
    for (const NodeId n : nodes) p.push_back(tuple[n]);
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

} // namespace detail

/// Factors a nonempty relation into the canonical compact form: constant
/// nodes become Fixed; the rest are partitioned into independent groups
/// (the relation is the product of the group projections); groups are
/// refined until no group splits as a product of two halves; single-node
/// groups become Free, larger ones get one fresh name each, columns read
/// off the group's distinct tuples in sorted order.
inline CompactDRFS compact(const CompiledSignature& sig, const FeatureGraph& g,
                           const LabellingRelation& rel)
{
  if (rel.empty()) throw Error("cannot compact an empty relation");
  assert(rel.num_nodes == g.nodes.size());
  const std::size_t n = rel.num_nodes;

  CompactDRFS out;
  out.graph = g;
  out.bindings.resize(n);

  std::vector<std::vector<SpeciesId>> values(n);
  for (NodeId i = 0; i < n; ++i) {
    for (const auto& tuple : detail::project_relation(rel, {i})) values[i].push_back(tuple[0]);
  }

  std::vector<NodeId> varying;
  for (NodeId i = 0; i < n; ++i) {
    Bitset label(sig.num_species());
    for (const SpeciesId s : values[i]) label.set(s);
    out.graph.nodes[i].label = label;
    if (values[i].size() == 1) {
      out.bindings[i] = FixedBinding{values[i][0]};
    } else {
      varying.push_back(i);
    }
  }

  // Initial grouping: connected components of pairwise dependence.
  std::vector<std::size_t> uf(varying.size());
  std::iota(uf.begin(), uf.end(), 0);
  const auto find = [&uf](std::size_t x) {
    while (uf[x] != x) {
      uf[x] = uf[uf[x]];
      x = uf[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < varying.size(); ++i) {
    for (std::size_t j = i + 1; j < varying.size(); ++j) {
      const auto joint = detail::project_relation(rel, {varying[i], varying[j]});
      if (joint.size() != values[varying[i]].size() * values[varying[j]].size()) {
        uf[find(i)] = find(j);
      }
    }
  }
  std::vector<std::vector<NodeId>> groups;
  {
    std::map<std::size_t, std::size_t> index;
    for (std::size_t i = 0; i < varying.size(); ++i) {
      const auto r = find(i);
      auto [it, fresh] = index.emplace(r, groups.size());
      if (fresh) groups.emplace_back();
      groups[it->second].push_back(varying[i]);
    }
    for (auto& grp : groups) std::sort(grp.begin(), grp.end());
  }

  const auto group_size = [&rel](const std::vector<NodeId>& grp) {
    return detail::project_relation(rel, grp).size();
  };

  // Pairwise independence does not imply joint independence: repair by
  // merging the smallest set of groups whose joint projection is not the
  // product of their sizes, until the whole relation is such a product.
  while (groups.size() > 1) {
    std::vector<std::size_t> sizes(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) sizes[i] = group_size(groups[i]);
    std::uint64_t product = 1;
    for (const auto s : sizes) product *= s;
    if (product == rel.size()) break;

    std::vector<std::uint64_t> masks;
    for (std::uint64_t m = 3; m < (std::uint64_t{1} << groups.size()); ++m) {
      if (__builtin_popcountll(m) >= 2) masks.push_back(m);
    }
    std::sort(masks.begin(), masks.end(), [](std::uint64_t a, std::uint64_t b) {
      return std::make_pair(__builtin_popcountll(a), a) <
             std::make_pair(__builtin_popcountll(b), b);
    });
    for (const auto mask : masks) {
      std::vector<NodeId> merged;
      std::uint64_t expect = 1;
      for (std::size_t i = 0; i < groups.size(); ++i) {
        if (mask & (std::uint64_t{1} << i)) {
          merged.insert(merged.end(), groups[i].begin(), groups[i].end());
          expect *= sizes[i];
        }
      }
      std::sort(merged.begin(), merged.end());
      if (group_size(merged) != expect) {
        std::vector<std::vector<NodeId>> next;
        for (std::size_t i = 0; i < groups.size(); ++i) {
          if (!(mask & (std::uint64_t{1} << i))) next.push_back(std::move(groups[i]));
        }
        next.push_back(std::move(merged));
        groups = std::move(next);
        break;
      }
    }
  }

  // Minimality: split any group whose projection is the product of two
  // complementary halves, recursively.
  std::vector<std::vector<NodeId>> final_groups;
  std::vector<std::vector<NodeId>> work(groups.rbegin(), groups.rend());
  while (!work.empty()) {
    std::vector<NodeId> grp = std::move(work.back());
    work.pop_back();
    if (grp.size() == 1) {
      final_groups.push_back(std::move(grp));
      continue;
    }
    const auto whole = group_size(grp);
    bool split = false;
    // Masks over positions 1..size-1; position 0 stays in the first half.
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (grp.size() - 1)); ++mask) {
      std::vector<NodeId> a{grp[0]};
      std::vector<NodeId> b;
      for (std::size_t i = 1; i < grp.size(); ++i) {
        if (mask & (std::uint64_t{1} << (i - 1))) b.push_back(grp[i]);
        else a.push_back(grp[i]);
      }
      if (group_size(a) * group_size(b) == whole) {
        work.push_back(std::move(b));
        work.push_back(std::move(a));
        split = true;
        break;
      }
    }
    if (!split) final_groups.push_back(std::move(grp));
  }

  std::sort(final_groups.begin(), final_groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  for (const auto& grp : final_groups) {
    if (grp.size() == 1) {
      const NodeId i = grp.front();
      Bitset set(sig.num_species());
      for (const SpeciesId s : values[i]) set.set(s);
      out.bindings[i] = FreeBinding{set};
      continue;
    }
    const auto proj = detail::project_relation(rel, grp);
    const auto name = static_cast<DisjName>(out.arities.size());
    out.arities.push_back(static_cast<std::uint32_t>(proj.size()));
    for (std::size_t pos = 0; pos < grp.size(); ++pos) {
      ColumnBinding col;
      col.name = name;
      col.alts.reserve(proj.size());
      for (const auto& tuple : proj) col.alts.push_back(tuple[pos]);
      out.bindings[grp[pos]] = std::move(col);
    }
  }
  return out;
}

/// Shorthand: resolve and compact; nullopt when unsatisfiable.
inline std::optional<CompactDRFS> resolve_compact(const CompiledSignature& sig,
                                                  const FeatureGraph& g)
{
  const auto rel = resolve(sig, g);
  if (rel.empty()) return std::nullopt;
  return compact(sig, g, rel);
}

/// Renumbers nodes to DFS preorder and re-factors, giving a canonical
/// representative: equivalent structures map to equal values.
inline CompactDRFS canonical_drfs(const CompiledSignature& sig, const CompactDRFS& d)
{
  const auto order = dfs_preorder(d.graph);
  assert(order.size() == d.graph.nodes.size());
  std::vector<NodeId> rename(d.graph.nodes.size(), kNoNode);
  for (NodeId i = 0; i < order.size(); ++i) rename[order[i]] = i;

  auto rel = expand_relation(d);
  LabellingRelation permuted;
  permuted.num_nodes = rel.num_nodes;
  permuted.tuples.reserve(rel.size());
  for (const auto& tuple : rel.tuples) {
    std::vector<SpeciesId> p(tuple.size());
    for (NodeId i = 0; i < tuple.size(); ++i) p[rename[i]] = tuple[i];
    permuted.tuples.push_back(std::move(p));
  }
  permuted.normalize();
  return compact(sig, canonicalize(d.graph), permuted);
}

/// Same set of resolved structures, up to node and name renumbering.
inline bool drfs_equivalent(const CompiledSignature& sig, const CompactDRFS& a,
                            const CompactDRFS& b)
{
  return canonical_drfs(sig, a) == canonical_drfs(sig, b);
}

/// Unifies two compacted structures: merges the graphs from the roots,
/// then keeps exactly those pairs of expansions that agree on merged
/// nodes and are well-typed at species level across every arc of the
/// merged graph (arcs present on only one side act as on-demand fills of
/// the other side: choices whose species make the feature inappropriate
/// are pruned). Fails iff no pair survives.
inline std::optional<CompactDRFS> drfs_unify(const CompiledSignature& sig, const CompactDRFS& a,
                                             const CompactDRFS& b)
{
  const auto merge = merge_graphs(a.graph, b.graph);
  for (const auto& node : merge.graph.nodes) {
    if (node.label.none()) return std::nullopt;
  }
  const std::size_t nclasses = merge.graph.nodes.size();

  // Per expansion tuple, the species each merged class gets from that
  // side, or nothing if the side's merged-together nodes disagree.
  const auto side_values = [&](const LabellingRelation& rel, std::size_t offset) {
    std::vector<std::vector<std::optional<SpeciesId>>> out;
    out.reserve(rel.size());
    for (const auto& tuple : rel.tuples) {
      std::vector<std::optional<SpeciesId>> vals(nclasses);
      bool ok = true;
      for (NodeId i = 0; i < tuple.size() && ok; ++i) {
        auto& slot = vals[merge.node_class[offset + i]];
        if (!slot) slot = tuple[i];
        else if (*slot != tuple[i]) ok = false;
      }
      if (ok) out.push_back(std::move(vals));
    }
    return out;
  };
  const auto avals = side_values(expand_relation(a), 0);
  const auto bvals = side_values(expand_relation(b), a.graph.nodes.size());

  LabellingRelation joint;
  joint.num_nodes = nclasses;
  std::vector<SpeciesId> tuple(nclasses);
  for (const auto& va : avals) {
    for (const auto& vb : bvals) {
      bool ok = true;
      for (std::size_t c = 0; c < nclasses && ok; ++c) {
        if (va[c] && vb[c] && *va[c] != *vb[c]) ok = false;
        else tuple[c] = va[c] ? *va[c] : *vb[c];
      }
      for (NodeId src = 0; src < nclasses && ok; ++src) {
        for (const auto& [f, dst] : merge.graph.nodes[src].arcs) {
          const auto& av = sig.spec_approp(tuple[src], f);
          if (!av || !av->test(tuple[dst])) {
            ok = false;
            break;
          }
        }
      }
      if (ok) joint.tuples.push_back(tuple);
    }
  }
  joint.normalize();
  if (joint.empty()) return std::nullopt;
  return canonical_drfs(sig, compact(sig, merge.graph, joint));
}

} // namespace tfs
