// tfs/signature.hpp - type hierarchies with appropriateness, compiled to species sets
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tfs/bitset.hpp"
#include "tfs/diagnostics.hpp"

namespace tfs
{

using TypeId = std::uint32_t;
using FeatureId = std::uint32_t;
using SpeciesId = std::uint32_t;

/// Raw signature declarations as they appear in a signature file: type
/// names, proper-subtype edges, and appropriateness entries. Identifier
/// references are resolved during compilation, not here.
struct SignatureDecls
{
  struct TypeDecl
  {
    std::string name;
    SourceSpan span;
  };
  struct SubtypeDecl
  {
    std::string general;
    std::string specific;
    SourceSpan span;
  };
  struct AppropDecl
  {
    std::string type;
    std::string feature;
    std::string value;
    SourceSpan span;
  };

  std::vector<TypeDecl> types;
  std::vector<SubtypeDecl> subtypes;
  std::vector<AppropDecl> approps;
};

/// A compiled signature: the finite subsumption order closed into per-type
/// species sets, plus the appropriateness table inherited down to species.
///
/// Type ids are dense and assigned in sorted-name order, so compilation is
/// independent of declaration order. Species ids index the subsequence of
/// types that subsume no other type, in type-id order. Feature ids are dense
/// in sorted-name order.
///
/// Immutable once built; safe to share across threads.
class CompiledSignature
{
public:
  [[nodiscard]] std::size_t num_types() const { return type_names_.size(); }
  [[nodiscard]] std::size_t num_features() const { return feature_names_.size(); }
  [[nodiscard]] std::size_t num_species() const { return species_.size(); }

  [[nodiscard]] const std::string& type_name(TypeId t) const { return type_names_[t]; }
  [[nodiscard]] const std::string& feature_name(FeatureId f) const { return feature_names_[f]; }

  [[nodiscard]] std::optional<TypeId> type_id(const std::string& name) const
  {
    auto it = type_ids_.find(name);
    if (it == type_ids_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] std::optional<FeatureId> feature_id(const std::string& name) const
  {
    auto it = feature_ids_.find(name);
    if (it == feature_ids_.end()) return std::nullopt;
    return it->second;
  }

  /// The type a species id stands for.
  [[nodiscard]] TypeId species_type(SpeciesId s) const { return species_[s]; }
  [[nodiscard]] const std::string& species_name(SpeciesId s) const
  {
    return type_names_[species_[s]];
  }

  /// Species id of a type, when the type is a species.
  [[nodiscard]] std::optional<SpeciesId> species_of(TypeId t) const
  {
    if (species_index_[t] == kNotSpecies) return std::nullopt;
    return species_index_[t];
  }

  [[nodiscard]] bool is_species(TypeId t) const { return species_index_[t] != kNotSpecies; }

  /// Set of species subsumed by t. Nonempty for every type.
  [[nodiscard]] const Bitset& species_set(TypeId t) const { return species_sets_[t]; }

  /// Declared subsumption: reflexive-transitive closure of the subtype edges.
  [[nodiscard]] bool subsumes(TypeId general, TypeId specific) const
  {
    return descendants_[general].test(specific);
  }

  /// Effective appropriateness after inheritance: the most specific value
  /// type declared for f on t or any of t's ancestors, when one exists.
  [[nodiscard]] std::optional<TypeId> approp(TypeId t, FeatureId f) const
  {
    return type_approp_[t][f];
  }

  /// Per-species appropriateness: the species set of approp(species, f),
  /// or nullopt when no ancestor of the species declares f.
  [[nodiscard]] const std::optional<Bitset>& spec_approp(SpeciesId s, FeatureId f) const
  {
    return spec_approp_[s][f];
  }

  /// All types whose species set equals the given set.
  [[nodiscard]] std::vector<TypeId> denoting_types(const Bitset& set) const
  {
    std::vector<TypeId> out;
    for (TypeId t = 0; t < num_types(); ++t) {
      if (species_sets_[t] == set) out.push_back(t);
    }
    return out;
  }

  /// The most general type denoting the set, when a unique one exists:
  /// a denoting type that subsumes every other denoting type.
  [[nodiscard]] std::optional<TypeId> most_general_denoting_type(const Bitset& set) const
  {
    const auto cands = denoting_types(set);
    for (TypeId c : cands) {
      bool general = true;
      for (TypeId other : cands) {
        if (!subsumes(c, other)) {
          general = false;
          break;
        }
      }
      if (general) return c;
    }
    return std::nullopt;
  }

  /// An empty species set sized to this signature.
  [[nodiscard]] Bitset empty_species_set() const { return Bitset(num_species()); }

  friend bool operator==(const CompiledSignature& a, const CompiledSignature& b)
  {
    return a.type_names_ == b.type_names_ && a.feature_names_ == b.feature_names_ &&
           a.descendants_ == b.descendants_ && a.species_ == b.species_ &&
           a.species_sets_ == b.species_sets_ && a.type_approp_ == b.type_approp_ &&
           a.spec_approp_ == b.spec_approp_;
  }

  friend CompiledSignature compile_signature(const SignatureDecls& decls);

private:
  static constexpr SpeciesId kNotSpecies = 0xffffffffu;

  std::vector<std::string> type_names_;
  std::unordered_map<std::string, TypeId> type_ids_;
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, FeatureId> feature_ids_;
  std::vector<Bitset> descendants_;   // per type: bitset over type ids, reflexive
  std::vector<TypeId> species_;       // species id -> type id, ascending
  std::vector<SpeciesId> species_index_;
  std::vector<Bitset> species_sets_;  // per type: bitset over species ids
  std::vector<std::vector<std::optional<TypeId>>> type_approp_;
  std::vector<std::vector<std::optional<Bitset>>> spec_approp_;
};

/// Compile declarations into a CompiledSignature.
///
/// Checks, in order: at least one type; no duplicate type declarations; all
/// referenced identifiers declared; subtype edges acyclic; no duplicate
/// (type, feature) appropriateness entry; value refinement on comparable
/// declaring types; a unique most specific inherited value at every species.
/// Throws SignatureError on the first violation.
inline CompiledSignature compile_signature(const SignatureDecls& decls)
{
  CompiledSignature sig;

  if (decls.types.empty()) {
    throw SignatureError("signature declares no types");
  }

  // Dense type ids in sorted-name order.
  {
    std::vector<std::string> names;
    names.reserve(decls.types.size());
    std::set<std::string> seen;
    for (const auto& td : decls.types) {
      if (!seen.insert(td.name).second) {
        throw SignatureError("duplicate declaration of type '" + td.name + "'");
      }
      names.push_back(td.name);
    }
    std::sort(names.begin(), names.end());
    sig.type_names_ = std::move(names);
    for (TypeId t = 0; t < sig.type_names_.size(); ++t) {
      sig.type_ids_.emplace(sig.type_names_[t], t);
    }
  }
  const auto ntypes = sig.type_names_.size();

  const auto require_type = [&sig](const std::string& name) -> TypeId {
    auto it = sig.type_ids_.find(name);
    if (it == sig.type_ids_.end()) {
      throw SignatureError("reference to undeclared type '" + name + "'");
    }
    return it->second;
  };

  // Proper-subtype adjacency. A type listed under itself is a cycle.
  std::vector<std::vector<TypeId>> children(ntypes);
  {
    std::set<std::pair<TypeId, TypeId>> seen;
    for (const auto& ed : decls.subtypes) {
      const TypeId g = require_type(ed.general);
      const TypeId s = require_type(ed.specific);
      if (g == s) {
        throw SignatureError("subtype cycle: type '" + ed.general +
                             "' is declared as its own subtype");
      }
      if (seen.insert({g, s}).second) children[g].push_back(s);
    }
    for (auto& cs : children) std::sort(cs.begin(), cs.end());
  }

  // Topological order over the proper-subtype DAG; rejects cycles.
  std::vector<TypeId> topo;
  {
    std::vector<std::uint32_t> indeg(ntypes, 0);
    for (TypeId t = 0; t < ntypes; ++t) {
      for (TypeId c : children[t]) ++indeg[c];
    }
    std::vector<TypeId> queue;
    for (TypeId t = 0; t < ntypes; ++t) {
      if (indeg[t] == 0) queue.push_back(t);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const TypeId t = queue[head];
      topo.push_back(t);
      for (TypeId c : children[t]) {
        if (--indeg[c] == 0) queue.push_back(c);
      }
    }
    if (topo.size() != ntypes) {
      throw SignatureError("cycle in subtype declarations");
    }
  }

  // Reflexive-transitive closure, processed children-first.
  sig.descendants_.assign(ntypes, Bitset(ntypes));
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const TypeId t = *it;
    sig.descendants_[t].set(t);
    for (TypeId c : children[t]) sig.descendants_[t] |= sig.descendants_[c];
  }

  // Species: types with no proper subtypes.
  sig.species_index_.assign(ntypes, CompiledSignature::kNotSpecies);
  for (TypeId t = 0; t < ntypes; ++t) {
    if (children[t].empty()) {
      sig.species_index_[t] = static_cast<SpeciesId>(sig.species_.size());
      sig.species_.push_back(t);
    }
  }
  const auto nspecies = sig.species_.size();

  sig.species_sets_.assign(ntypes, Bitset(nspecies));
  for (TypeId t = 0; t < ntypes; ++t) {
    for (SpeciesId s = 0; s < nspecies; ++s) {
      if (sig.descendants_[t].test(sig.species_[s])) sig.species_sets_[t].set(s);
    }
    // Finiteness: every type reaches at least one maximal type.
    if (sig.species_sets_[t].none()) {
      throw SignatureError("internal: type '" + sig.type_names_[t] + "' subsumes no species");
    }
  }

  // Feature ids in sorted-name order, drawn from the appropriateness entries.
  {
    std::set<std::string> fnames;
    for (const auto& ad : decls.approps) fnames.insert(ad.feature);
    sig.feature_names_.assign(fnames.begin(), fnames.end());
    for (FeatureId f = 0; f < sig.feature_names_.size(); ++f) {
      sig.feature_ids_.emplace(sig.feature_names_[f], f);
    }
  }
  const auto nfeatures = sig.feature_names_.size();

  // Declared entries, grouped by feature.
  std::vector<std::vector<std::pair<TypeId, TypeId>>> declared(nfeatures);
  {
    std::set<std::pair<TypeId, FeatureId>> seen;
    for (const auto& ad : decls.approps) {
      const TypeId t = require_type(ad.type);
      const TypeId v = require_type(ad.value);
      const FeatureId f = sig.feature_ids_.at(ad.feature);
      if (!seen.insert({t, f}).second) {
        throw SignatureError("duplicate appropriateness entry for feature '" + ad.feature +
                             "' on type '" + ad.type + "'");
      }
      declared[f].emplace_back(t, v);
    }
    for (auto& d : declared) std::sort(d.begin(), d.end());
  }

  // A declaration on a more specific type must refine the inherited value.
  for (FeatureId f = 0; f < nfeatures; ++f) {
    for (const auto& [t1, v1] : declared[f]) {
      for (const auto& [t2, v2] : declared[f]) {
        if (t1 == t2) continue;
        if (sig.subsumes(t1, t2) && !sig.subsumes(v1, v2)) {
          throw SignatureError(
              "appropriateness override conflict: feature '" + sig.feature_names_[f] +
              "' on type '" + sig.type_names_[t2] + "' has value '" + sig.type_names_[v2] +
              "', which does not refine '" + sig.type_names_[v1] + "' inherited from '" +
              sig.type_names_[t1] + "'");
        }
      }
    }
  }

  // Effective value per (type, feature): the unique most specific value
  // among declaring ancestors. Missing uniqueness is an error at species
  // (the all-or-nothing condition needs a definite answer there) and
  // leaves the entry undefined on interior types.
  sig.type_approp_.assign(ntypes, std::vector<std::optional<TypeId>>(nfeatures));
  for (TypeId t = 0; t < ntypes; ++t) {
    for (FeatureId f = 0; f < nfeatures; ++f) {
      std::vector<TypeId> values;
      for (const auto& [d, v] : declared[f]) {
        if (sig.subsumes(d, t)) values.push_back(v);
      }
      if (values.empty()) continue;
      std::optional<TypeId> best;
      for (TypeId cand : values) {
        bool refines_all = true;
        for (TypeId v : values) {
          if (!sig.subsumes(v, cand)) {
            refines_all = false;
            break;
          }
        }
        if (refines_all) {
          best = cand;
          break;
        }
      }
      if (!best && sig.is_species(t)) {
        throw SignatureError("appropriateness inheritance conflict at species '" +
                             sig.type_names_[t] + "' for feature '" + sig.feature_names_[f] +
                             "': no unique most specific value type");
      }
      sig.type_approp_[t][f] = best;
    }
  }

  sig.spec_approp_.assign(nspecies, std::vector<std::optional<Bitset>>(nfeatures));
  for (SpeciesId s = 0; s < nspecies; ++s) {
    for (FeatureId f = 0; f < nfeatures; ++f) {
      const auto& v = sig.type_approp_[sig.species_[s]][f];
      if (v) sig.spec_approp_[s][f] = sig.species_sets_[*v];
    }
  }

  return sig;
}

/// Species subsumed by a named type.
inline const Bitset& species_set(const CompiledSignature& sig, const std::string& type)
{
  const auto t = sig.type_id(type);
  if (!t) throw Error("unknown type '" + type + "'");
  return sig.species_set(*t);
}

/// Declared subsumption between two named types.
inline bool subsumes_type(const CompiledSignature& sig, const std::string& general,
                          const std::string& specific)
{
  const auto g = sig.type_id(general);
  const auto s = sig.type_id(specific);
  if (!g) throw Error("unknown type '" + general + "'");
  if (!s) throw Error("unknown type '" + specific + "'");
  return sig.subsumes(*g, *s);
}

} // namespace tfs
