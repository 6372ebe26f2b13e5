// Shared signature fixtures for the test suites.
#pragma once

#include <string>

#include <tfs/tfs.hpp>

namespace testutil
{

// The running example: a disjunctive cooccurrence restriction on t,
// encoded by the species t' (f:+ g:+) and t'' (f:- g:-).
inline constexpr const char* kSigRho = R"(
type bool sub {+ -}.
type + .
type - .
type t sub {t' t''} approp {f:bool g:bool}.
type t' approp {f:+ g:+}.
type t'' approp {f:- g:-}.
)";

// Inverted verbs must be auxiliaries: the admissible INV/AUX pairs are
// enumerated by the three verb species.
inline constexpr const char* kSigInv = R"(
type bool sub {+ -}.
type + .
type - .
type verb sub {v1 v2 v3} approp {INV:bool AUX:bool}.
type v1 approp {INV:+ AUX:+}.
type v2 approp {INV:- AUX:+}.
type v3 approp {INV:- AUX:-}.
)";

// kSigRho plus a pair type with two independent t-valued features.
inline constexpr const char* kSigRho2 = R"(
type bool sub {+ -}.
type + .
type - .
type t sub {t' t''} approp {f:bool g:bool}.
type t' approp {f:+ g:+}.
type t'' approp {f:- g:-}.
type r approp {a:t b:t}.
)";

// A constraint along the path SUBJ CASE, pushed through np species.
inline constexpr const char* kSigChain = R"(
type case sub {nom acc}.
type nom .
type acc .
type np sub {np_nom np_acc} approp {CASE:case}.
type np_nom approp {CASE:nom}.
type np_acc approp {CASE:acc}.
type vp sub {fin inf} approp {SUBJ:np}.
type fin approp {SUBJ:np_nom}.
type inf approp {SUBJ:np_acc}.
)";

inline tfs::CompiledSignature compile(const std::string& source)
{
  return tfs::compile_signature(tfs::parse_signature(source));
}

inline const tfs::CompiledSignature& rho()
{
  static const tfs::CompiledSignature sig = compile(kSigRho);
  return sig;
}

inline const tfs::CompiledSignature& inv()
{
  static const tfs::CompiledSignature sig = compile(kSigInv);
  return sig;
}

inline const tfs::CompiledSignature& rho2()
{
  static const tfs::CompiledSignature sig = compile(kSigRho2);
  return sig;
}

inline const tfs::CompiledSignature& chain()
{
  static const tfs::CompiledSignature sig = compile(kSigChain);
  return sig;
}

inline tfs::SpeciesId species(const tfs::CompiledSignature& sig, const std::string& name)
{
  return *sig.species_of(*sig.type_id(name));
}

} // namespace testutil
