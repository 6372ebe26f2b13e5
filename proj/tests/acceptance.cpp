// Acceptance gate. Runs one check per release criterion and prints a single
// PASS/FAIL line for each; exits nonzero if any line fails. Criteria 1-5 pin
// exact behaviour on the two small example signatures, 6-8 are seeded random
// sweeps, and 9 re-parses everything the earlier criteria printed.

#include <tfs/tfs.hpp>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <cstdint>
#include <cstdio>
#include <deque>
#include <exception>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace {

// Everything built while checking criteria 1-8 is recorded here so that
// criterion 9 can put it through a print/parse round trip. Signatures made
// on the fly live in a deque to keep their addresses stable.
std::deque<tfs::CompiledSignature> sig_store;
std::vector<std::pair<const tfs::CompiledSignature*, tfs::FeatureGraph>> seen_graphs;
std::vector<std::pair<const tfs::CompiledSignature*, tfs::CompactDRFS>> seen_drfs;

void keep(const tfs::CompiledSignature& sig, const tfs::FeatureGraph& g)
{
  seen_graphs.emplace_back(&sig, g);
}

void keep(const tfs::CompiledSignature& sig, const tfs::CompactDRFS& d)
{
  seen_drfs.emplace_back(&sig, d);
}

// Product of node label sizes: an easy upper bound on how many resolvents a
// graph can have. The random sweeps skip inputs above the cap so that the
// brute-force oracle and pairwise expansions stay cheap.
constexpr std::uint64_t kProductCap = 300;

std::uint64_t label_product(const tfs::FeatureGraph& g)
{
  std::uint64_t p = 1;
  for (const auto& n : g.nodes) {
    p *= n.label.count();
    if (p > kProductCap) break;
  }
  return p;
}

bool criterion1(std::string& why)
{
  const auto& sig = testutil::rho();
  const auto phi = tfs::parse_avm(sig, "t(f:+, g:-)");
  keep(sig, phi);
  if (!tfs::is_well_typed(sig, phi)) {
    why = "t(f:+, g:-) should be well-typed";
    return false;
  }
  if (!tfs::is_well_typable(sig, phi)) {
    why = "t(f:+, g:-) should be well-typable";
    return false;
  }
  if (!tfs::resolve(sig, phi).empty()) {
    why = "t(f:+, g:-) should have no resolvents";
    return false;
  }
  return true;
}

bool criterion2(std::string& why)
{
  const auto& sig = testutil::rho();
  const auto g = tfs::parse_avm(sig, "t(f:bool, g:bool)");
  keep(sig, g);
  const auto resolvents = tfs::resolvent_graphs(sig, g, tfs::resolve(sig, g));
  for (const auto& r : resolvents) keep(sig, r);
  if (resolvents.size() != 2) {
    why = "expected exactly two resolvents, got " + std::to_string(resolvents.size());
    return false;
  }
  std::vector<tfs::FeatureGraph> want;
  want.push_back(tfs::parse_avm(sig, "t'(f:+, g:+)"));
  want.push_back(tfs::parse_avm(sig, "t''(f:-, g:-)"));
  for (const auto& w : want) keep(sig, w);
  if (testutil::graph_keys(resolvents) != testutil::graph_keys(want)) {
    why = "resolvents differ from {t'(f:+, g:+), t''(f:-, g:-)}";
    return false;
  }
  return true;
}

bool criterion3(std::string& why)
{
  const auto& sig = testutil::rho();
  const auto d = tfs::resolve_compact(sig, tfs::parse_avm(sig, "t(f:bool, g:bool)"));
  if (!d) {
    why = "t(f:bool, g:bool) did not resolve";
    return false;
  }
  keep(sig, *d);
  const auto text = tfs::print_drfs(sig, *d);
  if (text != "$1<t'|t''>(f:$1<+|->, g:$1<+|->)") {
    why = "printed \"" + text + "\"";
    return false;
  }
  if (d->arities != std::vector<std::uint32_t>{2}) {
    why = "expected a single name of arity 2";
    return false;
  }
  std::size_t columns = 0;
  for (const auto& b : d->bindings) {
    if (std::holds_alternative<tfs::ColumnBinding>(b)) ++columns;
  }
  if (columns != 3) {
    why = "expected three column bindings, got " + std::to_string(columns);
    return false;
  }
  return true;
}

bool criterion4(std::string& why)
{
  const auto& sig = testutil::rho();

  const auto d1 = tfs::resolve_compact(sig, tfs::parse_avm(sig, "t(f:bool, g:bool)"));
  if (!d1) {
    why = "t(f:bool, g:bool) did not resolve";
    return false;
  }
  const auto u1 = tfs::unfill(sig, *d1);
  keep(sig, u1);
  if (const auto text = tfs::print_drfs(sig, u1); text != "t") {
    why = "unfill of t(f:bool, g:bool) printed \"" + text + "\", want \"t\"";
    return false;
  }

  const auto d2 = tfs::resolve_compact(sig, tfs::parse_avm(sig, "t(f:+)"));
  if (!d2) {
    why = "t(f:+) did not resolve";
    return false;
  }
  const auto u2 = tfs::unfill(sig, *d2);
  keep(sig, u2);
  if (const auto text = tfs::print_drfs(sig, u2); text != "t'") {
    why = "unfill of t(f:+) printed \"" + text + "\", want \"t'\"";
    return false;
  }

  // Regression for the pipeline order: unfilling t(f:+) by the type-level
  // rule before resolving keeps the f arc (bool is not predicted by +), so
  // the two orders must disagree here.
  const auto naive = testutil::naive_unfill(sig, tfs::parse_drfs(sig, "t(f:+)"));
  keep(sig, naive);
  const auto naive_resolved = tfs::resolve_compact(sig, naive.graph);
  if (!naive_resolved) {
    why = "unfill-first pipeline lost satisfiability";
    return false;
  }
  keep(sig, *naive_resolved);
  if (naive_resolved->graph.nodes.size() != 2) {
    why = "unfill-first pipeline was expected to keep the f arc";
    return false;
  }
  if (tfs::drfs_equivalent(sig, u2, *naive_resolved)) {
    why = "the two pipeline orders unexpectedly agree on t(f:+)";
    return false;
  }
  return true;
}

bool criterion5(std::string& why)
{
  const auto& sig = testutil::inv();

  const auto bad = tfs::parse_avm(sig, "verb(INV:+, AUX:-)");
  keep(sig, bad);
  if (!tfs::resolve(sig, bad).empty()) {
    why = "verb(INV:+, AUX:-) should be unsatisfiable";
    return false;
  }

  const auto g = tfs::parse_avm(sig, "verb(INV:+)");
  keep(sig, g);
  const auto resolvents = tfs::resolvent_graphs(sig, g, tfs::resolve(sig, g));
  for (const auto& r : resolvents) keep(sig, r);
  std::vector<tfs::FeatureGraph> want;
  want.push_back(tfs::parse_avm(sig, "v1(INV:+)"));
  keep(sig, want[0]);
  if (testutil::graph_keys(resolvents) != testutil::graph_keys(want) || resolvents.size() != 1) {
    why = "verb(INV:+) should resolve to exactly v1(INV:+)";
    return false;
  }

  const auto a = tfs::resolve_compact(sig, tfs::parse_avm(sig, "verb(INV:+)"));
  const auto b = tfs::resolve_compact(sig, tfs::parse_avm(sig, "verb(AUX:bool)"));
  if (!a || !b) {
    why = "inputs to the unification step did not resolve";
    return false;
  }
  keep(sig, *a);
  keep(sig, *b);
  const auto u = tfs::drfs_unify(sig, *a, *b);
  if (!u) {
    why = "verb(INV:+) and verb(AUX:bool) should unify";
    return false;
  }
  keep(sig, *u);
  const auto graphs = tfs::expand(sig, *u);
  if (graphs.empty()) {
    why = "unification result has an empty expansion";
    return false;
  }
  const auto aux = sig.feature_id("AUX");
  const auto plus = testutil::species(sig, "+");
  for (const auto& fg : graphs) {
    keep(sig, fg);
    bool found = false;
    for (const auto& [f, m] : fg.nodes[fg.root].arcs) {
      if (f != *aux) continue;
      found = true;
      if (!fg.nodes[m].label.is_singleton() || fg.nodes[m].label.first() != plus) {
        why = "expansion does not force AUX:+";
        return false;
      }
    }
    if (!found) {
      why = "expansion lost the AUX arc";
      return false;
    }
  }
  return true;
}

// Criteria 6 and 7 share one randomized suite of (signature, F, F') triples.
struct SuiteResult {
  int triples = 0;
  int closure_mismatches = 0;
  int oracle_mismatches = 0;
};

SuiteResult run_suite()
{
  SuiteResult out;
  testutil::Rng rng(20260823u);
  constexpr int kWanted = 500;
  for (int attempt = 0; attempt < 20000 && out.triples < kWanted; ++attempt) {
    sig_store.push_back(testutil::random_signature(rng));
    const auto& sig = sig_store.back();
    const auto f1 = testutil::random_graph(sig, rng);
    const auto f2 = testutil::random_graph(sig, rng);
    if (label_product(f1) > kProductCap || label_product(f2) > kProductCap) {
      sig_store.pop_back();
      continue;
    }
    ++out.triples;
    keep(sig, f1);
    keep(sig, f2);

    // Left: resolve and compact both sides, unify the compacted forms,
    // expand. A failure anywhere gives the empty set.
    std::set<std::string> left;
    const auto d1 = tfs::resolve_compact(sig, f1);
    const auto d2 = tfs::resolve_compact(sig, f2);
    if (d1) keep(sig, *d1);
    if (d2) keep(sig, *d2);
    if (d1 && d2) {
      if (const auto du = tfs::drfs_unify(sig, *d1, *d2)) {
        keep(sig, *du);
        std::size_t recorded = 0;
        for (const auto& r : tfs::expand(sig, *du)) {
          left.insert(testutil::graph_key(r));
          if (recorded++ < 64) keep(sig, r);
        }
      }
    }

    // Right: unify the graphs directly, then resolve. Unification failure
    // and an unsatisfiable result both give the empty set, matching the
    // left side's failure modes.
    std::set<std::string> right;
    if (const auto gu = tfs::graph_unify(f1, f2)) {
      keep(sig, *gu);
      std::size_t recorded = 0;
      for (const auto& r : tfs::resolvent_graphs(sig, *gu, tfs::resolve(sig, *gu))) {
        right.insert(testutil::graph_key(r));
        if (recorded++ < 64) keep(sig, r);
      }
    }
    if (left != right) ++out.closure_mismatches;

    for (const tfs::FeatureGraph* fg : {&f1, &f2}) {
      auto fast = tfs::resolve(sig, *fg);
      auto slow = tfs::brute_force_resolve(sig, *fg);
      fast.normalize();
      slow.normalize();
      if (!(fast == slow)) ++out.oracle_mismatches;
    }
  }
  return out;
}

struct CongruenceResult {
  int pairs = 0;
  int mismatches = 0;
};

CongruenceResult run_congruence()
{
  CongruenceResult out;
  testutil::Rng rng(0x5eedf00du);
  constexpr int kWanted = 200;
  for (int attempt = 0; attempt < 20000 && out.pairs < kWanted; ++attempt) {
    sig_store.push_back(testutil::random_signature(rng));
    const auto& sig = sig_store.back();
    const auto g1 = testutil::random_graph(sig, rng);
    const auto g2 = testutil::random_graph(sig, rng);
    if (label_product(g1) > kProductCap || label_product(g2) > kProductCap) {
      sig_store.pop_back();
      continue;
    }
    const auto d1 = tfs::resolve_compact(sig, g1);
    const auto d2 = tfs::resolve_compact(sig, g2);
    if (!d1 || !d2) {
      sig_store.pop_back();
      continue;
    }
    ++out.pairs;
    keep(sig, *d1);
    keep(sig, *d2);
    keep(sig, tfs::unfill(sig, *d1));
    keep(sig, tfs::unfill(sig, *d2));
    if (const auto u = tfs::drfs_unify(sig, *d1, *d2)) {
      keep(sig, *u);
      keep(sig, tfs::unfill(sig, *u));
    }
    if (!testutil::unfill_congruence_check(sig, *d1, *d2)) ++out.mismatches;
  }
  return out;
}

bool criterion9(std::string& why)
{
  if (seen_graphs.empty() || seen_drfs.empty()) {
    why = "earlier criteria recorded nothing";
    return false;
  }
  for (const auto& [sig, g] : seen_graphs) {
    const auto text = tfs::print_avm(*sig, g);
    if (testutil::graph_key(tfs::parse_avm(*sig, text)) != testutil::graph_key(g)) {
      why = "graph round trip changed \"" + text + "\"";
      return false;
    }
  }
  for (const auto& [sig, d] : seen_drfs) {
    const auto text = tfs::print_drfs(*sig, d);
    if (!tfs::drfs_equivalent(*sig, tfs::parse_drfs(*sig, text), d)) {
      why = "structure round trip changed \"" + text + "\"";
      return false;
    }
  }
  return true;
}

} // namespace

int main()
{
  int failed = 0;
  const auto run = [&failed](int n, const std::string& name, auto&& fn) {
    std::string why;
    bool ok = false;
    try {
      ok = fn(why);
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    std::string line = ok ? "PASS" : "FAIL";
    line += "  criterion " + std::to_string(n) + ": " + name;
    if (!ok && !why.empty()) line += "  [" + why + "]";
    std::puts(line.c_str());
    if (!ok) ++failed;
  };

  run(1, "t(f:+, g:-) is well-typed and well-typable yet unsatisfiable", criterion1);
  run(2, "t(f:bool, g:bool) has exactly the two expected resolvents", criterion2);
  run(3, "compaction of t(f:bool, g:bool) prints one name over three columns", criterion3);
  run(4, "unfilling collapses t(f:bool, g:bool) to t and t(f:+) to t'", criterion4);
  run(5, "inverted-verb restriction: INV:+ forces AUX:+", criterion5);

  SuiteResult suite;
  std::string suite_error;
  try {
    suite = run_suite();
  } catch (const std::exception& e) {
    suite_error = std::string("exception: ") + e.what();
  }
  run(6,
      "unification commutes with resolution on " + std::to_string(suite.triples) +
          " random triples",
      [&](std::string& why) {
        if (!suite_error.empty()) {
          why = suite_error;
          return false;
        }
        if (suite.triples < 500) {
          why = "only " + std::to_string(suite.triples) + " triples generated";
          return false;
        }
        if (suite.closure_mismatches != 0) {
          why = std::to_string(suite.closure_mismatches) + " mismatches";
          return false;
        }
        return true;
      });
  run(7, "resolver agrees with the brute-force oracle on the same suite",
      [&](std::string& why) {
        if (!suite_error.empty()) {
          why = suite_error;
          return false;
        }
        if (suite.oracle_mismatches != 0) {
          why = std::to_string(suite.oracle_mismatches) + " mismatches";
          return false;
        }
        return true;
      });

  CongruenceResult cong;
  std::string cong_error;
  try {
    cong = run_congruence();
  } catch (const std::exception& e) {
    cong_error = std::string("exception: ") + e.what();
  }
  run(8,
      "unfilling commutes with unification on " + std::to_string(cong.pairs) + " random pairs",
      [&](std::string& why) {
        if (!cong_error.empty()) {
          why = cong_error;
          return false;
        }
        if (cong.pairs < 200) {
          why = "only " + std::to_string(cong.pairs) + " pairs generated";
          return false;
        }
        if (cong.mismatches != 0) {
          why = std::to_string(cong.mismatches) + " mismatches";
          return false;
        }
        return true;
      });

  run(9,
      "print/parse round trip on all " +
          std::to_string(seen_graphs.size() + seen_drfs.size()) + " recorded structures",
      criterion9);

  return failed == 0 ? 0 : 1;
}
