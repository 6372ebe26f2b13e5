// tfs/cli.hpp - the tfs command-line front end
//
// Subcommands: check-sig, welltyped, welltypable, resolve, compact,
// unfill, unify. Exit codes: 0 success / predicate true; 1 unsatisfiable,
// unification failure, or predicate false; 2 usage or parse error;
// 3 ill-formed signature.
#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tfs/diagnostics.hpp"
#include "tfs/drfs.hpp"
#include "tfs/feature_graph.hpp"
#include "tfs/resolve.hpp"
#include "tfs/signature.hpp"
#include "tfs/textio.hpp"
#include "tfs/unfill.hpp"

namespace tfs
{

namespace detail
{

inline std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// An input argument is a file path when it names a readable file,
/// otherwise it is taken as inline AVM text.
inline std::string read_input(const std::string& arg)
{
  std::ifstream in(arg, std::ios::binary);
  if (!in) return arg;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline nlohmann::json json_label(const CompiledSignature& sig, const Bitset& label)
{
  auto arr = nlohmann::json::array();
  for (const auto s : label.members()) arr.push_back(sig.species_name(s));
  return arr;
}

inline nlohmann::json json_graph(const CompiledSignature& sig, const FeatureGraph& g)
{
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId n = 0; n < g.nodes.size(); ++n) {
    nlohmann::json arcs = nlohmann::json::array();
    for (const auto& [f, m] : g.nodes[n].arcs) {
      arcs.push_back({{"feature", sig.feature_name(f)}, {"target", m}});
    }
    nodes.push_back({{"id", n}, {"label", json_label(sig, g.nodes[n].label)}, {"arcs", arcs}});
  }
  return {{"root", g.root}, {"nodes", nodes}, {"text", print_avm(sig, g)}};
}

inline nlohmann::json json_drfs(const CompiledSignature& sig, const CompactDRFS& d)
{
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId n = 0; n < d.graph.nodes.size(); ++n) {
    nlohmann::json arcs = nlohmann::json::array();
    for (const auto& [f, m] : d.graph.nodes[n].arcs) {
      arcs.push_back({{"feature", sig.feature_name(f)}, {"target", m}});
    }
    nlohmann::json binding;
    const auto& b = d.bindings[n];
    if (const auto* fx = std::get_if<FixedBinding>(&b)) {
      binding = {{"kind", "fixed"}, {"species", sig.species_name(fx->species)}};
    } else if (const auto* fr = std::get_if<FreeBinding>(&b)) {
      binding = {{"kind", "free"}, {"set", json_label(sig, fr->set)}};
    } else {
      const auto& col = std::get<ColumnBinding>(b);
      auto alts = nlohmann::json::array();
      for (const auto s : col.alts) alts.push_back(sig.species_name(s));
      binding = {{"kind", "column"}, {"name", col.name}, {"alts", alts}};
    }
    nodes.push_back({{"id", n}, {"binding", binding}, {"arcs", arcs}});
  }
  nlohmann::json disjunctions = nlohmann::json::array();
  for (DisjName name = 0; name < d.arities.size(); ++name) {
    disjunctions.push_back({{"name", name}, {"arity", d.arities[name]}});
  }
  return {{"root", d.graph.root},
          {"nodes", nodes},
          {"disjunctions", disjunctions},
          {"text", print_drfs(sig, d)}};
}

} // namespace detail

/// Runs the command line given the arguments after the program name.
/// All regular output goes to `out`, diagnostics to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"typed feature structures with appropriateness via type resolution", "tfs"};
  app.require_subcommand(1);
  // Global flags may trail the subcommand, e.g. `unify A B --no-unfill`.
  app.fallthrough();

  std::string sig_path;
  bool json = false;
  bool oracle = false;
  bool no_unfill = false;
  std::uint64_t bound = kDefaultResolveBound;
  app.add_option("--sig", sig_path, "signature file")->required();
  app.add_flag("--json", json, "emit JSON instead of plain text");
  app.add_flag("--oracle", oracle, "resolve by brute-force enumeration");
  app.add_option("--bound", bound, "labelling bound for --oracle");
  app.add_flag("--no-unfill", no_unfill, "keep filled features in unify output");

  std::string avm1, avm2;
  auto* check_sig = app.add_subcommand("check-sig", "compile the signature and print a summary");
  auto* welltyped = app.add_subcommand("welltyped", "is the structure well-typed?");
  welltyped->add_option("avm", avm1, "AVM file or inline text")->required();
  auto* welltypable = app.add_subcommand("welltypable", "is some refinement well-typed?");
  welltypable->add_option("avm", avm1, "AVM file or inline text")->required();
  auto* resolve_cmd = app.add_subcommand("resolve", "print all resolvents");
  resolve_cmd->add_option("avm", avm1, "AVM file or inline text")->required();
  auto* compact_cmd = app.add_subcommand("compact", "resolve and compact");
  compact_cmd->add_option("avm", avm1, "AVM file or inline text")->required();
  auto* unfill_cmd = app.add_subcommand("unfill", "resolve, compact, and unfill");
  unfill_cmd->add_option("avm", avm1, "AVM file or inline text")->required();
  auto* unify_cmd = app.add_subcommand("unify", "unify two structures");
  unify_cmd->add_option("left", avm1, "AVM file or inline text")->required();
  unify_cmd->add_option("right", avm2, "AVM file or inline text")->required();

  try {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("tfs");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    const auto sig = compile_signature(parse_signature(detail::read_file(sig_path)));

    // Structures printed by unfill/unify may use named disjunctions on
    // input; plain queries take ordinary AVMs only.
    const auto load_compact = [&](const std::string& arg) -> std::optional<CompactDRFS> {
      const auto text = detail::read_input(arg);
      if (text.find('$') != std::string::npos) return parse_drfs(sig, text);
      const auto graph = parse_avm(sig, text);
      const auto rel = oracle ? brute_force_resolve(sig, graph, bound) : resolve(sig, graph);
      if (rel.empty()) return std::nullopt;
      return compact(sig, graph, rel);
    };

    if (*check_sig) {
      if (json) {
        nlohmann::json species = nlohmann::json::array();
        nlohmann::json approp = nlohmann::json::object();
        for (SpeciesId s = 0; s < sig.num_species(); ++s) {
          species.push_back(sig.species_name(s));
          nlohmann::json row = nlohmann::json::object();
          for (FeatureId f = 0; f < sig.num_features(); ++f) {
            const auto& av = sig.spec_approp(s, f);
            if (av) row[sig.feature_name(f)] = detail::json_label(sig, *av);
          }
          approp[sig.species_name(s)] = row;
        }
        out << nlohmann::json{{"types", sig.num_types()},
                              {"features", sig.num_features()},
                              {"species", species},
                              {"approp", approp}}
                   .dump()
            << "\n";
      } else {
        out << "types: " << sig.num_types() << "\n";
        out << "features: " << sig.num_features() << "\n";
        out << "species:";
        for (SpeciesId s = 0; s < sig.num_species(); ++s) out << " " << sig.species_name(s);
        out << "\n";
        for (SpeciesId s = 0; s < sig.num_species(); ++s) {
          out << "approp " << sig.species_name(s) << ":";
          for (FeatureId f = 0; f < sig.num_features(); ++f) {
            const auto& av = sig.spec_approp(s, f);
            if (av) out << " " << sig.feature_name(f) << ":" << detail::species_set_text(sig, *av);
          }
          out << "\n";
        }
      }
      return 0;
    }

    if (*welltyped || *welltypable) {
      const auto graph = parse_avm(sig, detail::read_input(avm1));
      std::string diag;
      const bool answer =
          *welltyped ? is_well_typed(sig, graph, &diag) : is_well_typable(sig, graph);
      if (json) {
        nlohmann::json rec{{*welltyped ? "welltyped" : "welltypable", answer}};
        if (*welltyped && !answer) rec["diagnostic"] = diag;
        out << rec.dump() << "\n";
      } else {
        out << (answer ? "true" : "false") << "\n";
        if (*welltyped && !answer && !diag.empty()) err << diag << "\n";
      }
      return answer ? 0 : 1;
    }

    if (*resolve_cmd) {
      const auto graph = parse_avm(sig, detail::read_input(avm1));
      const auto rel = oracle ? brute_force_resolve(sig, graph, bound) : resolve(sig, graph);
      if (json) {
        nlohmann::json resolvents = nlohmann::json::array();
        for (const auto& g : resolvent_graphs(sig, graph, rel)) {
          resolvents.push_back(detail::json_graph(sig, g));
        }
        out << nlohmann::json{{"satisfiable", !rel.empty()}, {"resolvents", resolvents}}.dump()
            << "\n";
      } else if (rel.empty()) {
        out << "UNSATISFIABLE\n";
      } else {
        for (const auto& g : resolvent_graphs(sig, graph, rel)) {
          out << print_avm(sig, g) << "\n";
        }
      }
      return rel.empty() ? 1 : 0;
    }

    if (*compact_cmd || *unfill_cmd) {
      auto d = load_compact(avm1);
      if (d && *unfill_cmd) d = unfill(sig, *d);
      if (json) {
        nlohmann::json rec{{"satisfiable", d.has_value()}};
        if (d) rec["structure"] = detail::json_drfs(sig, *d);
        out << rec.dump() << "\n";
      } else {
        out << (d ? print_drfs(sig, *d) : "UNSATISFIABLE") << "\n";
      }
      return d ? 0 : 1;
    }

    // unify
    auto left = load_compact(avm1);
    auto right = load_compact(avm2);
    if (!left || !right) {
      if (json) {
        out << nlohmann::json{{"satisfiable", false}, {"success", false}}.dump() << "\n";
      } else {
        out << "UNSATISFIABLE\n";
      }
      return 1;
    }
    if (!no_unfill) {
      left = unfill(sig, *left);
      right = unfill(sig, *right);
    }
    auto result = drfs_unify(sig, *left, *right);
    if (result && !no_unfill) result = unfill(sig, *result);
    if (json) {
      nlohmann::json rec{{"satisfiable", true}, {"success", result.has_value()}};
      if (result) rec["structure"] = detail::json_drfs(sig, *result);
      out << rec.dump() << "\n";
    } else {
      out << (result ? print_drfs(sig, *result) : "FAIL") << "\n";
    }
    return result ? 0 : 1;
  } catch (const SignatureError& e) {
    err << "signature error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

} // namespace tfs
