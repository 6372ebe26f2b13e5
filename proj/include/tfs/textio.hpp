// tfs/textio.hpp - surface syntax: signature files, AVM text, canonical printing
//
// Signature grammar:
//   file := decl* ; decl := "type" ident opts "."
//   opts := ("sub" "{" ident+ "}")? ("approp" "{" (ident ":" ident)+ "}")?
// AVM grammar:
//   avm  := tag? node ; node := typeexpr ("(" feat ":" avm ("," feat ":" avm)* ")")?
//   tag  := "#"? ident "=" ; typeexpr := ident | "$" int "<" ident ("|" ident)+ ">"
//         | "{" ident+ "}"
// plus bare tag names as back references. Identifiers are runs of letters,
// digits, _ + - ' not starting with a digit; "%" comments to end of line.
#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tfs/diagnostics.hpp"
#include "tfs/drfs.hpp"
#include "tfs/feature_graph.hpp"
#include "tfs/signature.hpp"

namespace tfs
{

namespace detail
{

enum class TokKind
{
  Ident,
  Int,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Less,
  Greater,
  Colon,
  Comma,
  Period,
  Equals,
  Hash,
  Dollar,
  Pipe,
  End
};

struct Token
{
  TokKind kind = TokKind::End;
  std::string text;
  SourceSpan span;
};

inline bool ident_start(char c)
{
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '+' || c == '-' ||
         c == '\'';
}

inline bool ident_char(char c)
{
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

inline const char* token_kind_name(TokKind k)
{
  switch (k) {
    case TokKind::Ident: return "identifier";
    case TokKind::Int: return "integer";
    case TokKind::LParen: return "'('";
    case TokKind::RParen: return "')'";
    case TokKind::LBrace: return "'{'";
    case TokKind::RBrace: return "'}'";
    case TokKind::Less: return "'<'";
    case TokKind::Greater: return "'>'";
    case TokKind::Colon: return "':'";
    case TokKind::Comma: return "','";
    case TokKind::Period: return "'.'";
    case TokKind::Equals: return "'='";
    case TokKind::Hash: return "'#'";
    case TokKind::Dollar: return "'$'";
    case TokKind::Pipe: return "'|'";
    case TokKind::End: return "end of input";
  }
  return "?";
}

inline std::vector<Token> lex(std::string_view text)
{
  std::vector<Token> out;
  std::size_t i = 0;
  std::uint32_t line = 1;
  std::size_t line_start = 0;
  const auto span_at = [&](std::size_t begin, std::size_t end) {
    return SourceSpan{begin, end, line, static_cast<std::uint32_t>(begin - line_start + 1)};
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    const std::size_t begin = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({TokKind::Int, std::string(text.substr(begin, i - begin)), span_at(begin, i)});
      continue;
    }
    if (ident_start(c)) {
      while (i < text.size() && ident_char(text[i])) ++i;
      out.push_back(
          {TokKind::Ident, std::string(text.substr(begin, i - begin)), span_at(begin, i)});
      continue;
    }
    TokKind kind;
    switch (c) {
      case '(': kind = TokKind::LParen; break;
      case ')': kind = TokKind::RParen; break;
      case '{': kind = TokKind::LBrace; break;
      case '}': kind = TokKind::RBrace; break;
      case '<': kind = TokKind::Less; break;
      case '>': kind = TokKind::Greater; break;
      case ':': kind = TokKind::Colon; break;
      case ',': kind = TokKind::Comma; break;
      case '.': kind = TokKind::Period; break;
      case '=': kind = TokKind::Equals; break;
      case '#': kind = TokKind::Hash; break;
      case '$': kind = TokKind::Dollar; break;
      case '|': kind = TokKind::Pipe; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", span_at(begin, i + 1));
    }
    ++i;
    out.push_back({kind, std::string(text.substr(begin, 1)), span_at(begin, i)});
  }
  out.push_back({TokKind::End, "", span_at(i, i)});
  return out;
}

class TokenStream
{
public:
  explicit TokenStream(std::string_view text) : toks_(lex(text)) {}

  [[nodiscard]] const Token& peek(std::size_t ahead = 0) const
  {
    const std::size_t at = pos_ + ahead;
    return toks_[at < toks_.size() ? at : toks_.size() - 1];
  }

  Token next()
  {
    const Token& t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  Token expect(TokKind kind, const std::string& what)
  {
    if (peek().kind != kind) {
      fail(peek(), "expected " + what + ", found " + describe(peek()));
    }
    return next();
  }

  [[noreturn]] static void fail(const Token& at, const std::string& msg)
  {
    throw ParseError(msg, at.span);
  }

  static std::string describe(const Token& t)
  {
    if (t.kind == TokKind::Ident || t.kind == TokKind::Int) return "'" + t.text + "'";
    return token_kind_name(t.kind);
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Parses a signature file into raw declarations. Syntax errors and
/// duplicate type declarations throw ParseError; everything else is left
/// to compile_signature.
inline SignatureDecls parse_signature(std::string_view text)
{
  using detail::TokKind;
  detail::TokenStream ts(text);
  SignatureDecls decls;
  std::set<std::string> declared;
  while (ts.peek().kind != TokKind::End) {
    const auto kw = ts.expect(TokKind::Ident, "'type'");
    if (kw.text != "type") detail::TokenStream::fail(kw, "expected 'type'");
    const auto name = ts.expect(TokKind::Ident, "a type name");
    if (!declared.insert(name.text).second) {
      detail::TokenStream::fail(name, "duplicate declaration of type '" + name.text + "'");
    }
    decls.types.push_back({name.text, name.span});
    if (ts.peek().kind == TokKind::Ident && ts.peek().text == "sub") {
      ts.next();
      ts.expect(TokKind::LBrace, "'{'");
      if (ts.peek().kind != TokKind::Ident) {
        detail::TokenStream::fail(ts.peek(), "expected at least one subtype name");
      }
      while (ts.peek().kind == TokKind::Ident) {
        const auto sub = ts.next();
        decls.subtypes.push_back({name.text, sub.text, sub.span});
      }
      ts.expect(TokKind::RBrace, "'}'");
    }
    if (ts.peek().kind == TokKind::Ident && ts.peek().text == "approp") {
      ts.next();
      ts.expect(TokKind::LBrace, "'{'");
      if (ts.peek().kind != TokKind::Ident) {
        detail::TokenStream::fail(ts.peek(), "expected at least one feature:value entry");
      }
      while (ts.peek().kind == TokKind::Ident) {
        const auto feat = ts.next();
        ts.expect(TokKind::Colon, "':'");
        const auto value = ts.expect(TokKind::Ident, "a value type");
        decls.approps.push_back({name.text, feat.text, value.text, feat.span});
      }
      ts.expect(TokKind::RBrace, "'}'");
    }
    ts.expect(TokKind::Period, "'.'");
  }
  return decls;
}

namespace detail
{

struct AvmNode
{
  enum class Kind
  {
    Type,   // bare identifier (may later resolve to a back reference)
    Set,    // {a b ...}
    Column, // $n<a|b|...>
    Ref     // #name back reference
  };
  Kind kind = Kind::Type;
  std::string tag;  // nonempty: this node binds the tag
  std::string name; // Type: type name; Ref: tag name
  std::vector<std::string> members;
  long column = 0;
  std::vector<std::string> alts;
  std::vector<std::pair<Token, std::size_t>> feats;
  SourceSpan span;
};

struct ParsedAvm
{
  std::vector<AvmNode> arena;
  std::size_t root = 0;
};

inline std::size_t parse_avm_node(TokenStream& ts, std::vector<AvmNode>& arena)
{
  AvmNode node;
  node.span = ts.peek().span;

  if (ts.peek().kind == TokKind::Hash) {
    const auto hash = ts.next();
    const auto name = ts.next();
    if (name.kind != TokKind::Ident && name.kind != TokKind::Int) {
      TokenStream::fail(name, "expected a tag name after '#'");
    }
    if (ts.peek().kind == TokKind::Equals) {
      ts.next();
      node.tag = "#" + name.text;
    } else {
      node.kind = AvmNode::Kind::Ref;
      node.name = "#" + name.text;
      node.span = hash.span;
      arena.push_back(std::move(node));
      return arena.size() - 1;
    }
  } else if (ts.peek().kind == TokKind::Ident && ts.peek(1).kind == TokKind::Equals) {
    node.tag = ts.next().text;
    ts.next();
  }

  const auto head = ts.peek();
  if (head.kind == TokKind::Dollar) {
    ts.next();
    const auto num = ts.expect(TokKind::Int, "a disjunction number");
    ts.expect(TokKind::Less, "'<'");
    node.kind = AvmNode::Kind::Column;
    try {
      node.column = std::stol(num.text);
    } catch (const std::exception&) {
      TokenStream::fail(num, "disjunction number out of range");
    }
    node.alts.push_back(ts.expect(TokKind::Ident, "a species name").text);
    while (ts.peek().kind == TokKind::Pipe) {
      ts.next();
      node.alts.push_back(ts.expect(TokKind::Ident, "a species name").text);
    }
    if (node.alts.size() < 2) {
      TokenStream::fail(head, "a named disjunction needs at least two alternatives");
    }
    ts.expect(TokKind::Greater, "'>'");
  } else if (head.kind == TokKind::LBrace) {
    ts.next();
    node.kind = AvmNode::Kind::Set;
    while (ts.peek().kind == TokKind::Ident) {
      node.members.push_back(ts.next().text);
      if (ts.peek().kind == TokKind::Comma) ts.next();
    }
    if (node.members.empty()) {
      TokenStream::fail(ts.peek(), "expected at least one type inside '{'");
    }
    ts.expect(TokKind::RBrace, "'}'");
  } else if (head.kind == TokKind::Ident) {
    node.kind = AvmNode::Kind::Type;
    node.name = ts.next().text;
  } else {
    TokenStream::fail(head, "expected a type, a set, a named disjunction, or a tag");
  }

  if (ts.peek().kind == TokKind::LParen) {
    ts.next();
    for (;;) {
      const auto feat = ts.expect(TokKind::Ident, "a feature name");
      ts.expect(TokKind::Colon, "':'");
      const auto child = parse_avm_node(ts, arena);
      node.feats.emplace_back(feat, child);
      if (ts.peek().kind == TokKind::Comma) {
        ts.next();
        continue;
      }
      break;
    }
    ts.expect(TokKind::RParen, "')'");
  }

  arena.push_back(std::move(node));
  return arena.size() - 1;
}

inline ParsedAvm parse_avm_ast(std::string_view text)
{
  TokenStream ts(text);
  ParsedAvm out;
  out.root = parse_avm_node(ts, out.arena);
  if (ts.peek().kind != TokKind::End) {
    TokenStream::fail(ts.peek(), "unexpected input after the structure");
  }
  return out;
}

/// Graph plus raw per-node binding information, before normalization.
struct BuiltStructure
{
  FeatureGraph graph;
  std::vector<NodeBinding> bindings;
  std::vector<std::uint32_t> arities;
};

inline BuiltStructure build_structure(const CompiledSignature& sig, const ParsedAvm& ast,
                                      bool allow_columns)
{
  // Tag bindings, then turn bare identifiers that match a tag into refs.
  std::map<std::string, std::size_t> binder;
  for (std::size_t i = 0; i < ast.arena.size(); ++i) {
    const auto& node = ast.arena[i];
    if (node.tag.empty()) continue;
    if (!binder.emplace(node.tag, i).second) {
      throw ParseError("tag '" + node.tag + "' is bound twice", node.span);
    }
  }
  std::vector<AvmNode::Kind> kind(ast.arena.size());
  for (std::size_t i = 0; i < ast.arena.size(); ++i) {
    const auto& node = ast.arena[i];
    kind[i] = node.kind;
    if (node.kind == AvmNode::Kind::Type && binder.count(node.name)) {
      if (!node.feats.empty()) {
        throw ParseError("back reference '" + node.name + "' cannot take features", node.span);
      }
      kind[i] = AvmNode::Kind::Ref;
    }
    if (kind[i] == AvmNode::Kind::Ref && !binder.count(node.name)) {
      throw ParseError("tag '" + node.name + "' is never bound", node.span);
    }
  }

  BuiltStructure out;
  std::vector<NodeId> node_of(ast.arena.size(), kNoNode);
  std::map<long, std::pair<DisjName, std::size_t>> names; // source number -> (dense, arity)
  for (std::size_t i = 0; i < ast.arena.size(); ++i) {
    if (kind[i] == AvmNode::Kind::Ref) continue;
    const auto& node = ast.arena[i];
    Node gnode;
    NodeBinding binding = FixedBinding{0};
    switch (node.kind) {
      case AvmNode::Kind::Type: {
        const auto t = sig.type_id(node.name);
        if (!t) throw ParseError("unknown type '" + node.name + "'", node.span);
        gnode.label = sig.species_set(*t);
        break;
      }
      case AvmNode::Kind::Set: {
        Bitset label(sig.num_species());
        for (const auto& m : node.members) {
          const auto t = sig.type_id(m);
          if (!t) throw ParseError("unknown type '" + m + "'", node.span);
          label |= sig.species_set(*t);
        }
        gnode.label = label;
        break;
      }
      case AvmNode::Kind::Column: {
        if (!allow_columns) {
          throw ParseError("named disjunction is not allowed in a plain feature structure",
                           node.span);
        }
        ColumnBinding col;
        Bitset label(sig.num_species());
        for (const auto& a : node.alts) {
          const auto t = sig.type_id(a);
          if (!t || !sig.is_species(*t)) {
            throw ParseError("disjunction alternative '" + a + "' is not a species", node.span);
          }
          const auto s = *sig.species_of(*t);
          col.alts.push_back(s);
          label.set(s);
        }
        auto [it, fresh] =
            names.emplace(node.column, std::make_pair(static_cast<DisjName>(out.arities.size()),
                                                      col.alts.size()));
        if (fresh) {
          out.arities.push_back(static_cast<std::uint32_t>(col.alts.size()));
        } else if (it->second.second != col.alts.size()) {
          throw ParseError("disjunction $" + std::to_string(node.column) +
                               " is used with conflicting arities",
                           node.span);
        }
        col.name = it->second.first;
        gnode.label = label;
        binding = std::move(col);
        break;
      }
      case AvmNode::Kind::Ref: break;
    }
    if (node.kind != AvmNode::Kind::Column) {
      if (gnode.label.is_singleton()) {
        binding = FixedBinding{static_cast<SpeciesId>(gnode.label.first())};
      } else {
        binding = FreeBinding{gnode.label};
      }
    }
    node_of[i] = static_cast<NodeId>(out.graph.nodes.size());
    out.graph.nodes.push_back(std::move(gnode));
    out.bindings.push_back(std::move(binding));
  }

  const auto target_of = [&](std::size_t i) {
    return kind[i] == AvmNode::Kind::Ref ? node_of[binder.at(ast.arena[i].name)] : node_of[i];
  };
  for (std::size_t i = 0; i < ast.arena.size(); ++i) {
    if (kind[i] == AvmNode::Kind::Ref) continue;
    const auto& node = ast.arena[i];
    std::set<FeatureId> used;
    for (const auto& [feat, child] : node.feats) {
      const auto f = sig.feature_id(feat.text);
      if (!f) TokenStream::fail(feat, "unknown feature '" + feat.text + "'");
      if (!used.insert(*f).second) {
        TokenStream::fail(feat, "duplicate feature '" + feat.text + "'");
      }
      out.graph.nodes[node_of[i]].add_arc(*f, target_of(child));
    }
  }
  out.graph.root = target_of(ast.root);
  return out;
}

} // namespace detail

/// Parses an AVM into a feature graph over the signature's species
/// universe (labels via species sets, reentrancy via tags). The result is
/// in canonical form. Named disjunctions are rejected here.
inline FeatureGraph parse_avm(const CompiledSignature& sig, std::string_view text)
{
  const auto built =
      detail::build_structure(sig, detail::parse_avm_ast(text), /*allow_columns=*/false);
  return canonicalize(built.graph);
}

/// Parses an AVM that may use named-disjunction columns into a compacted
/// structure. The written bindings are taken at face value (no
/// resolution), then renormalized into canonical compact form.
inline CompactDRFS parse_drfs(const CompiledSignature& sig, std::string_view text)
{
  const auto built =
      detail::build_structure(sig, detail::parse_avm_ast(text), /*allow_columns=*/true);
  CompactDRFS raw;
  raw.graph = built.graph;
  raw.bindings = built.bindings;
  raw.arities = built.arities;
  return canonical_drfs(sig, compact(sig, raw.graph, expand_relation(raw)));
}

namespace detail
{

/// Shared printing skeleton: DFS from the root in feature order, tags
/// #1.. assigned to multiply-referenced nodes at first visit.
template <typename LabelFn>
class Printer
{
public:
  Printer(const CompiledSignature& sig, const FeatureGraph& graph, LabelFn label)
      : sig_(sig), graph_(graph), label_(std::move(label)), shared_(graph.nodes.size(), false),
        tag_(graph.nodes.size(), 0)
  {
    std::vector<std::uint32_t> refs(graph.nodes.size(), 0);
    ++refs[graph.root];
    for (const auto& node : graph.nodes) {
      for (const auto& [f, m] : node.arcs) ++refs[m];
    }
    for (NodeId n = 0; n < graph.nodes.size(); ++n) shared_[n] = refs[n] >= 2;
  }

  std::string print()
  {
    visit(graph_.root);
    return std::move(out_);
  }

private:
  void visit(NodeId n)
  {
    if (tag_[n] > 0) {
      out_ += "#" + std::to_string(tag_[n]);
      return;
    }
    if (shared_[n]) {
      tag_[n] = next_tag_++;
      out_ += "#" + std::to_string(tag_[n]) + "=";
    }
    out_ += label_(n);
    const auto& arcs = graph_.nodes[n].arcs;
    if (!arcs.empty()) {
      out_ += "(";
      for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (i > 0) out_ += ", ";
        out_ += sig_.feature_name(arcs[i].first) + ":";
        visit(arcs[i].second);
      }
      out_ += ")";
    }
  }

  const CompiledSignature& sig_;
  const FeatureGraph& graph_;
  LabelFn label_;
  std::vector<bool> shared_;
  std::vector<int> tag_;
  int next_tag_ = 1;
  std::string out_;
};

inline std::string species_set_text(const CompiledSignature& sig, const Bitset& set)
{
  if (const auto t = sig.most_general_denoting_type(set)) return sig.type_name(*t);
  std::string out = "{";
  bool first = true;
  for (const auto s : set.members()) {
    if (!first) out += ",";
    first = false;
    out += sig.species_name(s);
  }
  return out + "}";
}

} // namespace detail

/// Canonical text for a feature graph: nodes in DFS order, features in
/// name order, tags #1.. in first-visit order; a label prints as the most
/// general type denoting it when one exists, else as a set.
inline std::string print_avm(const CompiledSignature& sig, const FeatureGraph& g)
{
  detail::Printer printer(sig, g, [&sig, &g](NodeId n) {
    return detail::species_set_text(sig, g.nodes[n].label);
  });
  return printer.print();
}

/// Canonical text for a compacted structure; disjunction names print as
/// $1.. in first-occurrence order.
inline std::string print_drfs(const CompiledSignature& sig, const CompactDRFS& d)
{
  std::map<DisjName, int> disj;
  int next_disj = 1;
  detail::Printer printer(sig, d.graph, [&](NodeId n) -> std::string {
    const auto& b = d.bindings[n];
    if (const auto* fx = std::get_if<FixedBinding>(&b)) return sig.species_name(fx->species);
    if (const auto* fr = std::get_if<FreeBinding>(&b)) {
      return detail::species_set_text(sig, fr->set);
    }
    const auto& col = std::get<ColumnBinding>(b);
    auto [it, fresh] = disj.emplace(col.name, next_disj);
    if (fresh) ++next_disj;
    std::string out = "$" + std::to_string(it->second) + "<";
    for (std::size_t i = 0; i < col.alts.size(); ++i) {
      if (i > 0) out += "|";
      out += sig.species_name(col.alts[i]);
    }
    return out + ">";
  });
  return printer.print();
}

} // namespace tfs
