#pragma once

// Vernacular command AST and file parser. Terms inside commands are kept
// unresolved (global names as Const); the interpreter resolves them against
// the environment in force when the command runs.

#include "pml/parser.hpp"

namespace pml {

struct VInductive {
  InductiveDecl decl;
};
struct VDefinition {
  std::string name;
  TermPtr type, body;
};
struct VAxiom {
  std::string name;
  TermPtr type;
};
struct VConfigure {
  std::string name;
  TermPtr A, B;
  std::map<std::string, std::vector<TermPtr>> fields;
  std::vector<std::string> trusted;
};
struct VRepair {
  std::string A, B;
  std::vector<std::string> targets;
  bool module = false;
  std::optional<std::string> config;
  std::optional<int> mapping;
  bool suggest = false;
};
struct VDecompile {
  std::string name;
};
struct VAnnotate {
  std::string name;
  TermPath path;
  std::string role;
  int index = 0;
};

using Vernacular =
    std::variant<VInductive, VDefinition, VAxiom, VConfigure, VRepair, VDecompile, VAnnotate>;

namespace detail {

struct FileParser : TermParser {
  explicit FileParser(const std::vector<Token>& t) : TermParser(t) {}

  std::string ident(const std::string& what) { return expect(Tok::Ident, what).text; }
  void dot() { expect(Tok::Dot, "'.'"); }

  // rewrite self-references in constructor types: Const name -> Ind name
  static TermPtr self_resolve(const TermPtr& t, const std::string& name) {
    switch (t->tag) {
      case Tag::Const:
        return t->s == name ? mk_ind(name) : t;
      case Tag::Pi:
        return mk_pi(t->s, self_resolve(t->a, name), self_resolve(t->b, name));
      case Tag::Lam:
        return mk_lam(t->s, self_resolve(t->a, name), self_resolve(t->b, name));
      case Tag::App:
        return mk_app(self_resolve(t->a, name), self_resolve(t->b, name));
      case Tag::Constr:
        return mk_constr(t->n, self_resolve(t->a, name));
      case Tag::Elim: {
        std::vector<TermPtr> cs;
        for (auto& c : t->ts) cs.push_back(self_resolve(c, name));
        return mk_elim(self_resolve(t->a, name), self_resolve(t->b, name), std::move(cs));
      }
      default:
        return t;
    }
  }

  Vernacular parse_inductive() {
    InductiveDecl d;
    d.name = ident("inductive name");
    if (at(Tok::LParen)) d.params = parse_binders();  // leaves params on the binder stack
    expect(Tok::Colon, "':'");
    TermPtr arity = parse_term();
    expect(Tok::ColonEq, "':='");
    std::vector<std::pair<std::string, TermPtr>> ctors;
    if (!at(Tok::Dot)) {
      for (;;) {
        std::string cname = ident("constructor name");
        expect(Tok::Colon, "':'");
        ctors.emplace_back(cname, self_resolve(parse_term(), d.name));
        if (!at(Tok::Bar)) break;
        next();
      }
    }
    pop_binders(d.params.size());
    dot();
    d.arity = self_resolve(arity, d.name);
    d.ctors = std::move(ctors);
    return VInductive{std::move(d)};
  }

  Vernacular parse_definition() {
    VDefinition d;
    d.name = ident("definition name");
    expect(Tok::Colon, "':'");
    d.type = parse_term();
    expect(Tok::ColonEq, "':='");
    d.body = parse_term();
    dot();
    return d;
  }

  Vernacular parse_axiom() {
    VAxiom a;
    a.name = ident("axiom name");
    expect(Tok::Colon, "':'");
    a.type = parse_term();
    dot();
    return a;
  }

  Vernacular parse_configure() {
    VConfigure c;
    c.name = ident("configuration name");
    c.A = parse_atom();
    c.B = parse_atom();
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      std::string key = ident("configuration field");
      expect(Tok::ColonEq, "':='");
      if (key == "trusted") {
        while (at(Tok::Ident)) c.trusted.push_back(next().text);
      } else {
        std::vector<TermPtr> vals;
        vals.push_back(parse_term());
        while (at(Tok::Bar)) {
          next();
          vals.push_back(parse_term());
        }
        c.fields[key] = std::move(vals);
      }
      if (at(Tok::Semi)) next();
    }
    expect(Tok::RBrace, "'}'");
    dot();
    return c;
  }

  Vernacular parse_repair(bool module) {
    VRepair r;
    r.module = module;
    r.A = ident("source type");
    r.B = ident("target type");
    std::string kw = ident("'in'");
    if (kw != "in") err("expected 'in'");
    r.targets.push_back(ident("target name"));
    while (at(Tok::Ident) && peek().text != "using" && peek().text != "mapping" &&
           peek().text != "suggest") {
      if (!module) break;
      r.targets.push_back(next().text);
    }
    while (at(Tok::Ident)) {
      std::string opt = next().text;
      if (opt == "using")
        r.config = ident("configuration name");
      else if (opt == "mapping")
        r.mapping = std::stoi(expect(Tok::Number, "mapping index").text);
      else if (opt == "suggest")
        r.suggest = true;
      else
        err("unknown repair option '" + opt + "'");
    }
    dot();
    return r;
  }

  Vernacular parse_decompile() {
    VDecompile d;
    d.name = ident("definition name");
    dot();
    return d;
  }

  Vernacular parse_annotate() {
    VAnnotate a;
    a.name = ident("definition name");
    if (ident("'as'") != "as") err("expected 'as'");
    a.role = ident("configuration role");
    if (at(Tok::Number)) a.index = std::stoi(next().text);
    if (ident("'at'") != "at") err("expected 'at'");
    a.path.push_back(std::stoi(expect(Tok::Number, "path step").text));
    while (at(Tok::Dot) && peek(1).kind == Tok::Number) {
      next();
      a.path.push_back(std::stoi(next().text));
    }
    dot();
    return a;
  }

  std::vector<Vernacular> parse_file() {
    std::vector<Vernacular> out;
    while (!at(Tok::End)) {
      std::string cmd = ident("vernacular command");
      if (cmd == "Inductive") out.push_back(parse_inductive());
      else if (cmd == "Definition") out.push_back(parse_definition());
      else if (cmd == "Axiom") out.push_back(parse_axiom());
      else if (cmd == "Configure") out.push_back(parse_configure());
      else if (cmd == "Repair") out.push_back(parse_repair(false));
      else if (cmd == "RepairModule") out.push_back(parse_repair(true));
      else if (cmd == "Decompile") out.push_back(parse_decompile());
      else if (cmd == "Annotate") out.push_back(parse_annotate());
      else err("unknown command '" + cmd + "'");
    }
    return out;
  }
};

}  // namespace detail

inline std::vector<Vernacular> parse_file(const std::string& text) {
  auto toks = detail::lex(text);
  detail::FileParser p(toks);
  return p.parse_file();
}

}  // namespace pml
