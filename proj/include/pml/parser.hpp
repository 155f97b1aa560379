#pragma once

// Lexer and recursive-descent parser for the term language and the
// vernacular commands.

#include <cctype>
#include <functional>

#include "pml/env.hpp"

namespace pml {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int l, int c)
      : std::runtime_error(msg + " at " + std::to_string(l) + ":" + std::to_string(c)),
        line(l),
        col(c) {}
};

namespace detail {

enum class Tok {
  Ident, Number, LParen, RParen, LBrace, RBrace, Comma, Colon, ColonEq,
  Arrow, FatArrow, Bar, Dot, Semi, End
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

inline bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum((unsigned char)c) || c == '_' || c == '\'';
}

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto bump = [&](size_t k) {
    for (size_t j = 0; j < k; ++j) {
      if (src[i + j] == '\n') { ++line; col = 1; } else ++col;
    }
    i += k;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { bump(1); continue; }
    if (c == '(' && i + 1 < src.size() && src[i + 1] == '*') {
      int startl = line, startc = col;
      int depth = 0;
      while (i < src.size()) {
        if (src[i] == '(' && i + 1 < src.size() && src[i + 1] == '*') { depth++; bump(2); }
        else if (src[i] == '*' && i + 1 < src.size() && src[i + 1] == ')') {
          depth--; bump(2);
          if (depth == 0) break;
        } else bump(1);
      }
      if (depth != 0) throw ParseError("unterminated comment", startl, startc);
      continue;
    }
    int tl = line, tc = col;
    auto push = [&](Tok k, std::string text, size_t len) {
      out.push_back({k, std::move(text), tl, tc});
      bump(len);
    };
    if (ident_start(c)) {
      size_t j = i;
      while (j < src.size()) {
        if (ident_char(src[j])) { ++j; continue; }
        // a dot joins qualified names when followed by an identifier head
        if (src[j] == '.' && j + 1 < src.size() && ident_start(src[j + 1])) { j += 2; continue; }
        break;
      }
      push(Tok::Ident, src.substr(i, j - i), j - i);
      continue;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < src.size() && std::isdigit((unsigned char)src[j])) ++j;
      push(Tok::Number, src.substr(i, j - i), j - i);
      continue;
    }
    if (c == ':' && i + 1 < src.size() && src[i + 1] == '=') { push(Tok::ColonEq, ":=", 2); continue; }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') { push(Tok::Arrow, "->", 2); continue; }
    if (c == '=' && i + 1 < src.size() && src[i + 1] == '>') { push(Tok::FatArrow, "=>", 2); continue; }
    switch (c) {
      case '(': push(Tok::LParen, "(", 1); break;
      case ')': push(Tok::RParen, ")", 1); break;
      case '{': push(Tok::LBrace, "{", 1); break;
      case '}': push(Tok::RBrace, "}", 1); break;
      case ',': push(Tok::Comma, ",", 1); break;
      case ':': push(Tok::Colon, ":", 1); break;
      case '|': push(Tok::Bar, "|", 1); break;
      case '.': push(Tok::Dot, ".", 1); break;
      case ';': push(Tok::Semi, ";", 1); break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

struct TermParser {
  const std::vector<Token>& toks;
  size_t pos = 0;
  std::vector<std::string> binders;  // innermost last

  explicit TermParser(const std::vector<Token>& t) : toks(t) {}

  const Token& peek(int k = 0) const { return toks[std::min(pos + k, toks.size() - 1)]; }
  const Token& next() { return toks[std::min(pos++, toks.size() - 1)]; }
  [[noreturn]] void err(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().col);
  }
  bool at(Tok k) const { return peek().kind == k; }
  Token expect(Tok k, const std::string& what) {
    if (!at(k)) err("expected " + what);
    return next();
  }

  int lookup(const std::string& name) const {
    for (int i = 0; i < (int)binders.size(); ++i)
      if (binders[binders.size() - 1 - i] == name) return i;
    return -1;
  }

  TermPtr name_term(const std::string& name) {
    int i = lookup(name);
    if (i >= 0) return mk_var(i, name);
    if (name.size() > 4 && name.rfind("Type", 0) == 0 &&
        std::all_of(name.begin() + 4, name.end(), [](char c) { return std::isdigit((unsigned char)c); }))
      return mk_sort(std::stoi(name.substr(4)));
    return mk_const(name);  // resolved to Ind later against an environment
  }

  // one or more groups "(x y : T)"
  Telescope parse_binders() {
    Telescope tel;
    if (!at(Tok::LParen)) err("expected binder group");
    while (at(Tok::LParen)) {
      next();
      std::vector<std::string> names;
      while (at(Tok::Ident)) names.push_back(next().text);
      if (names.empty()) err("expected binder name");
      expect(Tok::Colon, "':'");
      TermPtr ty = parse_term();
      expect(Tok::RParen, "')'");
      for (auto& n : names) {
        tel.emplace_back(n, ty);
        binders.push_back(n);
        ty = shift(ty, 1);  // subsequent names in the group see one more binder
      }
    }
    return tel;
  }

  void pop_binders(size_t n) { binders.resize(binders.size() - n); }

  TermPtr parse_term() {
    if (at(Tok::Ident) && peek().text == "fun") {
      next();
      Telescope tel = parse_binders();
      expect(Tok::FatArrow, "'=>'");
      TermPtr body = parse_term();
      pop_binders(tel.size());
      return lam_telescope_local(tel, body);
    }
    if (at(Tok::Ident) && peek().text == "forall") {
      next();
      Telescope tel = parse_binders();
      expect(Tok::Comma, "','");
      TermPtr body = parse_term();
      pop_binders(tel.size());
      return pi_telescope_local(tel, body);
    }
    TermPtr lhs = parse_app();
    if (at(Tok::Arrow)) {
      next();
      // the codomain of a non-dependent arrow still lives under one binder;
      // the empty name keeps it unreferencable ("_" is a legal binder name)
      binders.push_back("");
      TermPtr rhs = parse_term_shifted();
      binders.pop_back();
      return mk_pi("_", lhs, rhs);
    }
    return lhs;
  }

  // parse the right side of an arrow; names bound outside are one deeper
  TermPtr parse_term_shifted() { return parse_term(); }

  TermPtr parse_app() {
    TermPtr t = parse_atom();
    while (starts_atom()) t = mk_app(t, parse_atom());
    return t;
  }

  bool starts_atom() const {
    if (at(Tok::LParen)) return true;
    if (!at(Tok::Ident)) return false;
    const std::string& s = peek().text;
    return s != "fun" && s != "forall";
  }

  TermPtr parse_atom() {
    if (at(Tok::LParen)) {
      next();
      TermPtr t = parse_term();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (!at(Tok::Ident)) err("expected a term");
    std::string name = next().text;
    if (name == "Constr") {
      expect(Tok::LParen, "'('");
      int idx = std::stoi(expect(Tok::Number, "constructor index").text);
      expect(Tok::Comma, "','");
      TermPtr ind = parse_term();
      expect(Tok::RParen, "')'");
      return mk_constr(idx, ind);
    }
    if (name == "Elim") {
      expect(Tok::LParen, "'('");
      TermPtr scrut = parse_term();
      expect(Tok::Comma, "','");
      TermPtr motive = parse_term();
      expect(Tok::RParen, "')'");
      expect(Tok::LBrace, "'{'");
      std::vector<TermPtr> cases;
      if (!at(Tok::RBrace)) {
        cases.push_back(parse_term());
        while (at(Tok::Bar)) {
          next();
          cases.push_back(parse_term());
        }
      }
      expect(Tok::RBrace, "'}'");
      return mk_elim(scrut, motive, std::move(cases));
    }
    return name_term(name);
  }

  static TermPtr lam_telescope_local(const Telescope& tel, TermPtr body) {
    for (auto it = tel.rbegin(); it != tel.rend(); ++it)
      body = mk_lam(it->first, it->second, std::move(body));
    return body;
  }
  static TermPtr pi_telescope_local(const Telescope& tel, TermPtr body) {
    for (auto it = tel.rbegin(); it != tel.rend(); ++it)
      body = mk_pi(it->first, it->second, std::move(body));
    return body;
  }
};

}  // namespace detail

// Parse a single standalone term.
inline TermPtr parse_term(const std::string& src) {
  auto toks = detail::lex(src);
  detail::TermParser p(toks);
  TermPtr t = p.parse_term();
  if (!p.at(detail::Tok::End)) p.err("trailing input after term");
  return t;
}

// Rewrite Const references that name a declared inductive into Ind nodes.
inline TermPtr resolve(const GlobalEnv& env, const TermPtr& t) {
  switch (t->tag) {
    case Tag::Const:
      return env.inductive(t->s) ? mk_ind(t->s) : t;
    case Tag::Var:
    case Tag::Sort:
    case Tag::Ind:
      return t;
    case Tag::Pi:
      return mk_pi(t->s, resolve(env, t->a), resolve(env, t->b));
    case Tag::Lam:
      return mk_lam(t->s, resolve(env, t->a), resolve(env, t->b));
    case Tag::App:
      return mk_app(resolve(env, t->a), resolve(env, t->b));
    case Tag::Constr:
      return mk_constr(t->n, resolve(env, t->a));
    case Tag::Elim: {
      std::vector<TermPtr> cs;
      for (auto& c : t->ts) cs.push_back(resolve(env, c));
      return mk_elim(resolve(env, t->a), resolve(env, t->b), std::move(cs));
    }
  }
  return t;
}

}  // namespace pml
