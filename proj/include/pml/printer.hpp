#pragma once

// Deterministic concrete-syntax printer. parse(print(t)) is alpha-equal to t.

#include <set>

#include "pml/env.hpp"

namespace pml {

namespace detail {

inline void collect_globals(const TermPtr& t, std::set<std::string>& out) {
  switch (t->tag) {
    case Tag::Ind:
    case Tag::Const:
      out.insert(t->s);
      return;
    case Tag::Pi:
    case Tag::Lam:
    case Tag::App:
      collect_globals(t->a, out);
      collect_globals(t->b, out);
      return;
    case Tag::Constr:
      collect_globals(t->a, out);
      return;
    case Tag::Elim:
      collect_globals(t->a, out);
      collect_globals(t->b, out);
      for (auto& c : t->ts) collect_globals(c, out);
      return;
    default:
      return;
  }
}

struct Printer {
  std::set<std::string> reserved;       // global names free in the term
  std::vector<std::string> binders;     // innermost last

  std::string fresh(const std::string& hint) {
    std::string base = hint.empty() ? "x" : hint;
    std::string name = base;
    auto taken = [&](const std::string& n) {
      if (reserved.count(n)) return true;
      for (auto& b : binders)
        if (b == n) return true;
      return false;
    };
    while (taken(name)) name += '\'';
    return name;
  }

  // precedence levels: 0 top, 1 arrow right operand, 2 arrow left operand /
  // application head, 3 application argument (atoms only)
  void print(const TermPtr& t, int prec, std::string& out) {
    switch (t->tag) {
      case Tag::Var: {
        int i = t->n;
        if (i >= 0 && i < (int)binders.size())
          out += binders[binders.size() - 1 - i];
        else
          out += "_v" + std::to_string(i);  // out-of-scope index; not reparseable on purpose
        return;
      }
      case Tag::Sort:
        out += "Type" + std::to_string(t->n);
        return;
      case Tag::Ind:
      case Tag::Const:
        out += t->s;
        return;
      case Tag::Pi: {
        bool dep = var_occurs(t->b, 0);
        if (!dep) {
          if (prec > 1) out += '(';
          print(t->a, 2, out);
          out += " -> ";
          // the slot is unreferenced; an empty name can never capture an
          // identifier, unlike "_" which is a legal binder name
          binders.push_back("");
          print(t->b, 1, out);
          binders.pop_back();
          if (prec > 1) out += ')';
          return;
        }
        if (prec > 0) out += '(';
        out += "forall ";
        size_t pushed = 0;
        TermPtr cur = t;
        while (cur->tag == Tag::Pi && var_occurs(cur->b, 0)) {
          if (pushed) out += ' ';
          std::string name = fresh(cur->s);
          out += "(" + name + " : ";
          print(cur->a, 0, out);
          out += ")";
          binders.push_back(name);
          ++pushed;
          cur = cur->b;
        }
        out += ", ";
        print(cur, 0, out);
        while (pushed--) binders.pop_back();
        if (prec > 0) out += ')';
        return;
      }
      case Tag::Lam: {
        if (prec > 0) out += '(';
        out += "fun ";
        size_t pushed = 0;
        TermPtr cur = t;
        while (cur->tag == Tag::Lam) {
          if (pushed) out += ' ';
          std::string name = fresh(cur->s);
          out += "(" + name + " : ";
          print(cur->a, 0, out);
          out += ")";
          binders.push_back(name);
          ++pushed;
          cur = cur->b;
        }
        out += " => ";
        print(cur, 0, out);
        while (pushed--) binders.pop_back();
        if (prec > 0) out += ')';
        return;
      }
      case Tag::App: {
        if (prec > 2) out += '(';
        print(t->a, 2, out);
        out += ' ';
        print(t->b, 3, out);
        if (prec > 2) out += ')';
        return;
      }
      case Tag::Constr:
        out += "Constr(" + std::to_string(t->n) + ", ";
        print(t->a, 0, out);
        out += ")";
        return;
      case Tag::Elim: {
        out += "Elim(";
        print(t->a, 0, out);
        out += ", ";
        print(t->b, 0, out);
        out += ") { ";
        for (size_t i = 0; i < t->ts.size(); ++i) {
          if (i) out += " | ";
          print(t->ts[i], 0, out);
        }
        out += t->ts.empty() ? "}" : " }";
        return;
      }
    }
  }
};

}  // namespace detail

inline std::string print_term(const TermPtr& t, const Context& ctx = Context{}) {
  detail::Printer p;
  detail::collect_globals(t, p.reserved);
  for (auto& [hint, ty] : ctx.items) p.binders.push_back(p.fresh(hint));
  std::string out;
  p.print(t, 0, out);
  return out;
}

}  // namespace pml
