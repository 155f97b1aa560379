#pragma once

// Global environment (inductives, definitions, assumptions) and local
// typing contexts. Environments are value types; extension copies.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pml/term.hpp"

namespace pml {

struct KernelError : std::runtime_error {
  std::string kind;  // e.g. "TypeError", "PositivityViolation"
  TermPath path;     // location inside the offending term, when known
  KernelError(std::string k, const std::string& msg, TermPath p = {})
      : std::runtime_error(k + ": " + msg + (p.empty() ? "" : " (at " + path_to_string(p) + ")")),
        kind(std::move(k)),
        path(std::move(p)) {}
};

using Telescope = std::vector<std::pair<std::string, TermPtr>>;

struct InductiveDecl {
  std::string name;
  Telescope params;                 // each type under the preceding params
  TermPtr arity;                    // Pi-telescope of indices ending in a Sort, under params
  std::vector<std::pair<std::string, TermPtr>> ctors;  // types under params

  size_t num_params() const { return params.size(); }

  // Number of index binders in the arity.
  size_t num_indices() const {
    size_t n = 0;
    TermPtr a = arity;
    while (a->tag == Tag::Pi) { ++n; a = a->b; }
    return n;
  }
  int sort_level() const {
    TermPtr a = arity;
    while (a->tag == Tag::Pi) a = a->b;
    return a->n;
  }
};

struct Definition {
  TermPtr type;
  TermPtr body;
};

struct Assumption {
  TermPtr type;
};

using EnvEntry = std::variant<InductiveDecl, Definition, Assumption>;

struct GlobalEnv {
  std::vector<std::string> order;
  std::map<std::string, EnvEntry> table;
  std::set<std::string> opaque;  // names exempt from delta-unfolding
  uint64_t version = 0;

  bool has(const std::string& name) const { return table.count(name) != 0; }

  const EnvEntry& entry(const std::string& name) const {
    auto it = table.find(name);
    if (it == table.end()) throw KernelError("UnknownName", name);
    return it->second;
  }
  const InductiveDecl* inductive(const std::string& name) const {
    auto it = table.find(name);
    if (it == table.end()) return nullptr;
    return std::get_if<InductiveDecl>(&it->second);
  }
  const InductiveDecl& inductive_or_throw(const std::string& name) const {
    auto* d = inductive(name);
    if (!d) throw KernelError("UnknownInductive", name);
    return *d;
  }
  const Definition* definition(const std::string& name) const {
    auto it = table.find(name);
    if (it == table.end()) return nullptr;
    return std::get_if<Definition>(&it->second);
  }
  TermPtr type_of_global(const std::string& name) const {
    auto& e = entry(name);
    if (auto* d = std::get_if<Definition>(&e)) return d->type;
    if (auto* a = std::get_if<Assumption>(&e)) return a->type;
    throw KernelError("TypeError", "inductive used where a constant was expected: " + name);
  }

  GlobalEnv with(const std::string& name, EnvEntry e) const {
    if (has(name)) throw KernelError("DuplicateName", name);
    GlobalEnv out = *this;
    out.order.push_back(name);
    out.table.emplace(name, std::move(e));
    out.version++;
    return out;
  }
  GlobalEnv with_opaque(const std::string& name) const {
    GlobalEnv out = *this;
    out.opaque.insert(name);
    out.version++;
    return out;
  }
};

// Local context: items.back() is the innermost binder (Var 0).
struct Context {
  std::vector<std::pair<std::string, TermPtr>> items;

  size_t size() const { return items.size(); }

  Context extended(const std::string& hint, TermPtr type) const {
    Context out = *this;
    out.items.emplace_back(hint, std::move(type));
    return out;
  }

  // Type of Var i, shifted to be valid in the full context.
  TermPtr type_of(int i) const {
    if (i < 0 || i >= (int)items.size())
      throw KernelError("TypeError", "unbound variable " + std::to_string(i));
    return shift(items[items.size() - 1 - i].second, i + 1);
  }
  const std::string& hint_of(int i) const { return items[items.size() - 1 - i].first; }
};

// Decompose `t` as an application of inductive `I` into parameter and index
// argument lists. Returns false if the head is not that inductive or the
// argument count is wrong.
inline bool decompose_inductive_app(const GlobalEnv& env, const TermPtr& t,
                                    std::string& ind_name, std::vector<TermPtr>& params,
                                    std::vector<TermPtr>& indices) {
  std::vector<TermPtr> args;
  TermPtr head = spine_head(t, args);
  if (head->tag != Tag::Ind) return false;
  auto* decl = env.inductive(head->s);
  if (!decl) return false;
  if (args.size() != decl->num_params() + decl->num_indices()) return false;
  ind_name = head->s;
  params.assign(args.begin(), args.begin() + decl->num_params());
  indices.assign(args.begin() + decl->num_params(), args.end());
  return true;
}

}  // namespace pml
