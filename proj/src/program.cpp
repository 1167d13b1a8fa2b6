#include "memodag/program.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace memodag {

void Signature::add(SymbolInfo info) {
  if (index_.count(info.name)) {
    throw std::invalid_argument("symbol '" + info.name.name() + "' declared twice");
  }
  index_.emplace(info.name, info);
  (info.kind == SymbolKind::Constructor ? constructors_ : operations_).push_back(info);
}

void Signature::add_constructor(Symbol name, std::size_t arity) { add({name, SymbolKind::Constructor, arity}); }
void Signature::add_operation(Symbol name, std::size_t arity) { add({name, SymbolKind::Operation, arity}); }

std::optional<SymbolInfo> Signature::lookup(Symbol name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Signature::is_constructor(Symbol name) const {
  auto info = lookup(name);
  return info && info->kind == SymbolKind::Constructor;
}

bool Signature::is_operation(Symbol name) const {
  auto info = lookup(name);
  return info && info->kind == SymbolKind::Operation;
}

std::size_t Signature::arity(Symbol name) const {
  auto info = lookup(name);
  if (!info) throw std::out_of_range("undeclared symbol '" + name.name() + "'");
  return info->arity;
}

std::string to_string(const Rule& rule) { return to_string(rule.lhs) + " -> " + to_string(rule.rhs); }

bool patterns_overlap(const Term& p, const Term& q) {
  std::vector<std::pair<const Term*, const Term*>> stack{{&p, &q}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    if (a->is_variable() || b->is_variable()) continue;
    if (a->symbol() != b->symbol() || a->arity() != b->arity()) return false;
    for (std::size_t i = 0; i < a->arity(); ++i) stack.emplace_back(&a->arg(i), &b->arg(i));
  }
  return true;
}

namespace {

// Arity and declaration check of every application node.
std::optional<std::string> arity_problem(const Term& t, const Signature& sig) {
  std::vector<const Term*> stack{&t};
  while (!stack.empty()) {
    const Term* u = stack.back();
    stack.pop_back();
    if (u->is_variable()) continue;
    auto info = sig.lookup(u->symbol());
    if (!info) return "undeclared symbol '" + u->symbol().name() + "'";
    if (info->arity != u->arity()) {
      return "'" + u->symbol().name() + "' takes " + std::to_string(info->arity) + " argument(s), given " +
             std::to_string(u->arity());
    }
    for (const auto& a : u->args()) stack.push_back(&a);
  }
  return std::nullopt;
}

bool constructor_pattern(const Term& t, const Signature& sig) {
  std::vector<const Term*> stack{&t};
  while (!stack.empty()) {
    const Term* u = stack.back();
    stack.pop_back();
    if (u->is_variable()) continue;
    if (!sig.is_constructor(u->symbol())) return false;
    for (const auto& a : u->args()) stack.push_back(&a);
  }
  return true;
}

std::string rule_label(std::size_t i, const Rule& r) { return "rule " + std::to_string(i + 1) + " '" + to_string(r) + "'"; }

}  // namespace

std::vector<Violation> orthogonality_violations(const Signature& sig, const std::vector<Rule>& rules) {
  std::vector<Violation> out;
  std::vector<bool> well_shaped(rules.size(), false);
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule& r = rules[i];
    const std::string label = rule_label(i, r);
    if (auto p = arity_problem(r.lhs, sig)) {
      out.push_back({Violation::Kind::Arity, i, 0, label + ": " + *p});
      continue;
    }
    if (auto p = arity_problem(r.rhs, sig)) {
      out.push_back({Violation::Kind::Arity, i, 0, label + ": " + *p});
      continue;
    }
    if (r.lhs.is_variable() || !sig.is_operation(r.lhs.symbol())) {
      out.push_back({Violation::Kind::Shape, i, 0, label + ": left-hand side must be an operation applied to patterns"});
      continue;
    }
    bool patterns_ok = std::all_of(r.lhs.args().begin(), r.lhs.args().end(),
                                   [&](const Term& p) { return constructor_pattern(p, sig); });
    if (!patterns_ok) {
      out.push_back({Violation::Kind::Shape, i, 0, label + ": patterns may contain only variables and constructors"});
      continue;
    }
    if (!is_linear(r.lhs)) {
      out.push_back({Violation::Kind::Linearity, i, 0, label + ": left-hand side is not linear"});
      continue;
    }
    auto lhs_vars = variables(r.lhs);
    bool free_var = false;
    for (auto x : variables(r.rhs)) {
      if (std::find(lhs_vars.begin(), lhs_vars.end(), x) == lhs_vars.end()) {
        out.push_back({Violation::Kind::FreeVariable, i, 0,
                       label + ": variable '" + x.name() + "' does not occur in the left-hand side"});
        free_var = true;
      }
    }
    well_shaped[i] = !free_var;
  }
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rules.size(); ++j) {
      if (!well_shaped[i] || !well_shaped[j]) continue;
      if (rules[i].lhs.symbol() != rules[j].lhs.symbol()) continue;
      if (patterns_overlap(rules[i].lhs, rules[j].lhs)) {
        out.push_back({Violation::Kind::Ambiguity, i, j,
                       "ambiguous rules: " + rule_label(i, rules[i]) + " overlaps " + rule_label(j, rules[j])});
      }
    }
  }
  return out;
}

namespace {

std::string join_messages(const std::vector<Violation>& vs) {
  std::string s = "program is not orthogonal";
  for (const auto& v : vs) s += "\n  " + v.message;
  return s;
}

}  // namespace

ProgramError::ProgramError(std::vector<Violation> violations)
    : std::runtime_error(join_messages(violations)), violations_(std::move(violations)) {}

Program::Program(Signature signature, std::vector<Rule> rules)
    : signature_(std::move(signature)), rules_(std::move(rules)) {
  auto violations = orthogonality_violations(signature_, rules_);
  if (!violations.empty()) throw ProgramError(std::move(violations));
  for (const auto& op : signature_.operations()) by_operation_[op.name];
  arg_trees_.reserve(rules_.size());
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    by_operation_[rules_[i].lhs.symbol()].push_back(i);
    std::vector<TermGraph> trees;
    for (const auto& p : rules_[i].lhs.args()) trees.push_back(canonical_tree(p));
    arg_trees_.push_back(std::move(trees));
    delta_ = std::max(delta_, term_size(rules_[i].rhs));
  }
}

const std::vector<std::size_t>& Program::rules_for(Symbol op) const {
  static const std::vector<std::size_t> none;
  auto it = by_operation_.find(op);
  return it == by_operation_.end() ? none : it->second;
}

bool Program::is_value(const Term& t) const {
  std::vector<const Term*> stack{&t};
  std::unordered_map<const void*, bool> seen;
  while (!stack.empty()) {
    const Term* u = stack.back();
    stack.pop_back();
    if (u->is_variable() || !signature_.is_constructor(u->symbol())) return false;
    if (!seen.emplace(u->identity(), true).second) continue;
    for (const auto& a : u->args()) stack.push_back(&a);
  }
  return true;
}

std::uint64_t program_delta(const Program& p) {
  if (p.rules().empty()) throw std::invalid_argument("program_delta: program has no rules");
  return p.delta();
}

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  auto decls = [&](const char* header, const std::vector<SymbolInfo>& infos) {
    os << header;
    for (std::size_t i = 0; i < infos.size(); ++i) {
      os << (i ? ", " : " ") << infos[i].name << '/' << infos[i].arity;
    }
    os << " ;\n";
  };
  decls("constructors:", p.signature().constructors());
  decls("operations:", p.signature().operations());
  os << "rules:\n";
  for (const auto& r : p.rules()) os << "  " << to_string(r) << " ;\n";
  return os.str();
}

}  // namespace memodag
