#include <cstdio>
#include <unordered_map>

#include "memodag/grsr.hpp"

namespace memodag {

namespace {

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(h & 0xffffffffULL));
  return buf;
}

Term var(const char* prefix, std::size_t i) { return Term::variable(Symbol::intern(prefix + std::to_string(i))); }

class Compiler {
 public:
  void declare_algebra(const Algebra& a) {
    for (auto [c, k] : a.constructors) declare_constructor(c, k);
  }

  Symbol entry(const FunctionExpr& f, const std::string& name) {
    declare_constructors(f);
    using K = FunctionExpr::Kind;
    if (f.kind() == K::Case || f.kind() == K::SimRec) return operations(f, name)[f.kind() == K::Case ? 0 : f.select() - 1];
    std::string base = name;
    if (base.empty()) {
      switch (f.kind()) {
        case K::Constructor:
          base = "f_" + f.constructor_symbol().name();
          break;
        case K::Projection:
          base = "proj_" + std::to_string(f.proj_m()) + "_" + std::to_string(f.proj_n());
          break;
        default:
          base = "comp_" + hex(f.structural_hash());
      }
    }
    Symbol op = fresh_operation(base, f.arity());
    std::vector<Term> xs;
    for (std::size_t i = 1; i <= f.arity(); ++i) xs.push_back(var("x", i));
    Term rhs = inline_call(f, xs);
    rules_.push_back({Term::apply(op, xs), rhs});
    return op;
  }

  Signature& signature() { return sig_; }
  std::vector<Rule>& rules() { return rules_; }

 private:
  void declare_constructor(Symbol c, std::size_t k) {
    if (auto info = sig_.lookup(c)) {
      if (info->kind != SymbolKind::Constructor || info->arity != k) {
        throw GrsrError("constructor " + c.name() + " is used with conflicting arities");
      }
      return;
    }
    sig_.add_constructor(c, k);
  }

  void declare_constructors(const FunctionExpr& f) {
    std::vector<FunctionExpr> stack{f};
    std::unordered_map<const void*, bool> seen;
    while (!stack.empty()) {
      FunctionExpr g = stack.back();
      stack.pop_back();
      if (!seen.emplace(g.identity(), true).second) continue;
      switch (g.kind()) {
        case FunctionExpr::Kind::Constructor:
          declare_constructor(g.constructor_symbol(), g.arity());
          break;
        case FunctionExpr::Kind::Composition:
          stack.push_back(g.outer());
          for (const auto& h : g.inner()) stack.push_back(h);
          break;
        case FunctionExpr::Kind::Case:
          declare_algebra(*g.algebra());
          for (const auto& h : g.branches()) stack.push_back(h);
          break;
        case FunctionExpr::Kind::SimRec:
          declare_algebra(*g.algebra());
          for (const auto& row : g.grid()) {
            for (const auto& h : row) stack.push_back(h);
          }
          break;
        default:
          break;
      }
    }
  }

  Symbol fresh_operation(const std::string& base, std::size_t arity) {
    std::string name = base;
    for (int k = 2; sig_.lookup(Symbol::intern(name)); ++k) name = base + "_" + std::to_string(k);
    Symbol s = Symbol::intern(name);
    sig_.add_operation(s, arity);
    return s;
  }

  // Operation symbols of a case (one) or recursion grid (one per component),
  // defining them on first use. Structurally equal nodes share operations.
  const std::vector<Symbol>& operations(const FunctionExpr& f, const std::string& preferred = {}) {
    const bool is_case = f.kind() == FunctionExpr::Kind::Case;
    FunctionExpr key = is_case ? f : f.with_select(1);
    auto range = ops_.equal_range(key.structural_hash());
    for (auto it = range.first; it != range.second; ++it) {
      if (it->second.first == key) return it->second.second;
    }
    std::vector<Symbol> names;
    const std::string h = hex(f.structural_hash());
    if (is_case) {
      std::string base = !f.names().empty() ? f.names().front() : !preferred.empty() ? preferred : "case_" + h;
      names.push_back(fresh_operation(base, f.arity()));
    } else {
      for (std::size_t j = 1; j <= f.components(); ++j) {
        std::string base = !f.names().empty()            ? f.names()[j - 1]
                           : (!preferred.empty() && j == f.select()) ? preferred
                                                                     : "rec_" + h + "_" + std::to_string(j);
        names.push_back(fresh_operation(base, f.arity()));
      }
    }
    auto it = ops_.emplace(key.structural_hash(), std::make_pair(key, names));
    const std::vector<Symbol>& ops = it->second.second;
    const std::size_t q = f.arity() - 1;
    std::vector<Term> ys;
    for (std::size_t i = 1; i <= q; ++i) ys.push_back(var("y", i));
    for (std::size_t i = 0; i < f.algebra()->constructors.size(); ++i) {
      auto [c, ar] = f.algebra()->constructors[i];
      std::vector<Term> xs;
      for (std::size_t l = 1; l <= ar; ++l) xs.push_back(var("x", l));
      std::vector<Term> lhs_args{Term::apply(c, xs)};
      lhs_args.insert(lhs_args.end(), ys.begin(), ys.end());
      if (is_case) {
        std::vector<Term> args = xs;
        args.insert(args.end(), ys.begin(), ys.end());
        Term rhs = inline_call(f.branches()[i], args);
        rules_.push_back({Term::apply(ops[0], lhs_args), rhs});
        continue;
      }
      std::vector<Term> args = xs;
      for (Symbol g : ops) {
        for (const auto& x : xs) {
          std::vector<Term> call{x};
          call.insert(call.end(), ys.begin(), ys.end());
          args.push_back(Term::apply(g, call));
        }
      }
      args.insert(args.end(), ys.begin(), ys.end());
      for (std::size_t j = 0; j < ops.size(); ++j) {
        Term rhs = inline_call(f.grid()[i][j], args);
        rules_.push_back({Term::apply(ops[j], lhs_args), rhs});
      }
    }
    return ops;
  }

  // The right-hand side for f applied to argument terms.
  Term inline_call(const FunctionExpr& f, const std::vector<Term>& args) {
    using K = FunctionExpr::Kind;
    switch (f.kind()) {
      case K::Constructor:
        return Term::apply(f.constructor_symbol(), args);
      case K::Projection:
        return args[f.proj_n() - 1];
      case K::Composition: {
        std::vector<Term> mid;
        for (const auto& g : f.inner()) mid.push_back(inline_call(g, args));
        return inline_call(f.outer(), mid);
      }
      case K::Case:
        return Term::apply(operations(f)[0], args);
      case K::SimRec:
        return Term::apply(operations(f)[f.select() - 1], args);
    }
    throw GrsrError("unknown function kind");
  }

  Signature sig_;
  std::vector<Rule> rules_;
  std::unordered_multimap<std::uint64_t, std::pair<FunctionExpr, std::vector<Symbol>>> ops_;
};

}  // namespace

CompiledFunction compile(const FunctionExpr& f, const std::string& entry_name,
                         std::span<const std::shared_ptr<const Algebra>> algebras) {
  Compiler c;
  for (const auto& a : algebras) c.declare_algebra(*a);
  Symbol entry = c.entry(f, entry_name);
  return CompiledFunction{Program(std::move(c.signature()), std::move(c.rules())), entry};
}

}  // namespace memodag
