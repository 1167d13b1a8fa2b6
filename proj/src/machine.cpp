#include "memodag/machine.hpp"

#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace memodag {

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::Apply:
      return "apply";
    case StepKind::Read:
      return "read";
    case StepKind::Store:
      return "store";
    case StepKind::Merge:
      return "merge";
  }
  return "?";
}

std::size_t RefCallHash::operator()(const RefCall& c) const {
  return c.operation.hash() * 31 + LocationsHash{}(c.args);
}

std::optional<Location> RefCache::find(const RefCall& call) const {
  auto it = entries_.find(call);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool RefCache::insert(RefCall call, Location result) { return entries_.emplace(std::move(call), result).second; }

bool RefCache::contains_call(Symbol op, std::span<const Location> args) const {
  return entries_.count(RefCall{op, {args.begin(), args.end()}}) != 0;
}

namespace {

std::string call_string(Symbol op, std::span<const Location> args) {
  std::ostringstream os;
  os << op << "(";
  for (std::size_t i = 0; i < args.size(); ++i) os << (i ? "," : "") << args[i];
  os << ")";
  return os.str();
}

std::vector<Location> arg_locations(const Expression& redex) {
  std::vector<Location> out;
  out.reserve(redex.args().size());
  for (const auto& a : redex.args()) out.push_back(a.location());
  return out;
}

Expression instantiate(const Program& p, const Term& rhs, const std::vector<std::pair<Symbol, Location>>& bindings) {
  if (rhs.is_variable()) {
    for (const auto& [x, l] : bindings) {
      if (x == rhs.symbol()) return Expression::location(l);
    }
    throw std::logic_error("unbound variable " + std::string(rhs.symbol().name()));
  }
  std::vector<Expression> args;
  args.reserve(rhs.arity());
  for (const auto& a : rhs.args()) args.push_back(instantiate(p, a, bindings));
  return p.signature().is_operation(rhs.symbol()) ? Expression::call(rhs.symbol(), std::move(args))
                                                  : Expression::construct(rhs.symbol(), std::move(args));
}

// Bindings of every rule of op that graph-matches the argument locations.
std::vector<std::pair<std::size_t, std::vector<std::pair<Symbol, Location>>>> matching_rules(
    const Program& p, const Heap& h, Symbol op, std::span<const Location> args, bool first_only) {
  std::vector<std::pair<std::size_t, std::vector<std::pair<Symbol, Location>>>> out;
  for (std::size_t r : p.rules_for(op)) {
    const auto& trees = p.argument_trees(r);
    if (trees.size() != args.size()) continue;
    std::vector<std::pair<Symbol, Location>> bindings;
    bool ok = true;
    for (std::size_t i = 0; i < trees.size() && ok; ++i) {
      auto m = match_graph(trees[i], h, args[i]);
      if (!m) {
        ok = false;
        break;
      }
      bindings.insert(bindings.end(), m->bindings.begin(), m->bindings.end());
    }
    if (!ok) continue;
    out.emplace_back(r, std::move(bindings));
    if (first_only) break;
  }
  return out;
}

}  // namespace

Configuration initial_configuration(const Program& p, Heap heap, const Term& call) {
  if (call.is_variable() || !p.signature().is_operation(call.symbol())) {
    throw std::invalid_argument("initial expression must be an operation call: " + to_string(call));
  }
  Configuration c{RefCache{}, std::move(heap), Expression{}};
  c.expr = to_expression(p, c.heap, call);
  return c;
}

std::uint64_t configuration_size(const Configuration& c) {
  return c.cache.size() + c.heap.size() + expression_size(c.expr);
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows) {
  os << "step,kind,weight,heap_size,cache_size\n";
  for (const auto& r : rows) {
    os << r.step << ',' << to_string(r.kind) << ',' << r.weight << ',' << r.heap_size << ',' << r.cache_size << '\n';
  }
}

Machine::Machine(const Program& p, Configuration start, MachineOptions options)
    : program_(p), config_(std::move(start)), options_(options) {
  weight_ = expression_weight(config_.expr);
  expr_size_ = expression_size(config_.expr);
  stats_.delta = p.delta();
  stats_.initial_weight = weight_;
  if (!config_.expr.is_location()) {
    focus_.push_back(&config_.expr);
    descend_from(&config_.expr);
  }
}

void Machine::descend_from(Expression* node) {
  for (;;) {
    if (node->kind() == Expression::Kind::Annotation) {
      if (node->body().is_location()) return;
      node = &node->mutable_children()[0];
      focus_.push_back(node);
      focus_index_.push_back(0);
      continue;
    }
    auto& kids = node->mutable_children();
    std::size_t i = 0;
    while (i < kids.size() && kids[i].is_location()) ++i;
    if (i == kids.size()) return;
    node = &kids[i];
    focus_.push_back(node);
    focus_index_.push_back(i);
  }
}

std::vector<std::size_t> Machine::focus_path() const { return focus_index_; }

void Machine::refocus_after(StepKind kind) {
  if (!options_.focus_fast_path) {
    focus_.clear();
    focus_index_.clear();
    auto d = decompose(config_.expr);
    if (!d) return;
    Expression* cur = &config_.expr;
    focus_.push_back(cur);
    for (auto i : d->path) {
      cur = &cur->mutable_children()[i];
      focus_.push_back(cur);
      focus_index_.push_back(i);
    }
    return;
  }
  if (kind == StepKind::Apply) {
    descend_from(focus_.back());
    return;
  }
  // The redex became a location: resume from its parent.
  focus_.pop_back();
  if (!focus_index_.empty()) focus_index_.pop_back();
  if (focus_.empty()) return;
  descend_from(focus_.back());
}

std::optional<StepKind> Machine::step() {
  if (focus_.empty()) return std::nullopt;
  Expression& r = *focus_.back();
  StepKind kind;
  switch (r.kind()) {
    case Expression::Kind::Construct: {
      auto args = arg_locations(r);
      Location l = config_.heap.merge(r.symbol(), args);
      expr_size_ -= args.size();
      r = Expression::location(l);
      kind = StepKind::Merge;
      ++stats_.merges;
      break;
    }
    case Expression::Kind::Annotation: {
      config_.cache.insert(RefCall{r.symbol(), {r.annotation_args().begin(), r.annotation_args().end()}},
                           r.body().location());
      Location l = r.body().location();
      expr_size_ -= 1;
      r = Expression::location(l);
      kind = StepKind::Store;
      ++stats_.stores;
      break;
    }
    case Expression::Kind::Call: {
      auto args = arg_locations(r);
      RefCall key{r.symbol(), args};
      if (auto hit = config_.cache.find(key)) {
        expr_size_ -= args.size();
        r = Expression::location(*hit);
        kind = StepKind::Read;
        ++stats_.reads;
        break;
      }
      auto found = matching_rules(program_, config_.heap, r.symbol(), args, true);
      if (found.empty()) {
        throw EvalError(EvalError::Kind::Stuck, "no rule matches " + call_string(r.symbol(), args), "shared");
      }
      Expression body = instantiate(program_, program_.rules()[found[0].first].rhs, found[0].second);
      std::uint64_t w = expression_weight(body);
      std::uint64_t s = expression_size(body);
      Symbol op = r.symbol();
      r = Expression::annotation(op, std::move(args), std::move(body));
      weight_ += w;
      expr_size_ = expr_size_ - key.args.size() + s;
      kind = StepKind::Apply;
      ++stats_.applies;
      break;
    }
    default:
      throw std::logic_error("focus is not a redex");
  }
  if (kind != StepKind::Apply) weight_ -= 1;
  ++stats_.total;
  refocus_after(kind);
  if (options_.record_trace) {
    trace_.push_back({stats_.total, kind, weight_, config_.heap.size(), config_.cache.size()});
  }
  return kind;
}

std::uint64_t default_step_budget(const Program& p, const Expression& e) {
  return (1 + p.delta()) * 10'000'000ULL + expression_weight(e);
}

RunResult run(const Program& p, Heap h0, Expression e0, std::optional<std::uint64_t> step_budget,
              MachineOptions options) {
  const std::uint64_t budget = step_budget ? *step_budget : default_step_budget(p, e0);
  Machine m(p, Configuration{RefCache{}, std::move(h0), std::move(e0)}, options);
  while (!m.done()) {
    if (m.stats().total >= budget) {
      throw EvalError(EvalError::Kind::BudgetExceeded,
                      "step budget of " + std::to_string(budget) + " exhausted", "shared");
    }
    m.step();
  }
  RunStats stats = m.stats();
  std::vector<TraceRow> trace = m.trace();
  return RunResult{std::move(m).release(), stats, std::move(trace)};
}

std::optional<std::pair<Configuration, StepKind>> step(const Configuration& c, const Program& p) {
  Machine m(p, c, MachineOptions{.focus_fast_path = false, .record_trace = false});
  auto k = m.step();
  if (!k) return std::nullopt;
  return std::make_pair(std::move(m).release(), *k);
}

std::vector<WellFormednessViolation> check_well_formed(const Configuration& c) {
  std::vector<WellFormednessViolation> out;
  const Heap& h = c.heap;
  std::map<std::pair<std::string, std::vector<Location>>, Location> first;
  for (std::uint32_t i = 0; i < h.size(); ++i) {
    const auto& n = h.at(Location{i});
    auto [it, fresh] = first.emplace(std::make_pair(std::string(n.constructor.name()), n.successors), Location{i});
    if (!fresh) {
      std::ostringstream os;
      os << it->second << " and " << Location{i} << " both store " << call_string(n.constructor, n.successors);
      out.push_back({1, os.str()});
    }
    for (auto s : n.successors) {
      if (!h.contains(s)) {
        std::ostringstream os;
        os << "heap node " << Location{i} << " points to missing " << s;
        out.push_back({3, os.str()});
      }
    }
  }
  auto dangling = [&](Location l, const std::string& where) {
    if (!h.contains(l)) {
      std::ostringstream os;
      os << l << " in " << where;
      out.push_back({3, os.str()});
    }
  };
  for (const auto& [call, result] : c.cache.entries()) {
    std::string where = "cache entry " + call_string(call.operation, call.args);
    for (auto l : call.args) dangling(l, where);
    dangling(result, where);
  }
  for (auto l : locations_in(c.expr)) dangling(l, "expression");

  std::vector<const Expression*> stack{&c.expr};
  while (!stack.empty()) {
    const Expression* e = stack.back();
    stack.pop_back();
    if (e->kind() == Expression::Kind::Annotation && c.cache.contains_call(e->symbol(), e->annotation_args())) {
      out.push_back({2, "annotation " + call_string(e->symbol(), e->annotation_args()) + " is already cached"});
    }
    for (const auto& a : e->args()) stack.push_back(&a);
  }
  return out;
}

std::vector<StepKind> applicable_rules(const Configuration& c, const Program& p) {
  std::vector<StepKind> out;
  auto d = decompose(c.expr);
  if (!d) return out;
  const Expression& r = subexpression(c.expr, d->path);
  switch (r.kind()) {
    case Expression::Kind::Construct:
      out.push_back(StepKind::Merge);
      break;
    case Expression::Kind::Annotation:
      out.push_back(StepKind::Store);
      break;
    case Expression::Kind::Call: {
      auto args = arg_locations(r);
      bool cached = c.cache.contains_call(r.symbol(), args);
      if (cached) out.push_back(StepKind::Read);
      if (!cached) {
        for (std::size_t i = 0; i < matching_rules(p, c.heap, r.symbol(), args, false).size(); ++i) {
          out.push_back(StepKind::Apply);
        }
      }
      break;
    }
    default:
      break;
  }
  return out;
}

}  // namespace memodag
