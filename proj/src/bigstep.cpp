#include "memodag/bigstep.hpp"

#include <limits>
#include <memory>
#include <utility>

namespace memodag {

EvalError::EvalError(Kind kind, const std::string& message, std::string engine)
    : std::runtime_error(message), kind_(kind), engine_(std::move(engine)) {}

std::size_t CallHash::operator()(const Call& c) const {
  std::size_t h = c.operation.hash();
  for (const auto& a : c.args) h ^= a.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::optional<Term> TermCache::find(const Call& call) const {
  auto it = entries_.find(call);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool TermCache::insert(Call call, Term value) { return entries_.emplace(std::move(call), std::move(value)).second; }

std::string to_string(const Call& call, const PrintOptions& options) {
  return to_string(Term::apply(call.operation, call.args), options);
}

namespace {

using Bindings = Substitution;

constexpr PrintOptions kErrorPrint{8, true};

/// Big-step evaluator over an explicit stack. With a cache it implements the
/// memoizing semantics (Read / Update), without it plain call-by-value.
class Evaluator {
 public:
  Evaluator(const Program& p, TermCache* cache, std::optional<std::uint64_t> budget, const char* engine)
      : program_(p), cache_(cache), budget_(budget), engine_(engine) {}

  Term run(const Term& input);

  std::uint64_t steps = 0;
  std::uint64_t rewrites = 0;
  std::uint64_t reads = 0;
  std::uint64_t updates = 0;

 private:
  struct Frame {
    bool awaiting_rule = false;
    bool started = false;
    const Term* term = nullptr;
    std::shared_ptr<const Bindings> env;
    std::size_t next = 0;
    std::vector<Term> values;
    Call call;  // awaiting_rule: the call whose result is pending
  };

  void charge(std::uint64_t n) {
    steps = n > std::numeric_limits<std::uint64_t>::max() - steps ? std::numeric_limits<std::uint64_t>::max()
                                                                   : steps + n;
    if (budget_ && steps > *budget_) {
      throw EvalError(EvalError::Kind::BudgetExceeded,
                      std::string(engine_) + " evaluation exceeded the budget of " + std::to_string(*budget_) +
                          " steps",
                      engine_);
    }
  }

  // Either yields the cached result or pushes the frames evaluating a rule.
  std::optional<Term> call(Call c, std::vector<Frame>& stack);

  const Program& program_;
  TermCache* cache_;
  std::optional<std::uint64_t> budget_;
  const char* engine_;
};

std::optional<Term> Evaluator::call(Call c, std::vector<Frame>& stack) {
  charge(1);
  if (cache_) {
    if (auto hit = cache_->find(c)) {
      ++reads;
      return hit;
    }
  }
  for (std::size_t ri : program_.rules_for(c.operation)) {
    const Rule& rule = program_.rules()[ri];
    auto env = std::make_shared<Bindings>();
    bool ok = true;
    for (std::size_t i = 0; i < c.args.size() && ok; ++i) {
      auto sigma = match_term(rule.lhs.arg(i), c.args[i]);
      if (!sigma) {
        ok = false;
        break;
      }
      env->merge(*sigma);
    }
    if (!ok) continue;
    ++rewrites;
    Frame await;
    await.awaiting_rule = true;
    await.call = std::move(c);
    stack.push_back(std::move(await));
    Frame body;
    body.term = &rule.rhs;
    body.env = std::move(env);
    stack.push_back(std::move(body));
    return std::nullopt;
  }
  throw EvalError(EvalError::Kind::Stuck, "stuck: no rule matches " + to_string(c, kErrorPrint), engine_);
}

Term Evaluator::run(const Term& input) {
  std::vector<Frame> stack;
  Frame root;
  root.term = &input;
  stack.push_back(std::move(root));
  std::optional<Term> ret;

  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.awaiting_rule) {
      if (cache_) {
        cache_->insert(std::move(f.call), *ret);
        ++updates;
      }
      stack.pop_back();
      continue;
    }
    const Term& t = *f.term;
    if (!f.started) {
      f.started = true;
      if (t.is_variable()) {
        if (!f.env) {
          throw EvalError(EvalError::Kind::NotGround, "cannot evaluate open term: variable '" + t.symbol().name() + "'",
                          engine_);
        }
        ret = f.env->at(t.symbol());
        charge(ret->size());
        stack.pop_back();
        continue;
      }
      if (!program_.signature().lookup(t.symbol())) {
        throw EvalError(EvalError::Kind::NotGround, "undeclared symbol '" + t.symbol().name() + "'", engine_);
      }
      charge(1);
      f.values.reserve(t.arity());
    }
    if (ret) {
      f.values.push_back(std::move(*ret));
      ret.reset();
    }
    if (f.next < t.arity()) {
      Frame child;
      child.term = &t.arg(f.next++);
      child.env = f.env;
      stack.push_back(std::move(child));  // invalidates f
      continue;
    }
    if (program_.signature().is_constructor(t.symbol())) {
      bool unchanged = !f.env;
      for (std::size_t i = 0; unchanged && i < t.arity(); ++i) unchanged = f.values[i].identity() == t.arg(i).identity();
      ret = unchanged ? t : Term::apply(t.symbol(), std::move(f.values));
      stack.pop_back();
      continue;
    }
    Call c{t.symbol(), std::move(f.values)};
    stack.pop_back();
    ret = call(std::move(c), stack);
  }
  return *ret;
}

}  // namespace

NaiveOutcome eval_cbv(const Program& p, const Term& t, std::uint64_t budget) {
  Evaluator ev(p, nullptr, budget, "naive");
  NaiveOutcome out;
  out.value = ev.run(t);
  out.steps = ev.steps;
  out.rewrites = ev.rewrites;
  return out;
}

CostedOutcome eval_memo(const Program& p, TermCache initial, const Term& t, std::optional<std::uint64_t> budget) {
  CostedOutcome out;
  out.cache = std::move(initial);
  Evaluator ev(p, &out.cache, budget, "memo");
  out.value = ev.run(t);
  out.cost = ev.updates;
  out.reads = ev.reads;
  out.steps = ev.steps;
  return out;
}

bool equivalence_check(const Program& p, const Term& t, std::uint64_t budget) {
  auto naive = eval_cbv(p, t, budget);
  auto memo = eval_memo(p, {}, t, budget);
  return naive.value == memo.value;
}

}  // namespace memodag
