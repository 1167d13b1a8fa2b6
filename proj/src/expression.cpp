#include "memodag/expression.hpp"

#include <sstream>

namespace memodag {

Expression Expression::location(Location l) {
  Expression e;
  e.kind_ = Kind::Location;
  e.location_ = l;
  return e;
}

Expression Expression::call(Symbol op, std::vector<Expression> args) {
  Expression e;
  e.kind_ = Kind::Call;
  e.symbol_ = op;
  e.children_ = std::move(args);
  return e;
}

Expression Expression::construct(Symbol c, std::vector<Expression> args) {
  Expression e;
  e.kind_ = Kind::Construct;
  e.symbol_ = c;
  e.children_ = std::move(args);
  return e;
}

Expression Expression::annotation(Symbol op, std::vector<Location> call_args, Expression body) {
  Expression e;
  e.kind_ = Kind::Annotation;
  e.symbol_ = op;
  e.refs_ = std::move(call_args);
  e.children_.push_back(std::move(body));
  return e;
}

namespace {

void print(std::ostream& os, const Expression& e, const Expression* hole) {
  if (&e == hole) {
    os << "□";
    return;
  }
  switch (e.kind()) {
    case Expression::Kind::Location:
      os << e.location();
      return;
    case Expression::Kind::Annotation: {
      os << e.symbol() << '<';
      auto refs = e.annotation_args();
      for (std::size_t i = 0; i < refs.size(); ++i) os << (i ? "," : "") << refs[i];
      os << ">{";
      print(os, e.body(), hole);
      os << '}';
      return;
    }
    case Expression::Kind::Call:
    case Expression::Kind::Construct: {
      os << e.symbol();
      if (e.args().empty()) return;
      os << '(';
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i) os << ", ";
        print(os, e.args()[i], hole);
      }
      os << ')';
      return;
    }
  }
}

template <typename F>
void for_each_node(const Expression& e, F&& f) {
  std::vector<const Expression*> stack{&e};
  while (!stack.empty()) {
    const Expression* n = stack.back();
    stack.pop_back();
    f(*n);
    for (const auto& c : n->args()) stack.push_back(&c);
  }
}

bool is_redex(const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::Location:
      return false;
    case Expression::Kind::Annotation:
      return e.body().is_location();
    default:
      for (const auto& a : e.args()) {
        if (!a.is_location()) return false;
      }
      return true;
  }
}

}  // namespace

std::string to_string(const Expression& e) {
  std::ostringstream os;
  print(os, e, nullptr);
  return os.str();
}

std::uint64_t expression_size(const Expression& e) {
  std::uint64_t n = 0;
  for_each_node(e, [&](const Expression&) { ++n; });
  return n;
}

std::uint64_t expression_weight(const Expression& e) {
  std::uint64_t n = 0;
  for_each_node(e, [&](const Expression& x) { n += x.is_location() ? 0 : 1; });
  return n;
}

Term unfold_expression(const Heap& h, const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::Location:
      return unfold(h, e.location());
    case Expression::Kind::Annotation:
      return unfold_expression(h, e.body());
    default: {
      std::vector<Term> args;
      args.reserve(e.args().size());
      for (const auto& a : e.args()) args.push_back(unfold_expression(h, a));
      return Term::apply(e.symbol(), std::move(args));
    }
  }
}

std::vector<Location> locations_in(const Expression& e) {
  std::vector<Location> out;
  for_each_node(e, [&](const Expression& x) {
    if (x.is_location()) out.push_back(x.location());
    for (auto l : x.annotation_args()) out.push_back(l);
  });
  return out;
}

Expression to_expression(const Program& p, Heap& h, const Term& t) {
  if (p.is_value(t)) return Expression::location(store_value(h, t));
  if (t.is_variable()) throw std::invalid_argument("to_expression: term is not ground: " + to_string(t));
  if (!p.signature().lookup(t.symbol())) {
    throw std::invalid_argument("to_expression: undeclared symbol '" + t.symbol().name() + "'");
  }
  std::vector<Expression> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(to_expression(p, h, a));
  return p.signature().is_operation(t.symbol()) ? Expression::call(t.symbol(), std::move(args))
                                                : Expression::construct(t.symbol(), std::move(args));
}

std::optional<Decomposition> decompose(const Expression& e) {
  if (e.is_location()) return std::nullopt;
  Decomposition d;
  const Expression* cur = &e;
  for (;;) {
    if (cur->kind() == Expression::Kind::Annotation) {
      if (cur->body().is_location()) return d;
      d.path.push_back(0);
      cur = &cur->body();
      continue;
    }
    std::size_t i = 0;
    while (i < cur->args().size() && cur->args()[i].is_location()) ++i;
    if (i == cur->args().size()) return d;
    d.path.push_back(i);
    cur = &cur->args()[i];
  }
}

std::vector<Decomposition> all_decompositions(const Expression& e) {
  std::vector<Decomposition> out;
  // Walk every position reachable through context-grammar steps.
  struct Item {
    const Expression* node;
    std::vector<std::size_t> path;
  };
  std::vector<Item> stack{{&e, {}}};
  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    const Expression& n = *item.node;
    if (is_redex(n)) out.push_back({item.path});
    if (n.is_location()) continue;
    for (std::size_t i = 0; i < n.args().size(); ++i) {
      bool left_are_locations = true;
      for (std::size_t j = 0; j < i; ++j) left_are_locations = left_are_locations && n.args()[j].is_location();
      if (!left_are_locations) break;
      auto path = item.path;
      path.push_back(i);
      stack.push_back({&n.args()[i], std::move(path)});
    }
  }
  return out;
}

const Expression& subexpression(const Expression& e, std::span<const std::size_t> path) {
  const Expression* cur = &e;
  for (auto i : path) cur = &cur->args()[i];
  return *cur;
}

std::string render_context(const Expression& e, std::span<const std::size_t> path) {
  std::ostringstream os;
  print(os, e, &subexpression(e, path));
  return os.str();
}

}  // namespace memodag
