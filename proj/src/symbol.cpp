#include "memodag/symbol.hpp"

#include <mutex>
#include <unordered_set>

namespace memodag {

namespace {

struct SymbolTable {
  std::mutex mutex;
  std::unordered_set<std::string> names;
};

SymbolTable& table() {
  static SymbolTable instance;
  return instance;
}

}  // namespace

Symbol Symbol::intern(std::string_view name) {
  auto& t = table();
  std::lock_guard lock(t.mutex);
  auto [it, inserted] = t.names.emplace(name);
  return Symbol(&*it);
}

std::uint64_t Symbol::stable_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace memodag
