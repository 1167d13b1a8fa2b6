#pragma once

#include <compare>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace memodag {

/// Interned identifier. Two symbols are equal iff their names are equal;
/// comparison and hashing are pointer operations.
class Symbol {
 public:
  Symbol() = default;

  static Symbol intern(std::string_view name);

  const std::string& name() const { return *name_; }
  bool valid() const { return name_ != nullptr; }

  friend bool operator==(Symbol a, Symbol b) { return a.name_ == b.name_; }

  /// Orders by name, so iteration over symbol-keyed ordered containers is
  /// reproducible across runs.
  friend std::strong_ordering operator<=>(Symbol a, Symbol b) {
    if (a.name_ == b.name_) return std::strong_ordering::equal;
    return a.name() <=> b.name();
  }

  std::size_t hash() const { return std::hash<const void*>{}(name_); }

  /// Run-independent hash of the name (FNV-1a).
  std::uint64_t stable_hash() const;

 private:
  explicit Symbol(const std::string* name) : name_(name) {}
  const std::string* name_ = nullptr;
};

inline std::ostream& operator<<(std::ostream& os, Symbol s) {
  return os << (s.valid() ? s.name() : std::string("<null>"));
}

}  // namespace memodag

template <>
struct std::hash<memodag::Symbol> {
  std::size_t operator()(memodag::Symbol s) const noexcept { return s.hash(); }
};
