#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memodag/grsr.hpp"

namespace memodag {

/// Tiers of the inputs and of the output of a function.
struct TierSignature {
  std::vector<unsigned> inputs;
  unsigned output = 0;
  friend bool operator==(const TierSignature&, const TierSignature&) = default;
  friend auto operator<=>(const TierSignature&, const TierSignature&) = default;
};

/// "2 x 1 -> 1"; with an algebra name, "N@2 x N@1 -> N@1".
std::string to_string(const TierSignature& s);
std::string to_string(const TierSignature& s, const std::vector<std::string>& input_algebras,
                      const std::string& output_algebra);

enum class TierRule { Constructor, Projection, Composition, Case, SimRec };

const char* to_string(TierRule r);

/// One node per function occurrence. Premises: composition lists the outer
/// function then the inner ones; case lists branches; recursion lists the
/// grid row by row.
struct TierDerivation {
  FunctionExpr function;
  TierSignature signature;
  TierRule rule;
  std::vector<TierDerivation> premises;
};

struct TierCheck {
  std::optional<TierDerivation> derivation;
  /// Why no derivation exists (empty on success).
  std::string blocking;
  explicit operator bool() const { return derivation.has_value(); }
};

/// Number of distinct recursion grids plus one.
unsigned default_tier_bound(const FunctionExpr& f);

/// Searches for a derivation of f : sig whose intermediate tiers lie in
/// 0..t_max (default: the larger of default_tier_bound and the tiers in sig).
TierCheck check_tiers(const FunctionExpr& f, const TierSignature& sig, std::optional<unsigned> t_max = std::nullopt);

/// Every signature with tiers in 0..t_max that admits a derivation, in
/// lexicographic order.
std::vector<TierSignature> infer_tiers(const FunctionExpr& f, unsigned t_max);

/// When no signature at all is derivable, the constraint that rules them out.
std::optional<std::string> untierable_reason(const FunctionExpr& f);

/// Re-checks a derivation rule by rule; returns the violations found.
std::vector<std::string> validate_derivation(const TierDerivation& d);

/// Renames tiers to 0..k-1 preserving their order.
TierSignature collapse_tier_gaps(const TierSignature& s);

}  // namespace memodag
