#pragma once

// Constant- and logarithmic-time Grundy evaluators for maximum Nim.
//
// The half-ceiling family (f(m) = ceil(m/2)) is solved completely, with and
// without a one-time pass. For other regular rules only the pass-free game
// has a closed form (the Levine recurrence per pile, nim-summed).

#include <span>

#include "maxnim/core.hpp"

namespace maxnim {

/// Single-pile value for any regular rule:
///   G(0) = 0; G(t) = f(t) if f(t) > f(t-1); otherwise G(t - f(t) - 1).
/// Built-in rules are regular by construction; custom rules are validated on
/// [0, t] and throw NonRegularRuleError on failure.
GrundyValue generic_regular_grundy(Stones t, const RuleSequence& rule);

/// As above, skipping validation. The caller guarantees regularity on [0, t].
GrundyValue generic_regular_grundy_unchecked(Stones t, const RuleSequence& rule);

/// f(m) = ceil(m/2), one pile. Strips the even rule t -> (t-2)/2 until t is
/// odd or zero, then G(t) = (t+1)/2. O(log t).
GrundyValue half_grundy(Stones t);

/// One pile with the pass still available. Writing g = half_grundy(t):
/// t = 0 -> 0; g = 0 -> 1; g = 2 -> 0; other even g -> g-1; odd g -> g+1.
GrundyValue half_grundy_pass_single(Stones t);

/// Pass-free multi-pile value: nim-sum of the per-pile values.
GrundyValue half_grundy_multi(std::span<const Stones> piles);

/// Multi-pile value with the pass flag. With the pass consumed this is
/// half_grundy_multi. With it available: all piles empty -> 0; exactly one
/// nonzero pile -> half_grundy_pass_single of that pile; otherwise the
/// pass-free value with its lowest bit flipped.
///
/// Proved for three piles; the n-pile form is checked exhaustively on small
/// boxes by the verification suites.
GrundyValue half_grundy_pass_multi(std::span<const Stones> piles, bool pass_available);

/// Dispatches to the closed forms above. Half-ceiling rules accept every
/// position; other regular rules only the pass-free game (pass variant off or
/// pass consumed). Anything else throws UnsupportedRuleError.
GrundyValue closed_form_grundy(const Position& pos, const RuleSequence& rule, bool pass_variant);

/// True when closed_form_grundy can answer for this game without throwing
/// UnsupportedRuleError (regularity of custom rules is still checked later).
bool closed_form_supported(const RuleSequence& rule, bool pass_variant, bool pass_available);

}  // namespace maxnim
