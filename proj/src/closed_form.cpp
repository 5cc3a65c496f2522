#include "maxnim/closed_form.hpp"

namespace maxnim {

GrundyValue generic_regular_grundy_unchecked(Stones t, const RuleSequence& rule) {
  while (t != 0) {
    const Stones cur = rule.cap(t);
    if (cur > rule.cap(t - 1)) return GrundyValue{cur};
    // Regularity gives f(t) <= t - 1 here, so the argument stays >= 0.
    t = t - cur - 1;
  }
  return GrundyValue{0};
}

GrundyValue generic_regular_grundy(Stones t, const RuleSequence& rule) {
  if (rule.kind() == RuleKind::custom) {
    if (auto limit = rule.domain_limit(); limit && t > *limit) {
      throw RuleDomainError("rule '" + rule.name() + "' is defined only for m <= " +
                            std::to_string(*limit));
    }
    if (auto check = validate_regular(rule, t); !check) {
      throw NonRegularRuleError("rule '" + rule.name() + "' is not regular at m = " +
                                std::to_string(*check.first_violation));
    }
  }
  return generic_regular_grundy_unchecked(t, rule);
}

GrundyValue half_grundy(Stones t) {
  while (t >= 2 && t % 2 == 0) t = (t - 2) / 2;
  if (t == 0) return GrundyValue{0};
  return GrundyValue{t / 2 + 1};  // (t+1)/2 for odd t, overflow-free
}

GrundyValue half_grundy_pass_single(Stones t) {
  if (t == 0) return GrundyValue{0};
  const auto g = half_grundy(t).value;
  if (g == 0) return GrundyValue{1};
  if (g == 2) return GrundyValue{0};
  if (g % 2 == 0) return GrundyValue{g - 1};
  return GrundyValue{g + 1};
}

GrundyValue half_grundy_multi(std::span<const Stones> piles) {
  GrundyValue acc{0};
  for (auto p : piles) acc = acc ^ half_grundy(p);
  return acc;
}

GrundyValue half_grundy_pass_multi(std::span<const Stones> piles, bool pass_available) {
  if (!pass_available) return half_grundy_multi(piles);
  std::size_t nonzero = 0;
  Stones last = 0;
  for (auto p : piles) {
    if (p != 0) {
      ++nonzero;
      last = p;
    }
  }
  if (nonzero == 0) return GrundyValue{0};
  if (nonzero == 1) return half_grundy_pass_single(last);
  return GrundyValue{half_grundy_multi(piles).value ^ 1};
}

bool closed_form_supported(const RuleSequence& rule, bool pass_variant, bool pass_available) {
  if (rule.kind() == RuleKind::half_ceiling) return true;
  return !(pass_variant && pass_available);
}

GrundyValue closed_form_grundy(const Position& pos, const RuleSequence& rule, bool pass_variant) {
  const bool pass = pass_variant && pos.pass_available;
  if (rule.kind() == RuleKind::half_ceiling) return half_grundy_pass_multi(pos.piles, pass);
  if (pass) {
    throw UnsupportedRuleError("no closed form for rule '" + rule.name() +
                               "' with the pass available; use the oracle");
  }
  GrundyValue acc{0};
  for (auto p : pos.piles) acc = acc ^ generic_regular_grundy(p, rule);
  return acc;
}

}  // namespace maxnim
