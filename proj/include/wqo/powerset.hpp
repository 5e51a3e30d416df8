#pragma once

#include <array>
#include <bit>

#include "wqo/order.hpp"

namespace wqo {

// ---------------------------------------------------------------------------
// Hoare and Smyth orders on finite subsets

/// Hoare order: A <=b B iff every a in A is below some b in B, i.e.
/// A is contained in B-down.
inline bool flat_leq(const QuasiOrder& o, const FinSubset& a,
                     const FinSubset& b) {
  for (Code x : a.elems())
    if (!closure_contains(o, Dir::Down, b, x)) return false;
  return true;
}

/// Smyth order: A <=s B iff every b in B is above some a in A, i.e.
/// B is contained in A-up.
inline bool sharp_leq(const QuasiOrder& o, const FinSubset& a,
                      const FinSubset& b) {
  for (Code x : b.elems())
    if (!closure_contains(o, Dir::Up, a, x)) return false;
  return true;
}

enum class PowerMode { Flat, Sharp };

inline const char* to_string(PowerMode m) {
  return m == PowerMode::Flat ? "flat" : "sharp";
}

/// The quasi-order of finite subsets of O under the Hoare (flat) or Smyth
/// (sharp) order, as a first-class QuasiOrder. Carrier codes are the
/// bijective finite-set coding (bit i <=> element i), so the carrier ranges
/// over subsets of O's valid codes below 64 -- enough for every desk-scale
/// search in this library. Closures of those codes are pretabulated, which
/// makes leq a couple of word operations.
inline QuasiOrder power_order(const QuasiOrder& o, PowerMode mode) {
  Code valid_bits = 0;
  for (Code c = 0; c < 64; ++c)
    if (o.contains(c)) valid_bits |= Code{1} << c;

  auto closures = std::make_shared<std::array<std::array<Code, 64>, 2>>();
  for (Code i = 0; i < 64; ++i) {
    Code down = 0, up = 0;
    if (valid_bits & (Code{1} << i)) {
      for (Code j = 0; j < 64; ++j) {
        if (!(valid_bits & (Code{1} << j))) continue;
        if (o.leq_unchecked(j, i)) down |= Code{1} << j;  // j <= i
        if (o.leq_unchecked(i, j)) up |= Code{1} << j;    // i <= j
      }
    }
    (*closures)[0][i] = down;
    (*closures)[1][i] = up;
  }

  auto spread = [closures](int dir, Code mask) {
    Code acc = 0;
    while (mask) {
      Code bit = mask & (~mask + 1);
      acc |= (*closures)[dir][static_cast<Code>(std::countr_zero(bit))];
      mask ^= bit;
    }
    return acc;
  };

  std::function<bool(Code, Code)> leq;
  if (mode == PowerMode::Flat)
    leq = [spread](Code a, Code b) { return (a & ~spread(0, b)) == 0; };
  else
    leq = [spread](Code a, Code b) { return (b & ~spread(1, a)) == 0; };

  // Valid power codes are exactly the submasks of valid_bits; enumerate
  // them with the carry trick.
  auto succ = [valid_bits](Code m) -> std::optional<Code> {
    if (m >= valid_bits) return std::nullopt;
    return ((m | ~valid_bits) + 1) & valid_bits;
  };

  std::string prefix = mode == PowerMode::Flat ? "flat_power(" : "sharp_power(";
  return QuasiOrder(
      prefix + o.name() + ")",
      Universe::coded([valid_bits](Code m) { return (m & ~valid_bits) == 0; },
                      succ,
                      valid_bits == UINT64_MAX
                          ? std::optional<Code>{}
                          : std::optional<Code>{valid_bits + 1}),
      std::move(leq));
}

// ---------------------------------------------------------------------------
// Symbolic subsets

/// A finitely-described, possibly infinite subset of a quasi-order with
/// decidable membership. These play the role of the points X of the
/// uncountable power spaces. The five shapes are exactly what the closed-set
/// constructions need:
///   Fin(F)    the finite set F itself
///   Up(F)     F-up    (upward closure)
///   Down(F)   F-down  (downward closure)
///   CoUp(F)   Q minus F-up
///   CoDown(F) Q minus F-down
class SymbolicSubset {
 public:
  enum class Shape { Fin, Up, Down, CoUp, CoDown };

  SymbolicSubset(Shape shape, FinSubset gen, QuasiOrder base)
      : shape_(shape), gen_(std::move(gen)), base_(std::move(base)) {
    for (Code c : gen_.elems()) base_.require(c);
  }

  static SymbolicSubset fin(FinSubset f, QuasiOrder base) {
    return {Shape::Fin, std::move(f), std::move(base)};
  }
  static SymbolicSubset up(FinSubset f, QuasiOrder base) {
    return {Shape::Up, std::move(f), std::move(base)};
  }
  static SymbolicSubset down(FinSubset f, QuasiOrder base) {
    return {Shape::Down, std::move(f), std::move(base)};
  }
  static SymbolicSubset co_up(FinSubset f, QuasiOrder base) {
    return {Shape::CoUp, std::move(f), std::move(base)};
  }
  static SymbolicSubset co_down(FinSubset f, QuasiOrder base) {
    return {Shape::CoDown, std::move(f), std::move(base)};
  }

  /// The whole order as a symbolic point: the complement of the empty
  /// upward closure.
  static SymbolicSubset whole(QuasiOrder base) {
    return co_up(FinSubset{}, std::move(base));
  }

  Shape shape() const { return shape_; }
  const FinSubset& generators() const { return gen_; }
  const QuasiOrder& base() const { return base_; }

  bool member(Code q) const {
    switch (shape_) {
      case Shape::Fin: base_.require(q); return gen_.contains(q);
      case Shape::Up: return closure_contains(base_, Dir::Up, gen_, q);
      case Shape::Down: return closure_contains(base_, Dir::Down, gen_, q);
      case Shape::CoUp: return !closure_contains(base_, Dir::Up, gen_, q);
      case Shape::CoDown: return !closure_contains(base_, Dir::Down, gen_, q);
    }
    return false;
  }

  /// Least member with code >= from, scanning at most scan_budget carrier
  /// codes. Fin shapes never scan.
  std::optional<Code> first_member_from(Code from,
                                        std::uint64_t scan_budget) const {
    if (shape_ == Shape::Fin) {
      for (Code c : gen_.elems())
        if (c >= from) return c;
      return std::nullopt;
    }
    Code c = from;
    for (std::uint64_t used = 0; used < scan_budget; ++used) {
      auto next = base_.universe().first_from(c);
      if (!next) return std::nullopt;
      if (member(*next)) return *next;
      if (*next == UINT64_MAX) return std::nullopt;
      c = *next + 1;
    }
    return std::nullopt;
  }

 private:
  Shape shape_;
  FinSubset gen_;
  QuasiOrder base_;
};

/// Decidable membership of q in the symbolic set X.
inline bool sym_member(const SymbolicSubset& x, Code q) { return x.member(q); }

}  // namespace wqo
