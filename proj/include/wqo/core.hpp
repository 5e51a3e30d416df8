#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wqo {

/// Element code. Every carrier is a set of naturals; structured carriers
/// (pairs, finite sets) are encoded into naturals by the helpers below.
using Code = std::uint64_t;

// ---------------------------------------------------------------------------
// Errors

/// A code was passed to an order/space whose carrier does not contain it.
struct CarrierError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A user-supplied specification (order spec, injection, JSON input) is
/// malformed.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Membership for this symbolic-set shape is not decidable in this mode.
struct UnsupportedShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A stage-bounded structure was queried beyond its bound; rebuild with a
/// larger bound.
struct NeedsMoreStagesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An internal consistency check failed. Indicates a construction bug, not
/// bad input.
struct VerificationError : std::logic_error {
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Diagonal pairing

/// Cantor pairing (a,b) -> (a+b)(a+b+1)/2 + b. Throws SpecError on 64-bit
/// overflow.
inline Code pair_code(Code a, Code b) {
  unsigned __int128 s = static_cast<unsigned __int128>(a) + b;
  unsigned __int128 v = s * (s + 1) / 2 + b;
  if (v > static_cast<unsigned __int128>(UINT64_MAX))
    throw SpecError("pair_code: overflow");
  return static_cast<Code>(v);
}

inline std::pair<Code, Code> unpair_code(Code c) {
  // Invert the diagonal: find the largest s with s(s+1)/2 <= c.
  unsigned __int128 lo = 0, hi = 0x1'0000'0000ULL;  // s < 2^32 suffices for 64-bit c... not quite: s up to ~6.07e9
  hi = 6'100'000'000ULL;
  while (lo < hi) {
    unsigned __int128 mid = (lo + hi + 1) / 2;
    if (mid * (mid + 1) / 2 <= c)
      lo = mid;
    else
      hi = mid - 1;
  }
  Code s = static_cast<Code>(lo);
  Code b = c - s * (s + 1) / 2;
  return {s - b, b};
}

// ---------------------------------------------------------------------------
// Finite subsets

/// Canonical finite set of element codes: strictly increasing, duplicate
/// free. The canonical form is unique per extensional set.
class FinSubset {
 public:
  FinSubset() = default;

  explicit FinSubset(std::vector<Code> elems) : elems_(std::move(elems)) {
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
  }

  FinSubset(std::initializer_list<Code> elems)
      : FinSubset(std::vector<Code>(elems)) {}

  /// Decode the bijective coding of finite sets: bit i set <=> i in the set.
  static FinSubset from_mask(Code mask) {
    FinSubset s;
    for (Code i = 0; i < 64; ++i)
      if (mask & (Code{1} << i)) s.elems_.push_back(i);
    return s;
  }

  /// Inverse of from_mask. Only sets with all elements < 64 have mask codes.
  Code to_mask() const {
    Code m = 0;
    for (Code e : elems_) {
      if (e >= 64) throw CarrierError("FinSubset::to_mask: element >= 64");
      m |= Code{1} << e;
    }
    return m;
  }

  bool contains(Code c) const {
    return std::binary_search(elems_.begin(), elems_.end(), c);
  }

  bool empty() const { return elems_.empty(); }
  std::size_t size() const { return elems_.size(); }
  const std::vector<Code>& elems() const { return elems_; }

  FinSubset union_with(const FinSubset& o) const {
    std::vector<Code> v;
    std::set_union(elems_.begin(), elems_.end(), o.elems_.begin(),
                   o.elems_.end(), std::back_inserter(v));
    FinSubset r;
    r.elems_ = std::move(v);
    return r;
  }

  FinSubset minus(const FinSubset& o) const {
    std::vector<Code> v;
    std::set_difference(elems_.begin(), elems_.end(), o.elems_.begin(),
                        o.elems_.end(), std::back_inserter(v));
    FinSubset r;
    r.elems_ = std::move(v);
    return r;
  }

  FinSubset with(Code c) const { return union_with(FinSubset{c}); }
  FinSubset without(Code c) const { return minus(FinSubset{c}); }

  bool subset_of(const FinSubset& o) const {
    return std::includes(o.elems_.begin(), o.elems_.end(), elems_.begin(),
                         elems_.end());
  }

  friend bool operator==(const FinSubset&, const FinSubset&) = default;
  friend auto operator<=>(const FinSubset&, const FinSubset&) = default;

 private:
  std::vector<Code> elems_;
};

// ---------------------------------------------------------------------------
// Carriers

/// Descriptor of a carrier: which codes denote elements. Coded carriers use
/// a validity predicate, optionally with an exclusive upper bound on valid
/// codes so that enumeration can terminate.
class Universe {
 public:
  enum class Kind { Finite, All, Coded };

  static Universe finite(Code n) {
    Universe u;
    u.kind_ = Kind::Finite;
    u.size_ = n;
    return u;
  }

  static Universe all() {
    Universe u;
    u.kind_ = Kind::All;
    return u;
  }

  static Universe coded(std::function<bool(Code)> valid,
                        std::optional<Code> bound = std::nullopt) {
    Universe u;
    u.kind_ = Kind::Coded;
    u.valid_ = std::move(valid);
    u.bound_ = bound;
    return u;
  }

  /// Coded universe with a dedicated successor function (least valid code
  /// strictly above the argument). Used by sparse carriers where a linear
  /// scan would be too slow.
  static Universe coded(std::function<bool(Code)> valid,
                        std::function<std::optional<Code>(Code)> succ,
                        std::optional<Code> bound) {
    Universe u;
    u.kind_ = Kind::Coded;
    u.valid_ = std::move(valid);
    u.succ_ = std::move(succ);
    u.bound_ = bound;
    return u;
  }

  Kind kind() const { return kind_; }

  bool contains(Code c) const {
    switch (kind_) {
      case Kind::Finite: return c < size_;
      case Kind::All: return true;
      case Kind::Coded: return (!bound_ || c < *bound_) && valid_(c);
    }
    return false;
  }

  /// Exclusive upper bound on valid codes, when one is known.
  std::optional<Code> bound() const {
    switch (kind_) {
      case Kind::Finite: return size_;
      case Kind::All: return std::nullopt;
      case Kind::Coded: return bound_;
    }
    return std::nullopt;
  }

  bool is_bounded() const { return bound().has_value(); }

  /// Least valid code >= from, or nullopt if the carrier is bounded and
  /// exhausted. For unbounded carriers the scan runs until it finds one;
  /// all carriers built by this library have cofinal valid codes.
  std::optional<Code> first_from(Code from) const {
    if (kind_ == Kind::All) return from;
    if (succ_) {
      if (contains(from)) return from;
      if (from == 0) {
        auto s = succ_(0);
        if (s && bound_ && *s >= *bound_) return std::nullopt;
        return s;
      }
      auto s = succ_(from - 1);
      while (s && *s < from) s = succ_(*s);
      if (s && bound_ && *s >= *bound_) return std::nullopt;
      return s;
    }
    std::optional<Code> b = bound();
    for (Code c = from;; ++c) {
      if (b && c >= *b) return std::nullopt;
      if (contains(c)) return c;
      if (c == UINT64_MAX) return std::nullopt;
    }
  }

  /// The n-th valid code (0-based), or nullopt when fewer exist.
  std::optional<Code> nth(Code n) const {
    Code c = 0;
    for (Code i = 0;; ++i) {
      auto next = first_from(c);
      if (!next) return std::nullopt;
      if (i == n) return next;
      c = *next + 1;
    }
  }

 private:
  Kind kind_ = Kind::All;
  Code size_ = 0;
  std::function<bool(Code)> valid_;
  std::function<std::optional<Code>(Code)> succ_;
  std::optional<Code> bound_;
};

}  // namespace wqo
