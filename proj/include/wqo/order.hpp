#pragma once

#include <memory>
#include <span>

#include "wqo/core.hpp"

namespace wqo {

// ---------------------------------------------------------------------------
// Quasi-orders as oracles

/// An encoded quasi-order: a carrier plus a total decidable order predicate.
/// All algorithms in this library consume quasi-orders through this
/// interface. Values are immutable after construction and all queries are
/// pure, so concurrent evaluation is safe.
class QuasiOrder {
 public:
  QuasiOrder() = default;
  QuasiOrder(std::string name, Universe universe,
             std::function<bool(Code, Code)> leq)
      : name_(std::move(name)),
        universe_(std::move(universe)),
        leq_(std::move(leq)) {}

  const std::string& name() const { return name_; }
  const Universe& universe() const { return universe_; }

  bool contains(Code c) const { return universe_.contains(c); }

  void require(Code c) const {
    if (!contains(c))
      throw CarrierError(name_ + ": code " + std::to_string(c) +
                         " is not in the carrier");
  }

  bool leq(Code a, Code b) const {
    require(a);
    require(b);
    return leq_(a, b);
  }

  /// Raw predicate without carrier validation, for hot loops that have
  /// already validated their inputs.
  bool leq_unchecked(Code a, Code b) const { return leq_(a, b); }

 private:
  std::string name_;
  Universe universe_;
  std::function<bool(Code, Code)> leq_;
};

enum class Relation { Equivalent, StrictLess, StrictGreater, Incomparable };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::Equivalent: return "equivalent";
    case Relation::StrictLess: return "strict_less";
    case Relation::StrictGreater: return "strict_greater";
    case Relation::Incomparable: return "incomparable";
  }
  return "?";
}

/// Classifies a pair by its two leq queries. StrictLess means a <= b and
/// not b <= a; Equivalent means both directions hold (quasi-orders permit
/// distinct equivalent elements).
inline Relation relation_query(const QuasiOrder& o, Code a, Code b) {
  bool ab = o.leq(a, b);
  bool ba = o.leq(b, a);
  if (ab && ba) return Relation::Equivalent;
  if (ab) return Relation::StrictLess;
  if (ba) return Relation::StrictGreater;
  return Relation::Incomparable;
}

enum class Dir { Down, Up };

/// Down: q in F-down-closure, i.e. some p in F with q <= p.
/// Up:   q in F-up-closure,   i.e. some p in F with p <= q.
inline bool closure_contains(const QuasiOrder& o, Dir dir, const FinSubset& f,
                             Code q) {
  o.require(q);
  for (Code p : f.elems()) {
    o.require(p);
    if (dir == Dir::Down ? o.leq_unchecked(q, p) : o.leq_unchecked(p, q))
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Bad sequences

/// True iff no earlier element is <= a later one.
inline bool is_bad_sequence(const std::function<bool(Code, Code)>& leq,
                            std::span<const Code> seq) {
  for (std::size_t m = 0; m < seq.size(); ++m)
    for (std::size_t n = m + 1; n < seq.size(); ++n)
      if (leq(seq[m], seq[n])) return false;
  return true;
}

inline bool is_bad_prefix(const QuasiOrder& o, std::span<const Code> seq) {
  for (Code c : seq) o.require(c);
  return is_bad_sequence([&](Code a, Code b) { return o.leq_unchecked(a, b); },
                         seq);
}

/// A finite bad sequence, verified at construction: for all m < n,
/// not seq[m] <= seq[n].
class BadPrefix {
 public:
  static BadPrefix verified(const QuasiOrder& o, std::vector<Code> seq) {
    if (!is_bad_prefix(o, seq))
      throw VerificationError("BadPrefix: sequence is not bad in " + o.name());
    BadPrefix b;
    b.order_ = o;
    b.seq_ = std::move(seq);
    return b;
  }

  const std::vector<Code>& seq() const { return seq_; }
  const QuasiOrder& order() const { return order_; }
  std::size_t size() const { return seq_.size(); }

 private:
  BadPrefix() = default;
  QuasiOrder order_;
  std::vector<Code> seq_;
};

struct BadSearch {
  /// Empty means NotFoundWithinBudget: a verdict about the search, never an
  /// assertion that the order is a wqo.
  std::optional<BadPrefix> prefix;
  std::uint64_t expansions = 0;
  /// Set when a finite carrier was searched completely, so no bad prefix of
  /// the requested length exists at all.
  bool exhausted = false;
};

/// Bounded search for a bad prefix of the requested length. The search tree
/// consists of bad subsequences of the carrier enumeration: a prefix is
/// extended only by candidates later in enumeration order, so "omega,
/// target 2" correctly comes back NotFoundWithinBudget. Depth-first with
/// iterative deepening on the number of enumerated candidates, expanding
/// candidates in ascending code order; the budget counts node expansions
/// (prefixes pushed). Deterministic.
inline BadSearch find_bad_prefix(const QuasiOrder& o, std::size_t target_len,
                                 std::uint64_t budget) {
  if (target_len == 0)
    throw SpecError("find_bad_prefix: target_len must be >= 1");
  BadSearch result;
  std::vector<Code> cur;
  cur.reserve(target_len);

  // Lazily enumerated carrier, shared across deepening rounds.
  std::vector<Code> codes;
  bool carrier_done = false;
  auto ensure = [&](std::size_t count) {
    while (!carrier_done && codes.size() < count) {
      Code from = codes.empty() ? 0 : codes.back() + 1;
      if (!codes.empty() && codes.back() == UINT64_MAX) {
        carrier_done = true;
        break;
      }
      auto next = o.universe().first_from(from);
      if (!next) {
        carrier_done = true;
        break;
      }
      codes.push_back(*next);
    }
  };

  bool out_of_budget = false;
  // Returns true when a prefix of target length is complete.
  std::function<bool(std::size_t, std::size_t)> dfs =
      [&](std::size_t from_idx, std::size_t limit) -> bool {
    if (cur.size() == target_len) return true;
    for (std::size_t idx = from_idx; idx < limit && idx < codes.size();
         ++idx) {
      Code c = codes[idx];
      bool ok = true;
      for (Code prev : cur)
        if (o.leq_unchecked(prev, c)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      if (result.expansions >= budget) {
        out_of_budget = true;
        return false;
      }
      ++result.expansions;
      cur.push_back(c);
      if (dfs(idx + 1, limit)) return true;
      cur.pop_back();
      if (out_of_budget) return false;
    }
    return false;
  };

  for (std::size_t limit = 2;; limit *= 2) {
    ensure(limit);
    cur.clear();
    if (dfs(0, limit)) {
      result.prefix = BadPrefix::verified(o, cur);
      return result;
    }
    if (out_of_budget) return result;
    if (carrier_done && limit >= codes.size()) {
      // Complete search of a finite carrier: nothing of this length exists.
      result.exhausted = true;
      return result;
    }
  }
}

// ---------------------------------------------------------------------------
// Order construction

/// Recipe for build_order. Finite orders list le-edges whose
/// reflexive-transitive closure becomes the order; cycles in the edges
/// declare equivalences, which quasi-orders permit.
struct OrderSpec {
  enum class Kind { Finite, Omega, OmegaStar, Antichain, Rado, Sum, Product };

  Kind kind = Kind::Omega;
  Code elements = 0;                                   // Finite
  std::vector<std::pair<Code, Code>> le;               // Finite
  std::shared_ptr<OrderSpec> left, right;              // Sum, Product

  static OrderSpec finite(Code n, std::vector<std::pair<Code, Code>> edges) {
    OrderSpec s;
    s.kind = Kind::Finite;
    s.elements = n;
    s.le = std::move(edges);
    return s;
  }
  static OrderSpec omega() { return OrderSpec{}; }
  static OrderSpec omega_star() {
    OrderSpec s;
    s.kind = Kind::OmegaStar;
    return s;
  }
  static OrderSpec antichain() {
    OrderSpec s;
    s.kind = Kind::Antichain;
    return s;
  }
  static OrderSpec rado() {
    OrderSpec s;
    s.kind = Kind::Rado;
    return s;
  }
  static OrderSpec sum(OrderSpec l, OrderSpec r) {
    OrderSpec s;
    s.kind = Kind::Sum;
    s.left = std::make_shared<OrderSpec>(std::move(l));
    s.right = std::make_shared<OrderSpec>(std::move(r));
    return s;
  }
  static OrderSpec product(OrderSpec l, OrderSpec r) {
    OrderSpec s;
    s.kind = Kind::Product;
    s.left = std::make_shared<OrderSpec>(std::move(l));
    s.right = std::make_shared<OrderSpec>(std::move(r));
    return s;
  }
};

namespace detail {

/// n x n reachability closure with reflexivity.
inline std::vector<bool> transitive_closure(Code n,
                                            const std::vector<std::pair<Code, Code>>& le) {
  std::vector<bool> m(static_cast<std::size_t>(n) * n, false);
  auto at = [n](Code i, Code j) -> std::size_t {
    return static_cast<std::size_t>(i) * n + j;
  };
  for (Code i = 0; i < n; ++i) m[at(i, i)] = true;
  for (auto& [a, b] : le) {
    if (a >= n || b >= n)
      throw SpecError("finite order spec: edge endpoint out of range");
    m[at(a, b)] = true;
  }
  for (Code k = 0; k < n; ++k)
    for (Code i = 0; i < n; ++i)
      if (m[at(i, k)])
        for (Code j = 0; j < n; ++j)
          if (m[at(k, j)]) m[at(i, j)] = true;
  return m;
}

}  // namespace detail

/// Builds the quasi-order described by the spec. Pairs in sums and products
/// are encoded with the diagonal pairing: a sum element (x, side) as
/// pair_code(x, side) with side in {0,1}, a product element (q, r) as
/// pair_code(q, r). Rado's order lives on pairs (i, j) with i < j, encoded
/// pair_code(i, j), ordered by (i=k and j<=l) or j<k.
inline QuasiOrder build_order(const OrderSpec& spec) {
  using Kind = OrderSpec::Kind;
  switch (spec.kind) {
    case Kind::Finite: {
      Code n = spec.elements;
      auto closure = std::make_shared<std::vector<bool>>(
          detail::transitive_closure(n, spec.le));
      return QuasiOrder(
          "finite(" + std::to_string(n) + ")", Universe::finite(n),
          [closure, n](Code a, Code b) {
            return (*closure)[static_cast<std::size_t>(a) * n + b];
          });
    }
    case Kind::Omega:
      return QuasiOrder("omega", Universe::all(),
                        [](Code a, Code b) { return a <= b; });
    case Kind::OmegaStar:
      // Code n denotes the n-th element from the top.
      return QuasiOrder("omega_star", Universe::all(),
                        [](Code a, Code b) { return b <= a; });
    case Kind::Antichain:
      return QuasiOrder("antichain", Universe::all(),
                        [](Code a, Code b) { return a == b; });
    case Kind::Rado:
      return QuasiOrder(
          "rado",
          Universe::coded([](Code c) {
            auto [i, j] = unpair_code(c);
            return i < j;
          }),
          [](Code a, Code b) {
            auto [i, j] = unpair_code(a);
            auto [k, l] = unpair_code(b);
            return (i == k && j <= l) || j < k;
          });
    case Kind::Sum: {
      auto l = std::make_shared<QuasiOrder>(build_order(*spec.left));
      auto r = std::make_shared<QuasiOrder>(build_order(*spec.right));
      std::optional<Code> bound;
      if (l->universe().bound() && r->universe().bound()) {
        Code m = std::max(*l->universe().bound(), *r->universe().bound());
        bound = pair_code(m, 2);
      }
      return QuasiOrder(
          "sum(" + l->name() + "," + r->name() + ")",
          Universe::coded(
              [l, r](Code c) {
                auto [x, side] = unpair_code(c);
                if (side == 0) return l->contains(x);
                if (side == 1) return r->contains(x);
                return false;
              },
              bound),
          [l, r](Code a, Code b) {
            auto [x, i] = unpair_code(a);
            auto [y, j] = unpair_code(b);
            if (i != j) return false;  // cross-tag pairs are incomparable
            return i == 0 ? l->leq_unchecked(x, y) : r->leq_unchecked(x, y);
          });
    }
    case Kind::Product: {
      auto l = std::make_shared<QuasiOrder>(build_order(*spec.left));
      auto r = std::make_shared<QuasiOrder>(build_order(*spec.right));
      std::optional<Code> bound;
      if (l->universe().bound() && r->universe().bound())
        bound = pair_code(*l->universe().bound(), *r->universe().bound());
      return QuasiOrder(
          "product(" + l->name() + "," + r->name() + ")",
          Universe::coded(
              [l, r](Code c) {
                auto [x, y] = unpair_code(c);
                return l->contains(x) && r->contains(y);
              },
              bound),
          [l, r](Code a, Code b) {
            auto [x0, y0] = unpair_code(a);
            auto [x1, y1] = unpair_code(b);
            return l->leq_unchecked(x0, x1) && r->leq_unchecked(y0, y1);
          });
    }
  }
  throw SpecError("build_order: unknown kind");
}

}  // namespace wqo
