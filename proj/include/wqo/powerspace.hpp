#pragma once

#include <variant>

#include "wqo/powerset.hpp"

namespace wqo {

// ---------------------------------------------------------------------------
// The upper topology on the full (uncountable) power of a quasi-order

/// The second-countable space upper(P-flat(Q)) or upper(P-sharp(Q)): points
/// are symbolic subsets X of the base order, index codes are finite subsets
/// i of the base, and the point-in-basic-open predicate is
///   flat:  Psi(X, i) := i contained in X-down
///   sharp: Psi(X, i) := i disjoint from X-up.
/// The empty index codes the whole space; the union of two indices codes
/// the intersection of their opens.
struct PowerSpace {
  QuasiOrder base;
  PowerMode mode = PowerMode::Flat;

  std::string name() const {
    return std::string("upper(") + to_string(mode) + "_power(" + base.name() +
           "))";
  }
};

/// Decides Psi for the five symbolic shapes. The reductions are finite
/// scans over i plus closure queries on the generator set; the shape/mode
/// combinations whose closure questions are not decidable by such scans
/// (Up and CoDown under flat, Down and CoUp under sharp: they would need
/// common-bound searches in the base) are rejected as unsupported.
inline bool psi(const PowerSpace& space, const SymbolicSubset& x,
                const FinSubset& i) {
  using Shape = SymbolicSubset::Shape;
  const QuasiOrder& o = space.base;
  const FinSubset& gen = x.generators();
  for (Code q : i.elems()) o.require(q);

  auto all = [&](auto&& pred) {
    for (Code q : i.elems())
      if (!pred(q)) return false;
    return true;
  };

  if (space.mode == PowerMode::Flat) {
    switch (x.shape()) {
      case Shape::Fin:
      case Shape::Down:
        // q in X-down iff q below some generator.
        return all([&](Code q) {
          return closure_contains(o, Dir::Down, gen, q);
        });
      case Shape::CoUp:
        // X is downward closed, so X-down = X.
        return all([&](Code q) {
          return !closure_contains(o, Dir::Up, gen, q);
        });
      default:
        throw UnsupportedShapeError(
            "psi(flat): membership in the down-closure of this shape is not "
            "decidable by generator scans");
    }
  }
  switch (x.shape()) {
    case Shape::Fin:
    case Shape::Up:
      // q in X-up iff q above some generator.
      return all(
          [&](Code q) { return !closure_contains(o, Dir::Up, gen, q); });
    case Shape::CoDown:
      // X is upward closed, so X-up = X.
      return all(
          [&](Code q) { return closure_contains(o, Dir::Down, gen, q); });
    default:
      throw UnsupportedShapeError(
          "psi(sharp): membership in the up-closure of this shape is not "
          "decidable by generator scans");
  }
}

// ---------------------------------------------------------------------------
// Effectively closed sets

namespace detail {

inline std::vector<Code> decode_tuple(Code t, std::size_t n) {
  std::vector<Code> tup;
  tup.reserve(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto [head, rest] = unpair_code(t);
    tup.push_back(head);
    t = rest;
  }
  if (n > 0) tup.push_back(t);
  return tup;
}

inline std::optional<Code> encode_tuple(const std::vector<Code>& tup) {
  if (tup.empty()) return Code{0};
  Code acc = tup.back();
  try {
    for (std::size_t i = tup.size() - 1; i-- > 0;)
      acc = pair_code(tup[i], acc);
  } catch (const SpecError&) {
    return std::nullopt;
  }
  return acc;
}

}  // namespace detail

struct OutCertificate {
  std::optional<Code> stage;  // position in the index stream, when computed
  FinSubset index;            // re-verifies Psi(X, index)
};

/// Membership verdict for an effectively closed set. Out verdicts carry a
/// certificate; In verdicts are horizon-relative unless marked exact
/// (finitely presented codes, or the generator-list fast path).
struct ClosedVerdict {
  bool in = false;
  bool exact = false;
  Code horizon = 0;
  std::optional<OutCertificate> cert;
};

/// A staged enumerator h of finite sets of indices, coding the closed set
///   F_h = intersection over stages n, indices i in h(n) of
///         { X : not Psi(X, i) }.
/// Codes remember enough structure to decide membership exactly where
/// possible: a finite stage count, a generator list for flat basic closed
/// sets E-down-flat, or the list of intersected codes.
class ClosedCode {
 public:
  static ClosedCode from_stages(PowerSpace space,
                                std::function<std::vector<FinSubset>(Code)> h,
                                std::optional<Code> stage_count) {
    ClosedCode c(std::move(space));
    c.stages_ = std::move(h);
    c.stage_count_ = stage_count;
    return c;
  }

  static ClosedCode from_lists(PowerSpace space,
                               std::vector<std::vector<FinSubset>> lists) {
    auto shared =
        std::make_shared<std::vector<std::vector<FinSubset>>>(std::move(lists));
    ClosedCode c(std::move(space));
    c.stage_count_ = shared->size();
    c.stages_ = [shared](Code n) {
      return n < shared->size() ? (*shared)[n] : std::vector<FinSubset>{};
    };
    return c;
  }

  /// The whole space: h constantly empty.
  static ClosedCode whole(PowerSpace space) { return from_lists(space, {}); }

  /// The basic closed set complementing one basic open: a single stage with
  /// the single index. Under sharp this is {{q} : q in index}-down-sharp;
  /// under flat it is {Q minus (q-up) : q in index}-down-flat.
  static ClosedCode basic(PowerSpace space, FinSubset index) {
    return from_lists(std::move(space), {{std::move(index)}});
  }

  /// The flat basic closed set E-down-flat for a finite list of finite
  /// generators: the intersection, over all tuples (q_0..q_{n-1}) with q_i
  /// outside generator i's down-closure, of the basic closed sets coded by
  /// {q_0,...,q_{n-1}}. Stage t of the stream is the tuple with pair-fold
  /// code t, when it qualifies. Membership of finite and down-shaped points
  /// is decided exactly through the generator list.
  static ClosedCode flat_basic(PowerSpace space,
                               std::vector<FinSubset> generators) {
    if (space.mode != PowerMode::Flat)
      throw SpecError("flat_basic requires a flat power space");
    ClosedCode c(space);
    auto gens = std::make_shared<std::vector<FinSubset>>(generators);
    auto base = std::make_shared<QuasiOrder>(space.base);
    std::size_t n = gens->size();
    c.flat_generators_ = std::move(generators);
    c.stage_count_ = n == 0 ? std::optional<Code>{1} : std::nullopt;
    c.stages_ = [gens, base, n](Code t) -> std::vector<FinSubset> {
      if (n == 0)
        return t == 0 ? std::vector<FinSubset>{FinSubset{}}
                      : std::vector<FinSubset>{};
      std::vector<Code> tup = detail::decode_tuple(t, n);
      for (std::size_t i = 0; i < n; ++i) {
        if (!base->contains(tup[i])) return {};
        if (closure_contains(*base, Dir::Down, (*gens)[i], tup[i])) return {};
      }
      return {FinSubset(std::move(tup))};
    };
    return c;
  }

  /// Intersection of closed codes: the stage streams are merged positionwise
  /// and membership is the conjunction of the members'.
  static ClosedCode intersection(std::vector<ClosedCode> parts) {
    if (parts.empty()) throw SpecError("intersection of no closed codes");
    ClosedCode c(parts.front().space_);
    auto shared = std::make_shared<std::vector<ClosedCode>>(std::move(parts));
    bool all_counted = true;
    Code count = 0;
    for (const ClosedCode& p : *shared) {
      if (!p.stage_count_) {
        all_counted = false;
        break;
      }
      count = std::max(count, *p.stage_count_);
    }
    if (all_counted) c.stage_count_ = count;
    c.stages_ = [shared](Code t) {
      std::vector<FinSubset> merged;
      for (const ClosedCode& p : *shared) {
        std::vector<FinSubset> v = p.stages_(t);
        for (FinSubset& i : v) merged.push_back(std::move(i));
      }
      return merged;
    };
    c.parts_ = shared;
    return c;
  }

  const PowerSpace& space() const { return space_; }
  std::vector<FinSubset> stage(Code t) const { return stages_(t); }
  std::optional<Code> stage_count() const { return stage_count_; }
  const std::optional<std::vector<FinSubset>>& flat_generators() const {
    return flat_generators_;
  }

  /// Membership of the point X, scanning at most `horizon` stages of
  /// streamed codes. Exact paths: intersections of exact parts, generator
  /// lists against finite or down-shaped points, fully scanned finitely
  /// presented codes.
  ClosedVerdict member(const SymbolicSubset& x, Code horizon) const {
    using Shape = SymbolicSubset::Shape;
    if (parts_) {
      bool all_exact = true;
      for (const ClosedCode& p : *parts_) {
        ClosedVerdict v = p.member(x, horizon);
        if (!v.in) return v;
        all_exact = all_exact && v.exact;
      }
      return {true, all_exact, horizon, std::nullopt};
    }
    if (flat_generators_ &&
        (x.shape() == Shape::Fin || x.shape() == Shape::Down)) {
      const QuasiOrder& o = space_.base;
      for (const FinSubset& g : *flat_generators_)
        if (flat_leq(o, x.generators(), g))
          return {true, true, horizon, std::nullopt};
      // Excluded: build the separating tuple out of X's own generators.
      std::vector<Code> tup;
      for (const FinSubset& g : *flat_generators_) {
        std::optional<Code> pick;
        for (Code q : x.generators().elems())
          if (!closure_contains(o, Dir::Down, g, q)) {
            pick = q;
            break;
          }
        if (!pick)
          throw VerificationError(
              "flat_basic membership: exclusion without witness");
        tup.push_back(*pick);
      }
      OutCertificate cert{detail::encode_tuple(tup), FinSubset(tup)};
      return {false, true, horizon, cert};
    }
    bool exact = false;
    Code limit = horizon;
    if (stage_count_ && *stage_count_ <= horizon) {
      limit = *stage_count_;
      exact = true;
    }
    for (Code t = 0; t < limit; ++t)
      for (const FinSubset& i : stages_(t))
        if (psi(space_, x, i))
          return {false, true, horizon, OutCertificate{t, i}};
    return {true, exact, horizon, std::nullopt};
  }

 private:
  explicit ClosedCode(PowerSpace space) : space_(std::move(space)) {}

  PowerSpace space_;
  std::function<std::vector<FinSubset>(Code)> stages_;
  std::optional<Code> stage_count_;
  std::optional<std::vector<FinSubset>> flat_generators_;
  std::shared_ptr<std::vector<ClosedCode>> parts_;
};

inline ClosedVerdict closed_member(const ClosedCode& f,
                                   const SymbolicSubset& x, Code horizon) {
  return f.member(x, horizon);
}

// ---------------------------------------------------------------------------
// Closed sets from symbolic sets

/// The closed set {E}-down in the given mode, as an effectively closed
/// code:
///   sharp: the intersection over members e of E of the basic sets coded
///          {e} -- one member-index per stage, in ascending code order;
///   flat:  the intersection over base elements q outside E-down of the
///          basic sets coded {q} -- one qualifying element per stage.
/// Member/element searches scan base codes up to scan_bound; exhaustion of
/// a finite shape ends the stream.
inline ClosedCode closed_from_set(const PowerSpace& space,
                                  const SymbolicSubset& e, Code scan_bound) {
  using Shape = SymbolicSubset::Shape;
  auto base = std::make_shared<QuasiOrder>(space.base);
  auto sym = std::make_shared<SymbolicSubset>(e);
  Code bound = scan_bound;

  if (space.mode == PowerMode::Sharp) {
    std::optional<Code> count;
    if (e.shape() == Shape::Fin) count = e.generators().size();
    return ClosedCode::from_stages(
        space,
        [sym, bound](Code n) -> std::vector<FinSubset> {
          Code c = 0;
          for (Code k = 0;; ++k) {
            auto m = sym->first_member_from(c, bound + 1);
            if (!m || *m > bound) return {};
            if (k == n) return {FinSubset{*m}};
            c = *m + 1;
          }
        },
        count);
  }

  // Flat: need a decidable complement of E-down.
  std::function<bool(Code)> outside_down;
  const FinSubset gen = e.generators();
  switch (e.shape()) {
    case Shape::Fin:
    case Shape::Down:
      outside_down = [base, gen](Code q) {
        return !closure_contains(*base, Dir::Down, gen, q);
      };
      break;
    case Shape::CoUp:
      // E is downward closed: E-down = E.
      outside_down = [base, gen](Code q) {
        return closure_contains(*base, Dir::Up, gen, q);
      };
      break;
    default:
      throw UnsupportedShapeError(
          "closed_from_set(flat): the down-closure of this shape has no "
          "decidable complement");
  }
  return ClosedCode::from_stages(
      space,
      [base, outside_down, bound](Code n) -> std::vector<FinSubset> {
        Code c = 0;
        for (Code k = 0;; ++k) {
          std::optional<Code> q;
          while (true) {
            auto next = base->universe().first_from(c);
            if (!next || *next > bound) return {};
            if (outside_down(*next)) {
              q = *next;
              break;
            }
            c = *next + 1;
          }
          if (k == n) return {FinSubset{*q}};
          c = *q + 1;
        }
      },
      std::nullopt);
}

// ---------------------------------------------------------------------------
// Countable <-> uncountable translation

/// The countable-side basic closed set E-down-flat translated to the full
/// power space, exposed as an exact membership predicate on finite sets.
/// Exclusion is certified by a tuple of witnesses drawn from x itself: one
/// q_i in x outside generator i's down-closure, per generator.
class FlatTranslation {
 public:
  FlatTranslation(QuasiOrder base, std::vector<FinSubset> generators)
      : base_(std::move(base)), generators_(std::move(generators)) {}

  struct Result {
    bool member = false;
    std::vector<Code> tuple;  // separating tuple when not a member
  };

  Result membership(const FinSubset& x) const {
    std::vector<Code> tup;
    for (const FinSubset& g : generators_) {
      std::optional<Code> pick;
      for (Code q : x.elems())
        if (!closure_contains(base_, Dir::Down, g, q)) {
          pick = q;
          break;
        }
      if (!pick) return {true, {}};  // x within g's down-closure
      tup.push_back(*pick);
    }
    // Every generator rejected some element of x, so the tuple's basic
    // closed set separates x from the translated set.
    return {false, tup};
  }

  ClosedCode closed_code() const {
    return ClosedCode::flat_basic(PowerSpace{base_, PowerMode::Flat},
                                  generators_);
  }

  const std::vector<FinSubset>& generators() const { return generators_; }

 private:
  QuasiOrder base_;
  std::vector<FinSubset> generators_;
};

inline FlatTranslation translate_flat(const QuasiOrder& o,
                                      std::vector<FinSubset> generators) {
  return FlatTranslation(o, std::move(generators));
}

/// The countable-side basic closed set E-down-sharp translated to the full
/// power space: the finite intersection, over tuples from the product of
/// the generators, of the basic sharp-closed sets coded by the tuple's
/// elements. Exact, no horizons. Empty generators are rejected: the product
/// construction presumes nonempty factors.
inline ClosedCode translate_sharp(const QuasiOrder& o,
                                  std::vector<FinSubset> generators) {
  for (const FinSubset& g : generators)
    if (g.empty())
      throw SpecError("translate_sharp: empty generator");
  std::vector<std::vector<FinSubset>> stages;
  std::size_t n = generators.size();
  std::vector<std::size_t> radix(n, 0);
  while (true) {
    std::vector<Code> tup;
    for (std::size_t i = 0; i < n; ++i)
      tup.push_back(generators[i].elems()[radix[i]]);
    stages.push_back({FinSubset(std::move(tup))});
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++radix[i] < generators[i].size()) break;
      radix[i] = 0;
    }
    if (i == n) break;
  }
  return ClosedCode::from_lists(PowerSpace{o, PowerMode::Sharp},
                                std::move(stages));
}

// ---------------------------------------------------------------------------
// Chains of closed sets vs bad sequences

/// Badness of a sequence of finite subsets under the flat or sharp order.
inline bool is_bad_subset_sequence(const QuasiOrder& o, PowerMode mode,
                                   std::span<const FinSubset> seq) {
  for (std::size_t m = 0; m < seq.size(); ++m)
    for (std::size_t n = m + 1; n < seq.size(); ++n) {
      bool le = mode == PowerMode::Flat ? flat_leq(o, seq[m], seq[n])
                                        : sharp_leq(o, seq[m], seq[n]);
      if (le) return false;
    }
  return true;
}

/// Graded enumeration of finite subsets of a carrier: candidates are drawn
/// from the first `pool` enumerated elements, ordered by size and then by
/// combination, so small witnesses come first.
class SubsetEnumerator {
 public:
  explicit SubsetEnumerator(const Universe& u, std::size_t pool = 64) {
    Code c = 0;
    while (table_.size() < pool) {
      auto n = u.first_from(c);
      if (!n) break;
      table_.push_back(*n);
      if (*n == UINT64_MAX) break;
      c = *n + 1;
    }
  }

  const std::vector<Code>& pool() const { return table_; }

  FinSubset from_bits(Code bits) const {
    std::vector<Code> v;
    for (std::size_t b = 0; b < table_.size(); ++b)
      if (bits & (Code{1} << b)) v.push_back(table_[b]);
    return FinSubset(std::move(v));
  }

  /// Visits subsets in graded order (nonempty, size <= max_size, at most
  /// `limit` candidates). The visitor returns true to stop; returns whether
  /// it stopped.
  template <class F>
  bool for_each_graded(Code max_size, std::uint64_t limit, F&& visit) const {
    std::uint64_t seen = 0;
    std::size_t n = table_.size();
    for (Code size = 1; size <= max_size && size <= n; ++size) {
      Code bits = (Code{1} << size) - 1;
      while (true) {
        if (seen++ >= limit) return false;
        if (visit(from_bits(bits))) return true;
        // Gosper's hack: next mask with the same popcount.
        Code c = bits & (~bits + 1);
        Code r = bits + c;
        Code next = (((r ^ bits) >> 2) / c) | r;
        if (n >= 64) {
          if (next < bits) break;
        } else if (next >= (Code{1} << n)) {
          break;
        }
        bits = next;
      }
    }
    return false;
  }

 private:
  std::vector<Code> table_;
};

/// A descending chain of closed codes with designated per-step separators:
/// separators[n] lies in F_n but not in F_{n+1}.
struct ChainWithSeparators {
  PowerSpace space;
  std::vector<ClosedCode> chain;
  std::vector<FinSubset> separators;
};

/// Builds the canonical non-stabilizing descending chain from a bad
/// sequence, with its designated separators:
///   flat:  F_n = the intersection over i <= n of the basic closed sets
///          coded {q_i}; separator {q_{n+1}};
///   sharp: H_n = {q_i : i <= n}-down-sharp; separator {q_0,...,q_n}.
/// Every separator is verified by closed_member: In at its own step, Out at
/// the next.
inline ChainWithSeparators chain_from_bad(const QuasiOrder& o, PowerMode mode,
                                          const BadPrefix& bad) {
  if (bad.size() < 2)
    throw SpecError("chain_from_bad: need a bad prefix of length >= 2");
  PowerSpace space{o, mode};
  ChainWithSeparators out{space, {}, {}};
  const std::vector<Code>& q = bad.seq();

  for (std::size_t n = 0; n < q.size(); ++n) {
    if (mode == PowerMode::Flat) {
      std::vector<std::vector<FinSubset>> lists;
      for (std::size_t i = 0; i <= n; ++i)
        lists.push_back({FinSubset{q[i]}});
      out.chain.push_back(ClosedCode::from_lists(space, std::move(lists)));
    } else {
      std::vector<Code> prefix(q.begin(), q.begin() + n + 1);
      out.chain.push_back(translate_sharp(o, {FinSubset(std::move(prefix))}));
    }
  }
  for (std::size_t n = 0; n + 1 < q.size(); ++n) {
    FinSubset sep = mode == PowerMode::Flat
                        ? FinSubset{q[n + 1]}
                        : FinSubset(std::vector<Code>(q.begin(),
                                                      q.begin() + n + 1));
    SymbolicSubset pt = SymbolicSubset::fin(sep, o);
    Code horizon = out.chain[n + 1].stage_count().value_or(64) + 1;
    ClosedVerdict vin = out.chain[n].member(pt, horizon);
    ClosedVerdict vout = out.chain[n + 1].member(pt, horizon);
    if (!vin.in || !vin.exact || vout.in)
      throw VerificationError(
          "chain_from_bad: separator failed its strictness checks at step " +
          std::to_string(n));
    out.separators.push_back(std::move(sep));
  }
  return out;
}

/// If A is outside the flat closed set F with certificate index i, every
/// q in i has a member of A above it; their union is a finite subset of A
/// that is itself outside F. StillIn (empty witness) is horizon-relative.
struct FiniteWitness {
  std::optional<FinSubset> witness;
  Code horizon = 0;
};

inline FiniteWitness finite_witness_flat(const ClosedCode& f,
                                         const SymbolicSubset& a, Code horizon,
                                         std::uint64_t scan_budget) {
  if (f.space().mode != PowerMode::Flat)
    throw SpecError("finite_witness_flat: flat closed codes only");
  ClosedVerdict v = f.member(a, horizon);
  if (v.in) return {std::nullopt, horizon};
  const QuasiOrder& o = f.space().base;
  FinSubset acc;
  for (Code q : v.cert->index.elems()) {
    std::optional<Code> pick;
    Code c = 0;
    for (std::uint64_t used = 0; used < scan_budget; ++used) {
      auto m = a.first_member_from(c, scan_budget);
      if (!m) break;
      if (o.leq(q, *m)) {
        pick = *m;
        break;
      }
      if (*m == UINT64_MAX) break;
      c = *m + 1;
    }
    if (!pick)
      throw VerificationError(
          "finite_witness_flat: certificate element with no dominating "
          "member of A in scan range (contradicts the Out certificate)");
    acc = acc.with(*pick);
  }
  if (!psi(f.space(), SymbolicSubset::fin(acc, o), v.cert->index))
    throw VerificationError("finite_witness_flat: witness fails to re-verify");
  return {acc, horizon};
}

struct ChainSearchOptions {
  Code max_subset_size = 3;
  std::uint64_t candidate_limit = 4096;
  Code membership_horizon = 256;
  Code lookahead = 8;                  // sharp: window of chain positions
  std::uint64_t growth_candidate_limit = 512;
  std::size_t subset_pool = 64;
  std::uint64_t witness_scan_budget = 4096;
  /// Flat mode: optional per-position symbolic points known to lie in
  /// F_pos minus F_pos+1 (e.g. the designated separators of a constructed
  /// chain); the claim-based finite-witness extraction then replaces the
  /// blind subset search at those positions.
  std::vector<SymbolicSubset> hints;
};

struct ChainBadResult {
  enum class Status { Found, NotFoundWithinBudget, LookaheadInconclusive };
  Status status = Status::NotFoundWithinBudget;
  std::vector<FinSubset> subset_bad;   // flat mode: bad in the power order
  std::vector<Code> element_bad;       // sharp mode: bad in the base order
  std::vector<Code> stuck_candidates;  // sharp: candidates that never grew
  std::uint64_t expansions = 0;
};

/// Extracts a bad sequence from a descending chain of effectively closed
/// sets (caller guarantees descent, e.g. via running intersections).
///
/// Flat mode replays the finite-subset argument: pick positions m_0 < m_1 <
/// ... and finite sets a_k in F_{m_k} minus F_{m_k+1}; the chain's downward
/// closure under the flat order makes the a_k a bad sequence in the finite
/// power. Witnesses come from the per-position hints via the certificate
/// construction when available, and from a graded subset search otherwise.
///
/// Sharp mode replays the element argument: from a finite set in the
/// difference, the Out certificate supplies candidates r_j incomparable
/// with everything chosen so far; the candidate whose restricted chain
/// still grows within the lookahead window extends the sequence. True
/// stabilization is undecidable, so a window with no growing candidate is
/// reported as LookaheadInconclusive rather than guessed.
inline ChainBadResult bad_from_chain(const PowerSpace& space,
                                     const std::vector<ClosedCode>& chain,
                                     std::size_t len, std::uint64_t budget,
                                     const ChainSearchOptions& opts = {}) {
  ChainBadResult result;
  const QuasiOrder& o = space.base;
  SubsetEnumerator subsets(o.universe(), opts.subset_pool);
  Code horizon = opts.membership_horizon;

  if (space.mode == PowerMode::Flat) {
    std::size_t pos = 0;
    while (result.subset_bad.size() < len) {
      bool advanced = false;
      for (; pos + 1 < chain.size() && !advanced; ++pos) {
        // Hint path: claim-based extraction from a known witness point.
        if (pos < opts.hints.size()) {
          const SymbolicSubset& a = opts.hints[pos];
          ClosedVerdict vin = chain[pos].member(a, horizon);
          ClosedVerdict vout = chain[pos + 1].member(a, horizon);
          if (vin.in && !vout.in) {
            FiniteWitness w = finite_witness_flat(chain[pos + 1], a, horizon,
                                                  opts.witness_scan_budget);
            if (w.witness &&
                chain[pos]
                    .member(SymbolicSubset::fin(*w.witness, o), horizon)
                    .in) {
              result.subset_bad.push_back(*w.witness);
              advanced = true;
              break;
            }
          }
        }
        bool stop = subsets.for_each_graded(
            opts.max_subset_size, opts.candidate_limit,
            [&](const FinSubset& cand) {
              if (result.expansions++ >= budget) return true;
              SymbolicSubset pt = SymbolicSubset::fin(cand, o);
              if (chain[pos].member(pt, horizon).in &&
                  !chain[pos + 1].member(pt, horizon).in) {
                result.subset_bad.push_back(cand);
                advanced = true;
                return true;
              }
              return false;
            });
        if (result.expansions >= budget && !advanced) return result;
        if (stop && advanced) break;
      }
      if (!advanced) return result;
      ++pos;
    }
    if (!is_bad_subset_sequence(o, PowerMode::Flat, result.subset_bad))
      throw VerificationError(
          "bad_from_chain(flat): extracted sequence fails badness "
          "(chain was not descending?)");
    result.status = ChainBadResult::Status::Found;
    return result;
  }

  // Sharp mode.
  std::vector<Code> chosen;
  auto restricted = [&](std::size_t position,
                        std::optional<Code> extra = std::nullopt) {
    std::vector<ClosedCode> parts{chain[position]};
    for (Code qc : chosen)
      parts.push_back(ClosedCode::basic(space, FinSubset{qc}));
    if (extra) parts.push_back(ClosedCode::basic(space, FinSubset{*extra}));
    return ClosedCode::intersection(std::move(parts));
  };
  // The canonical covering candidate at a position: the union of every
  // index element the position's code shows within the horizon, plus the
  // restrictions. For finitely presented sharp codes this is the natural
  // "everything demanded so far" set.
  auto canonical = [&](std::size_t position,
                       std::optional<Code> extra) -> FinSubset {
    const ClosedCode& c = chain[position];
    Code limit = c.stage_count().value_or(horizon);
    FinSubset acc;
    for (Code t = 0; t < limit; ++t)
      for (const FinSubset& i : c.stage(t)) acc = acc.union_with(i);
    for (Code qc : chosen) acc = acc.with(qc);
    if (extra) acc = acc.with(*extra);
    return acc;
  };

  std::size_t pos = 0;
  while (chosen.size() < len) {
    bool advanced = false;
    for (; pos + 1 < chain.size() && !advanced; ++pos) {
      ClosedCode cur = restricted(pos);
      ClosedCode next = restricted(pos + 1);
      std::optional<FinSubset> found;
      std::optional<OutCertificate> cert;
      auto try_candidate = [&](const FinSubset& cand) {
        if (result.expansions++ >= budget) return true;
        SymbolicSubset pt = SymbolicSubset::fin(cand, o);
        if (!cur.member(pt, horizon).in) return false;
        ClosedVerdict vout = next.member(pt, horizon);
        if (vout.in) return false;
        found = cand;
        cert = vout.cert;
        return true;
      };
      try_candidate(canonical(pos, std::nullopt));
      if (!found)
        subsets.for_each_graded(opts.max_subset_size, opts.candidate_limit,
                                try_candidate);
      if (result.expansions >= budget && !found) return result;
      if (!found) continue;

      // Candidates from the separating index; keep the one whose restricted
      // chain still grows within the lookahead window.
      std::optional<Code> pick;
      for (Code r : cert->index.elems()) {
        bool grows = false;
        for (Code w = 0; w < opts.lookahead && !grows; ++w) {
          std::size_t p = pos + 1 + w;
          if (p + 1 >= chain.size()) break;
          ClosedCode gp = restricted(p, r);
          ClosedCode gnext = restricted(p + 1, r);
          auto probe = [&](const FinSubset& cand) {
            SymbolicSubset pt = SymbolicSubset::fin(cand, o);
            if (gp.member(pt, horizon).in && !gnext.member(pt, horizon).in) {
              grows = true;
              return true;
            }
            return false;
          };
          probe(canonical(p, r));
          if (!grows)
            subsets.for_each_graded(opts.max_subset_size,
                                    opts.growth_candidate_limit, probe);
        }
        if (grows) {
          pick = r;
          break;
        }
      }
      if (!pick) {
        result.status = ChainBadResult::Status::LookaheadInconclusive;
        for (Code r : cert->index.elems()) result.stuck_candidates.push_back(r);
        return result;
      }
      chosen.push_back(*pick);
      advanced = true;
    }
    if (!advanced) return result;
  }
  if (!is_bad_prefix(o, chosen))
    throw VerificationError(
        "bad_from_chain(sharp): extracted sequence fails badness");
  result.element_bad = std::move(chosen);
  result.status = ChainBadResult::Status::Found;
  return result;
}

}  // namespace wqo
