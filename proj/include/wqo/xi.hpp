#pragma once

#include <map>
#include <memory>

#include "wqo/order.hpp"
#include "wqo/true_stages.hpp"

namespace wqo {

// ---------------------------------------------------------------------------
// Finite partial orders with a designated point

/// A finite partial order on codes 0..n-1 with a designated element x,
/// the seed of the Xi construction. Antisymmetry is enforced: quasi-order
/// equivalence cycles are rejected here.
class PosetWithPoint {
 public:
  PosetWithPoint(Code n, std::vector<std::pair<Code, Code>> le, Code x)
      : n_(n), x_(x), leq_(detail::transitive_closure(n, le)) {
    if (x >= n) throw SpecError("poset point out of range");
    for (Code a = 0; a < n; ++a)
      for (Code b = a + 1; b < n; ++b)
        if (leq_[a * n + b] && leq_[b * n + a])
          throw SpecError("poset spec: antisymmetry violated");
  }

  /// The one-point poset ({x}, x).
  static PosetWithPoint point() { return PosetWithPoint(1, {}, 0); }

  Code size() const { return n_; }
  Code x() const { return x_; }
  bool leq(Code a, Code b) const { return leq_[a * n_ + b]; }

 private:
  Code n_;
  Code x_;
  std::vector<bool> leq_;
};

/// An element (n, p) of Xi: the copy index n and the point p of P.
struct XiElement {
  Code stage = 0;
  Code point = 0;

  Code code() const { return pair_code(stage, point); }
  static XiElement decode(Code c) {
    auto [n, p] = unpair_code(c);
    return {n, p};
  }
  friend bool operator==(const XiElement&, const XiElement&) = default;
};

/// Where copy P_{s+1} was placed: immediately above the anchor x_{n0} when
/// some stage lost truth (case i), immediately below x_s otherwise (case
/// ii). records[s] describes the placement of copy s+1.
struct AnchorRecord {
  enum class Dir { Above, Below };
  Code anchor_stage = 0;
  Dir dir = Dir::Below;
};

struct AnchorLog {
  std::vector<AnchorRecord> records;
  const AnchorRecord& for_copy(Code s) const {
    if (s == 0 || s > records.size())
      throw NeedsMoreStagesError("anchor log has no record for this stage");
    return records[s - 1];
  }
};

// ---------------------------------------------------------------------------
// The Xi order

/// The partial order Xi_f(P, x): disjoint copies P_n of P, copy P_{s+1}
/// placed immediately above or below a designated point of an earlier copy
/// according to the true-stage dynamics of f. Comparisons are answered
/// through the anchor log: an element of a later copy relates to anything
/// earlier exactly as the placement clauses mandate, so queries resolve by
/// recursion through anchors without materializing the relation. Resolved
/// cross-copy comparisons are memoized.
class XiOrder {
 public:
  XiOrder(Injection f, PosetWithPoint p, Code stages)
      : f_(std::move(f)), p_(std::move(p)), stage_bound_(stages) {
    if (stages == 0) throw SpecError("XiOrder: need at least one stage");
    for (Code s = 1; s < stages; ++s) {
      TrueSet prev = true_set_at(f_, s - 1);
      TrueSet cur = true_set_at(f_, s);
      FinSubset grown = prev.members.with(s - 1);
      FinSubset lost = grown.minus(cur.members);
      if (!lost.empty())
        log_.records.push_back(
            {lost.elems().front(), AnchorRecord::Dir::Above});
      else
        log_.records.push_back({s - 1, AnchorRecord::Dir::Below});
    }
  }

  const Injection& injection() const { return f_; }
  const PosetWithPoint& poset() const { return p_; }
  Code stage_bound() const { return stage_bound_; }
  const AnchorLog& anchors() const { return log_; }

  bool leq(XiElement a, XiElement b) const {
    check(a);
    check(b);
    if (a.stage == b.stage) return p_.leq(a.point, b.point);
    if (a.stage < b.stage) return cross(a, b.stage) == Cross::Below;
    return cross(b, a.stage) == Cross::Above;
  }

  bool leq_codes(Code a, Code b) const {
    return leq(XiElement::decode(a), XiElement::decode(b));
  }

  /// Facade for the generic machinery: the stage-bounded carrier of pair
  /// codes (n, p) with n below the stage bound.
  QuasiOrder as_quasi_order() const {
    auto self = std::make_shared<XiOrder>(*this);
    Code bound = pair_code(stage_bound_ - 1, p_.size() - 1) + 1;
    return QuasiOrder(
        "xi(stages=" + std::to_string(stage_bound_) + ")",
        Universe::coded(
            [self](Code c) {
              auto [n, p] = unpair_code(c);
              return n < self->stage_bound_ && p < self->p_.size();
            },
            bound),
        [self](Code a, Code b) { return self->leq_codes(a, b); });
  }

 private:
  // How an element of an earlier copy sits relative to the whole later
  // copy: below all of it, above all of it, or incomparable with all of it.
  // The placement clauses make this uniform across the later copy.
  enum class Cross { Below, Above, Incomparable };

  void check(XiElement e) const {
    if (e.stage >= stage_bound_)
      throw NeedsMoreStagesError(
          "xi: stage " + std::to_string(e.stage) +
          " is beyond the bound " + std::to_string(stage_bound_) +
          "; rebuild with more stages");
    if (e.point >= p_.size()) throw CarrierError("xi: point out of range");
  }

  // Relation of earlier element a to every element of copy b (a.stage < b).
  Cross cross(XiElement a, Code b) const {
    auto key = std::tuple{a.stage, a.point, b};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const AnchorRecord& rec = log_.for_copy(b);
    Code m = rec.anchor_stage;
    Code xp = p_.x();

    // Classify a against the anchor point (m, x): Lt / Eq / Gt / None.
    enum class Cmp { Lt, Eq, Gt, None } c;
    if (m == a.stage) {
      bool le = p_.leq(a.point, xp);
      bool ge = p_.leq(xp, a.point);
      c = le && ge ? Cmp::Eq : le ? Cmp::Lt : ge ? Cmp::Gt : Cmp::None;
    } else if (m > a.stage) {
      switch (cross(a, m)) {
        case Cross::Below: c = Cmp::Lt; break;
        case Cross::Above: c = Cmp::Gt; break;
        default: c = Cmp::None; break;
      }
    } else {
      switch (cross({m, xp}, a.stage)) {
        case Cross::Below: c = Cmp::Gt; break;  // anchor below a
        case Cross::Above: c = Cmp::Lt; break;
        default: c = Cmp::None; break;
      }
    }

    Cross r;
    if (rec.dir == AnchorRecord::Dir::Above) {
      // Copy b sits immediately above the anchor: everything <= the anchor
      // goes below the copy, everything strictly above goes above.
      r = (c == Cmp::Lt || c == Cmp::Eq) ? Cross::Below
          : c == Cmp::Gt                 ? Cross::Above
                                         : Cross::Incomparable;
    } else {
      // Copy b sits immediately below the anchor: everything >= the anchor
      // goes above the copy, everything strictly below goes below.
      r = (c == Cmp::Gt || c == Cmp::Eq) ? Cross::Above
          : c == Cmp::Lt                 ? Cross::Below
                                         : Cross::Incomparable;
    }
    memo_.emplace(key, r);
    return r;
  }

  Injection f_;
  PosetWithPoint p_;
  Code stage_bound_;
  AnchorLog log_;
  mutable std::map<std::tuple<Code, Code, Code>, Cross> memo_;
};

inline XiOrder xi_order(const Injection& f, const PosetWithPoint& p,
                        Code stages) {
  return XiOrder(f, p, stages);
}

// ---------------------------------------------------------------------------
// Naive replay oracle

/// Materializes the relation by replaying the stage construction literally,
/// one table row per element. Serves as the independent oracle for the
/// anchor-based fast path.
class XiTable {
 public:
  XiTable(const Injection& f, const PosetWithPoint& p, Code stages)
      : psize_(p.size()), stages_(stages) {
    std::size_t total = static_cast<std::size_t>(stages) * psize_;
    m_.assign(total * total, false);
    for (Code a = 0; a < psize_; ++a)
      for (Code b = 0; b < psize_; ++b)
        if (p.leq(a, b)) set(0, a, 0, b);

    for (Code s = 1; s < stages; ++s) {
      TrueSet prev = true_set_at(f, s - 1);
      TrueSet cur = true_set_at(f, s);
      FinSubset grown = prev.members.with(s - 1);
      FinSubset lost = grown.minus(cur.members);

      Code anchor_stage;
      bool above;
      if (!lost.empty()) {
        anchor_stage = lost.elems().front();
        above = true;
      } else {
        anchor_stage = s - 1;
        above = false;
      }
      Code ax = p.x();

      for (Code n = 0; n < s; ++n) {
        for (Code q = 0; q < psize_; ++q) {
          bool y_le_a = get(n, q, anchor_stage, ax);
          bool a_le_y = get(anchor_stage, ax, n, q);
          bool y_below_copy, y_above_copy;
          if (above) {
            y_below_copy = y_le_a;              // y <= anchor
            y_above_copy = a_le_y && !y_le_a;   // y > anchor
          } else {
            y_below_copy = y_le_a && !a_le_y;   // y < anchor
            y_above_copy = a_le_y;              // y >= anchor
          }
          for (Code z = 0; z < psize_; ++z) {
            if (y_below_copy) set(n, q, s, z);
            if (y_above_copy) set(s, z, n, q);
          }
        }
      }
      for (Code a = 0; a < psize_; ++a)
        for (Code b = 0; b < psize_; ++b)
          if (p.leq(a, b)) set(s, a, s, b);
    }
  }

  bool leq(XiElement a, XiElement b) const {
    if (a.stage >= stages_ || b.stage >= stages_)
      throw NeedsMoreStagesError("xi table: stage beyond bound");
    return get(a.stage, a.point, b.stage, b.point);
  }

  Code stage_bound() const { return stages_; }
  Code poset_size() const { return psize_; }

 private:
  std::size_t idx(Code n, Code p) const {
    return static_cast<std::size_t>(n) * psize_ + p;
  }
  void set(Code n1, Code p1, Code n2, Code p2) {
    m_[idx(n1, p1) * (static_cast<std::size_t>(stages_) * psize_) +
       idx(n2, p2)] = true;
  }
  bool get(Code n1, Code p1, Code n2, Code p2) const {
    return m_[idx(n1, p1) * (static_cast<std::size_t>(stages_) * psize_) +
              idx(n2, p2)];
  }

  Code psize_;
  Code stages_;
  std::vector<bool> m_;
};

/// Stage-by-stage replay of the definition; the oracle for XiOrder's fast
/// path.
inline bool xi_leq_naive(const Injection& f, const PosetWithPoint& p,
                         XiElement a, XiElement b) {
  Code stages = std::max(a.stage, b.stage) + 1;
  return XiTable(f, p, stages).leq(a, b);
}

// ---------------------------------------------------------------------------
// Structural checks and decoding

/// Checks both placement implications for a pair n < m:
///   n in T_m  =>  P_m <= x_n, and incomparables of x_n within P_n stay
///                 incomparable with P_m;
///   n not in T_m  =>  x_n <= P_m.
inline bool lemma_placement_check(const XiOrder& xi, Code n, Code m) {
  if (n >= m) throw SpecError("lemma_placement_check requires n < m");
  const PosetWithPoint& p = xi.poset();
  Code xp = p.x();
  bool n_true_at_m = true_at(xi.injection(), n, m);
  if (n_true_at_m) {
    for (Code z = 0; z < p.size(); ++z)
      if (!xi.leq({m, z}, {n, xp})) return false;
    for (Code y = 0; y < p.size(); ++y) {
      bool incomp_xn = !p.leq(xp, y) && !p.leq(y, xp);
      if (!incomp_xn) continue;
      for (Code z = 0; z < p.size(); ++z)
        if (xi.leq({m, z}, {n, y}) || xi.leq({n, y}, {m, z})) return false;
    }
  } else {
    for (Code z = 0; z < p.size(); ++z)
      if (!xi.leq({n, xp}, {m, z})) return false;
  }
  return true;
}

enum class DecodeVerdict { True, False, InsufficientPrefix };

/// Reads off the truth of stage n from a bad prefix over Xi via the
/// Sigma-0-1 criterion "some q_i <= x_n". A witness certifies truth only
/// when it agrees with the exact classification; a finite prefix containing
/// spurious witnesses (possible when the prefix touches non-true copies) is
/// reported as insufficient rather than contradicting the oracle.
inline DecodeVerdict decode_from_bad(const XiOrder& xi, const BadPrefix& bad,
                                     Code n, std::size_t prefix_len) {
  const auto& seq = bad.seq();
  prefix_len = std::min(prefix_len, seq.size());
  XiElement xn{n, xi.poset().x()};
  bool witness = false;
  for (std::size_t i = 0; i < prefix_len && !witness; ++i)
    witness = xi.leq(XiElement::decode(seq[i]), xn);
  bool truly = is_true_exact(xi.injection(), n);
  if (witness && truly) return DecodeVerdict::True;
  if (!witness && !truly) return DecodeVerdict::False;
  return DecodeVerdict::InsufficientPrefix;
}

/// Classification of x_n within W = Xi_f({x}, x): the omega part (finitely
/// many predecessors) consists exactly of the non-true stages. For a
/// non-true n the verdict carries the least refuting k; otherwise x_n lies
/// in the omega-star part, exactly.
struct OmegaPartResult {
  bool omega_part = false;
  Code witness = 0;  // least k > n with f(k) < f(n), when omega_part
};

inline OmegaPartResult omega_certificate(const Injection& f, Code n) {
  TruthVerdict v = is_true_upto(f, n, std::max(n, Code{f.table().size()}));
  if (!v.is_true) return {true, v.witness_or_horizon};
  return {false, 0};
}

}  // namespace wqo
