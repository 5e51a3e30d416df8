#pragma once

#include "wqo/powerspace.hpp"
#include "wqo/xi.hpp"

namespace wqo {

namespace detail {

inline void remove_value(std::vector<FinSubset>& v, const FinSubset& x) {
  std::erase(v, x);
}

inline bool contains_value(const std::vector<FinSubset>& v,
                           const FinSubset& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace detail

/// One step of a reversal chain: which recursion case fired, the anchor
/// stage for case (i), the designated separator and its two membership
/// checks (inside the current closed set, outside the next one).
struct SeparatorStep {
  Code s = 0;
  bool case_i = false;
  std::optional<Code> n0;
  FinSubset witness;
};

// ---------------------------------------------------------------------------
// The flat reversal chain

/// Per-stage data of the flat construction over Xi_f(P, x) with the fixed
/// three-element poset P = {x, y, z}, x < z, y incomparable to both:
///   a_s = {x_s, y_s} with the y_n for n in T_s,
///   b_s = {z_s} with the y_n for n in T_s,
///   E_s = {a_s, b_s} with the b_n for n in T_s,
/// and F_s = E_s-down-flat is the stage-s basic closed set.
struct FlatStage {
  Code s = 0;
  FinSubset a, b;
  std::vector<FinSubset> e;
};

class FlatReversal {
 public:
  static PosetWithPoint poset() { return PosetWithPoint(3, {{0, 2}}, 0); }
  static Code xcode(Code n) { return pair_code(n, 0); }
  static Code ycode(Code n) { return pair_code(n, 1); }
  static Code zcode(Code n) { return pair_code(n, 2); }

  /// Prepares stages 0..stage_budget-1; the underlying Xi order is built
  /// one stage deeper so that every separator check has its elements.
  FlatReversal(const Injection& f, Code stage_budget)
      : f_(f),
        xi_(f, poset(), stage_budget + 1),
        order_(xi_.as_quasi_order()) {
    std::vector<FinSubset> bs;  // b_n per stage
    for (Code s = 0; s <= stage_budget; ++s) {
      TrueSet t = true_set_at(f_, s);
      std::vector<Code> ys;
      for (Code n : t.members.elems()) ys.push_back(ycode(n));
      FinSubset a = FinSubset(ys).with(xcode(s)).with(ycode(s));
      FinSubset b = FinSubset(ys).with(zcode(s));
      std::vector<FinSubset> e{a, b};
      for (Code n : t.members.elems()) e.push_back(bs[n]);
      bs.push_back(b);
      stages_.push_back(FlatStage{s, std::move(a), std::move(b), std::move(e)});
    }
  }

  const Injection& injection() const { return f_; }
  const XiOrder& xi() const { return xi_; }
  const QuasiOrder& order() const { return order_; }
  Code stage_budget() const { return stages_.size() - 1; }

  const FlatStage& stage(Code s) const {
    if (s >= stages_.size())
      throw NeedsMoreStagesError("flat reversal: stage beyond budget");
    return stages_[s];
  }

  PowerSpace power_space() const { return {order_, PowerMode::Flat}; }

  /// F_s as an effectively closed code of the full power space.
  ClosedCode closed_code(Code s) const {
    return ClosedCode::flat_basic(power_space(), stage(s).e);
  }

  std::vector<ClosedCode> chain(Code steps) const {
    std::vector<ClosedCode> out;
    for (Code s = 0; s < steps; ++s) out.push_back(closed_code(s));
    return out;
  }

  bool in_flat_closure(const FinSubset& w, const std::vector<FinSubset>& e) const {
    for (const FinSubset& g : e)
      if (flat_leq(order_, w, g)) return true;
    return false;
  }

  /// The designated separator for step s: b_{n0} when stage s+1 lost a true
  /// stage (case i), a_s otherwise (case ii). Verifies membership in F_s
  /// and exclusion from F_{s+1} by generator domination; failure of either
  /// check is a construction bug and throws.
  SeparatorStep separator(Code s) const {
    const FlatStage& cur = stage(s);
    const FlatStage& next = stage(s + 1);
    TrueSet ts = true_set_at(f_, s);
    TrueSet tnext = true_set_at(f_, s + 1);
    FinSubset lost = ts.members.with(s).minus(tnext.members);

    SeparatorStep step;
    step.s = s;
    if (!lost.empty()) {
      step.case_i = true;
      step.n0 = lost.elems().front();
      step.witness = *step.n0 == s ? cur.b : stages_[*step.n0].b;
    } else {
      step.case_i = false;
      step.witness = cur.a;
    }
    if (!in_flat_closure(step.witness, cur.e))
      throw VerificationError("flat reversal: separator not in F_s");
    if (in_flat_closure(step.witness, next.e))
      throw VerificationError("flat reversal: separator not excluded from F_{s+1}");
    return step;
  }

 private:
  Injection f_;
  XiOrder xi_;
  QuasiOrder order_;
  std::vector<FlatStage> stages_;
};

// ---------------------------------------------------------------------------
// The sharp reversal chain

/// Per-stage data of the sharp construction over Xi_f(P, x) with the fixed
/// two-element antichain P = {x, y}. The sets evolve by the recursion
///   case (i):  a_{s+1} = b_{n0} + {x_{s+1}},   b_{s+1} = b_{n0} + {y_{s+1}},
///              E_{s+1} = (E_{n0} - {a_{n0}, b_{n0}}) + {a_{s+1}, b_{s+1}}
///   case (ii): a_{s+1} = (a_s - {x_s}) + {x_{s+1}},
///              b_{s+1} = (b_s - {y_s}) + {y_{s+1}},
///              E_{s+1} = (E_s - {a_s}) + {a_{s+1}, b_{s+1}}
/// and F_s is the running intersection of the E_t-down-sharp for t <= s.
struct SharpStage {
  Code s = 0;
  FinSubset a, b;
  std::vector<FinSubset> e;
};

struct SharpClaims {
  bool antichain = false;    // the union of E_s is an antichain in Xi
  bool avoidance = false;    // a_s and b_s escape the rest of E_s sharply
  bool persistence = false;  // a_s and b_s lie in every earlier E_i-down-sharp
  bool all() const { return antichain && avoidance && persistence; }
};

class SharpReversal {
 public:
  static PosetWithPoint poset() { return PosetWithPoint(2, {}, 0); }
  static Code xcode(Code n) { return pair_code(n, 0); }
  static Code ycode(Code n) { return pair_code(n, 1); }

  SharpReversal(const Injection& f, Code stage_budget)
      : f_(f),
        xi_(f, poset(), stage_budget + 1),
        order_(xi_.as_quasi_order()) {
    FinSubset a0{xcode(0)}, b0{ycode(0)};
    stages_.push_back(SharpStage{0, a0, b0, {a0, b0}});
    for (Code s = 0; s < stage_budget; ++s) {
      TrueSet ts = true_set_at(f_, s);
      TrueSet tnext = true_set_at(f_, s + 1);
      FinSubset lost = ts.members.with(s).minus(tnext.members);
      const SharpStage& cur = stages_.back();
      SharpStage nxt;
      nxt.s = s + 1;
      if (!lost.empty()) {
        Code n0 = lost.elems().front();
        const SharpStage& anchor = stages_[n0];
        nxt.a = anchor.b.with(xcode(s + 1));
        nxt.b = anchor.b.with(ycode(s + 1));
        nxt.e = anchor.e;
        detail::remove_value(nxt.e, anchor.a);
        detail::remove_value(nxt.e, anchor.b);
      } else {
        nxt.a = cur.a.without(xcode(s)).with(xcode(s + 1));
        nxt.b = cur.b.without(ycode(s)).with(ycode(s + 1));
        nxt.e = cur.e;
        detail::remove_value(nxt.e, cur.a);
      }
      nxt.e.push_back(nxt.a);
      nxt.e.push_back(nxt.b);
      stages_.push_back(std::move(nxt));
    }
  }

  const Injection& injection() const { return f_; }
  const XiOrder& xi() const { return xi_; }
  const QuasiOrder& order() const { return order_; }
  Code stage_budget() const { return stages_.size() - 1; }

  const SharpStage& stage(Code s) const {
    if (s >= stages_.size())
      throw NeedsMoreStagesError("sharp reversal: stage beyond budget");
    return stages_[s];
  }

  PowerSpace power_space() const { return {order_, PowerMode::Sharp}; }

  /// E_s-down-sharp as a finitely presented closed code.
  ClosedCode basic_code(Code s) const {
    return translate_sharp(order_, stage(s).e);
  }

  /// F_s: the running intersection of the basic codes up to s.
  ClosedCode closed_code(Code s) const {
    std::vector<ClosedCode> parts;
    for (Code t = 0; t <= s; ++t) parts.push_back(basic_code(t));
    return ClosedCode::intersection(std::move(parts));
  }

  std::vector<ClosedCode> chain(Code steps) const {
    std::vector<ClosedCode> out;
    for (Code s = 0; s < steps; ++s) out.push_back(closed_code(s));
    return out;
  }

  bool in_sharp_closure(const FinSubset& w,
                        const std::vector<FinSubset>& e) const {
    for (const FinSubset& g : e)
      if (sharp_leq(order_, w, g)) return true;
    return false;
  }

  /// The three claims of the construction, evaluated exactly for stage s.
  SharpClaims claims(Code s) const {
    const SharpStage& st = stage(s);
    SharpClaims c;

    FinSubset all;
    for (const FinSubset& g : st.e) all = all.union_with(g);
    c.antichain = true;
    const auto& elems = all.elems();
    for (std::size_t i = 0; i < elems.size() && c.antichain; ++i)
      for (std::size_t j = i + 1; j < elems.size() && c.antichain; ++j)
        if (order_.leq(elems[i], elems[j]) || order_.leq(elems[j], elems[i]))
          c.antichain = false;

    auto avoids = [&](const FinSubset& w) {
      std::vector<FinSubset> rest = st.e;
      detail::remove_value(rest, w);
      return !in_sharp_closure(w, rest);
    };
    c.avoidance = avoids(st.a) && avoids(st.b);

    c.persistence = true;
    for (Code i = 0; i <= s && c.persistence; ++i)
      c.persistence = in_sharp_closure(st.a, stages_[i].e) &&
                      in_sharp_closure(st.b, stages_[i].e);
    return c;
  }

  /// The designated separator for step s: b_{n0} in case (i), a_s in case
  /// (ii); verified inside F_s (membership in every E_t-down-sharp, t <= s)
  /// and outside E_{s+1}-down-sharp.
  SeparatorStep separator(Code s) const {
    const SharpStage& next = stage(s + 1);
    TrueSet ts = true_set_at(f_, s);
    TrueSet tnext = true_set_at(f_, s + 1);
    FinSubset lost = ts.members.with(s).minus(tnext.members);

    SeparatorStep step;
    step.s = s;
    if (!lost.empty()) {
      step.case_i = true;
      step.n0 = lost.elems().front();
      step.witness = stages_[*step.n0].b;
    } else {
      step.case_i = false;
      step.witness = stages_[s].a;
    }
    for (Code t = 0; t <= s; ++t)
      if (!in_sharp_closure(step.witness, stages_[t].e))
        throw VerificationError("sharp reversal: separator not in F_s");
    if (in_sharp_closure(step.witness, next.e))
      throw VerificationError(
          "sharp reversal: separator not excluded from E_{s+1}");
    return step;
  }

 private:
  Injection f_;
  XiOrder xi_;
  QuasiOrder order_;
  std::vector<SharpStage> stages_;
};

}  // namespace wqo
