#pragma once

#include <map>

#include "wqo/powerset.hpp"

namespace wqo {

// ---------------------------------------------------------------------------
// Countable second-countable spaces

/// A coded base for a topology on a countable point set: an indexed family
/// of basic opens U_i given by a membership predicate, together with a
/// refinement function k with x in U_k(x,i,j), U_k(x,i,j) contained in
/// U_i and U_j.
struct CSCSpace {
  std::string name;
  Universe points;
  Universe indices;
  std::function<bool(Code, Code)> member;       // x in U_i
  std::function<Code(Code, Code, Code)> refine; // k(x, i, j)
};

enum class BaseKind { Alexandroff, Upper };

/// The Alexandroff base (U_q = q-up, indexed by elements, k(x,i,j) = x) or
/// the upper base (V_i = Q minus i-down, indexed by finite-subset masks,
/// k = union) of a quasi-order. Upper indices use the mask coding, so index
/// sets range over subsets of codes below 64.
inline CSCSpace base_space(const QuasiOrder& o, BaseKind kind) {
  auto base = std::make_shared<QuasiOrder>(o);
  if (kind == BaseKind::Alexandroff) {
    return CSCSpace{
        "alex(" + o.name() + ")",
        o.universe(),
        o.universe(),
        [base](Code x, Code q) { return base->leq(q, x); },
        [](Code x, Code, Code) { return x; },
    };
  }
  auto valid_index = [base](Code m) {
    for (Code e : FinSubset::from_mask(m).elems())
      if (!base->contains(e)) return false;
    return true;
  };
  return CSCSpace{
      "upper(" + o.name() + ")",
      o.universe(),
      Universe::coded(valid_index),
      [base](Code x, Code m) {
        return !closure_contains(*base, Dir::Down, FinSubset::from_mask(m), x);
      },
      [](Code, Code i, Code j) { return i | j; },
  };
}

// ---------------------------------------------------------------------------
// Effectively open sets

/// Staged enumerator of finite index sets, coding the union of the listed
/// basic opens. A finite stage count marks a finitely presented code, for
/// which complements are decided exactly.
class OpenCode {
 public:
  OpenCode(std::function<std::vector<Code>(Code)> stages,
           std::optional<Code> stage_count = std::nullopt)
      : stages_(std::move(stages)), stage_count_(stage_count) {}

  static OpenCode empty() {
    return OpenCode([](Code) { return std::vector<Code>{}; }, 0);
  }

  static OpenCode from_lists(std::vector<std::vector<Code>> lists) {
    auto shared = std::make_shared<std::vector<std::vector<Code>>>(
        std::move(lists));
    return OpenCode(
        [shared](Code n) {
          return n < shared->size() ? (*shared)[n] : std::vector<Code>{};
        },
        shared->size());
  }

  std::vector<Code> at(Code stage) const {
    if (stage_count_ && stage >= *stage_count_) return {};
    return stages_(stage);
  }
  std::optional<Code> stage_count() const { return stage_count_; }

 private:
  std::function<std::vector<Code>(Code)> stages_;
  std::optional<Code> stage_count_;
};

/// Bounded membership verdict for an effectively open set; membership is
/// only semi-decidable, so the negative answer carries its horizon. The
/// verdict is exact when the code is finitely presented and the horizon
/// covers it.
struct OpenMembership {
  bool in = false;
  Code stage = 0;   // witness stage when in
  Code index = 0;   // witness index when in
  Code horizon = 0; // scanned bound when not in
  bool exact = false;
};

inline OpenMembership eff_open_member(const CSCSpace& s, const OpenCode& h,
                                      Code x, Code horizon) {
  if (!s.points.contains(x)) throw CarrierError(s.name + ": invalid point");
  Code limit = horizon;
  bool exact = false;
  if (h.stage_count() && *h.stage_count() <= horizon) {
    limit = *h.stage_count();
    exact = true;
  }
  for (Code n = 0; n < limit; ++n)
    for (Code i : h.at(n))
      if (s.member(x, i)) return {true, n, i, horizon, true};
  return {false, 0, 0, horizon, exact};
}

/// A sequence of effectively open sets, one open code per chain position.
struct ChainCode {
  std::function<OpenCode(Code)> at;
  std::optional<Code> positions;  // number of materialized positions
};

// ---------------------------------------------------------------------------
// Refinement: the Alexandroff base is effectively finer than the upper base

struct RefinementReport {
  bool ok = true;
  Code bad_point = 0;
  FinSubset bad_index;
};

/// Instantiates the canonical refinement witness
///   f(i, n) = {n} if n lies outside i-down, else the empty set
/// and checks, over the sampled points x and all index sets drawn from the
/// sample, that x lies in V_i iff stage n = x fires. This holds for every
/// quasi-order; a false return carries a counterexample and means a bug.
inline RefinementReport refinement_check(const QuasiOrder& o,
                                         const std::vector<Code>& sample) {
  for (Code x : sample) o.require(x);
  std::size_t n = sample.size();
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    std::vector<Code> gen;
    for (std::size_t b = 0; b < n; ++b)
      if (bits & (std::size_t{1} << b)) gen.push_back(sample[b]);
    FinSubset iset(std::move(gen));
    for (Code x : sample) {
      bool lhs = !closure_contains(o, Dir::Down, iset, x);
      // Right-hand side over the sampled stages plus the canonical witness
      // stage n = x: some n outside i-down with x in U_n = n-up.
      bool rhs = false;
      auto fires = [&](Code st) {
        return !closure_contains(o, Dir::Down, iset, st) && o.leq(st, x);
      };
      if (fires(x)) rhs = true;
      for (Code st : sample)
        if (fires(st)) {
          rhs = true;
          break;
        }
      if (lhs != rhs) return {false, x, iset};
    }
  }
  return {true, 0, {}};
}

// ---------------------------------------------------------------------------
// Bad sequences vs ascending chains of opens

/// The strictly ascending chain of Alexandroff opens built from a bad
/// prefix: G_n is the up-closure of the first n elements, coded stagewise
/// by h(i) = {q_i}. The position-n separator is q_n itself: it enters
/// G_{n+1} and, because the prefix is bad, avoids G_n.
inline ChainCode ascending_from_bad(const BadPrefix& bad) {
  auto seq = std::make_shared<std::vector<Code>>(bad.seq());
  Code len = seq->size();
  return ChainCode{
      [seq](Code n) {
        return OpenCode(
            [seq, n](Code stage) {
              return stage < n && stage < seq->size()
                         ? std::vector<Code>{(*seq)[stage]}
                         : std::vector<Code>{};
            },
            std::min<Code>(n, seq->size()));
      },
      len + 1};
}

/// Replays the proof that a non-stabilizing ascending chain over alex(O)
/// yields a bad sequence: maintain (q_i, n_i) and extend with a q_k that
/// lies in some G_{n_k} (witnessed within the position bound) and has no
/// earlier q_i below it. Candidates are tried in ascending code order with
/// backtracking, under iterative deepening on the candidate count, so a
/// finite chain prefix whose greedy extensions dead-end is still searched
/// completely. The budget counts membership probes. Output re-verifies as
/// bad.
inline BadSearch bad_from_ascending(const QuasiOrder& o, const CSCSpace& alex,
                                    const ChainCode& chain, std::size_t len,
                                    std::uint64_t budget) {
  BadSearch result;
  Code positions = chain.positions.value_or(64);

  std::vector<Code> elems;  // lazily enumerated carrier
  bool carrier_done = false;
  auto ensure = [&](std::size_t count) {
    while (!carrier_done && elems.size() < count) {
      Code from = elems.empty() ? 0 : elems.back() + 1;
      if (!elems.empty() && elems.back() == UINT64_MAX) {
        carrier_done = true;
        break;
      }
      auto next = o.universe().first_from(from);
      if (!next) {
        carrier_done = true;
        break;
      }
      elems.push_back(*next);
    }
  };

  std::vector<Code> seq;
  bool out_of_budget = false;

  // Member of some chain position, witnessed within the position bound.
  // Independent of the partial sequence, so memoized per element.
  std::map<Code, bool> member_memo;
  auto in_some_open = [&](Code q) -> bool {
    if (auto it = member_memo.find(q); it != member_memo.end())
      return it->second;
    for (Code n = 0; n <= positions; ++n) {
      if (result.expansions >= budget) {
        out_of_budget = true;
        return false;
      }
      ++result.expansions;
      if (eff_open_member(alex, chain.at(n), q, positions + 1).in) {
        member_memo.emplace(q, true);
        return true;
      }
    }
    member_memo.emplace(q, false);
    return false;
  };

  std::function<bool(std::size_t)> dfs = [&](std::size_t limit) -> bool {
    if (seq.size() == len) return true;
    for (std::size_t idx = 0; idx < limit && idx < elems.size(); ++idx) {
      Code q = elems[idx];
      bool fresh = true;
      for (Code prev : seq)
        if (prev == q || o.leq_unchecked(prev, q)) {
          fresh = false;
          break;
        }
      if (!fresh) continue;
      if (!in_some_open(q)) {
        if (out_of_budget) return false;
        continue;
      }
      seq.push_back(q);
      if (dfs(limit)) return true;
      seq.pop_back();
      if (out_of_budget) return false;
    }
    return false;
  };

  for (std::size_t limit = 2;; limit *= 2) {
    ensure(limit);
    seq.clear();
    if (dfs(limit)) {
      result.prefix = BadPrefix::verified(o, seq);
      return result;
    }
    if (out_of_budget) return result;
    if (carrier_done && limit >= elems.size()) {
      result.exhausted = true;
      return result;
    }
  }
}

// ---------------------------------------------------------------------------
// Stabilization and compactness

/// Sample-relative growth report for one chain step. Only Grew verdicts are
/// certificates; NoChangeOnSample says nothing beyond the sample and
/// horizon.
struct StepReport {
  Code position = 0;
  bool grew = false;
  Code witness = 0;
  bool exact = false;  // the non-membership half was decided exactly
};

inline std::vector<StepReport> stabilization_scan(
    const CSCSpace& s, const ChainCode& chain, Code positions,
    const std::vector<Code>& sample, Code horizon) {
  std::vector<StepReport> reports;
  for (Code n = 0; n < positions; ++n) {
    StepReport rep{n, false, 0, false};
    OpenCode g_n = chain.at(n);
    OpenCode g_next = chain.at(n + 1);
    for (Code x : sample) {
      OpenMembership in_next = eff_open_member(s, g_next, x, horizon);
      if (!in_next.in) continue;
      OpenMembership in_cur = eff_open_member(s, g_n, x, horizon);
      if (!in_cur.in) {
        rep.grew = true;
        rep.witness = x;
        rep.exact = in_cur.exact;
        break;
      }
    }
    reports.push_back(rep);
  }
  return reports;
}

struct CoverResult {
  bool covered = false;
  Code prefix_len = 0;  // least N with the prefix covering all points
  Code horizon = 0;     // scanned bound when not covered
};

/// Least N such that stages below N of h cover every point of a finite
/// space. NotCovered (covered = false) reports the horizon when the
/// caller-asserted cover never materializes within it.
inline CoverResult compact_cover_prefix(const CSCSpace& s, const OpenCode& h,
                                        Code horizon) {
  std::optional<Code> size = s.points.bound();
  if (!size)
    throw CarrierError("compact_cover_prefix: needs a finite point carrier");
  std::vector<Code> points;
  for (Code c = 0; c < *size; ++c)
    if (s.points.contains(c)) points.push_back(c);

  std::vector<bool> seen(points.size(), false);
  std::size_t missing = points.size();
  if (missing == 0) return {true, 0, horizon};
  for (Code n = 0; n < horizon; ++n) {
    for (Code i : h.at(n))
      for (std::size_t p = 0; p < points.size(); ++p)
        if (!seen[p] && s.member(points[p], i)) {
          seen[p] = true;
          --missing;
        }
    if (missing == 0) return {true, n + 1, horizon};
  }
  return {false, 0, horizon};
}

}  // namespace wqo
