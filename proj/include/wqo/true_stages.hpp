#pragma once

#include "wqo/core.hpp"

namespace wqo {

// ---------------------------------------------------------------------------
// Injections with decidable truth

/// An injection f: N -> N given as a finite table followed by an affine
/// tail, f(k) = k + tail_offset for k >= table size. Requiring
/// tail_offset > max(table) makes f injective and every tail stage true, so
/// truth and range membership are decidable exactly -- this is what anchors
/// every stage construction to a ground-truth oracle.
class Injection {
 public:
  Injection(std::vector<Code> table, Code tail_offset)
      : table_(std::move(table)), tail_offset_(tail_offset) {
    std::vector<Code> sorted = table_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw SpecError("injection: duplicate table entry");
    if (!sorted.empty() && tail_offset_ <= sorted.back())
      throw SpecError("injection: tail_offset must exceed every table value");
  }

  static Injection identity() { return Injection({}, 0); }

  Code operator()(Code k) const {
    if (k < table_.size()) return table_[k];
    return k + tail_offset_;
  }

  const std::vector<Code>& table() const { return table_; }
  Code tail_offset() const { return tail_offset_; }

 private:
  std::vector<Code> table_;
  Code tail_offset_;
};

// ---------------------------------------------------------------------------
// True stages

/// The stages true at time s: T_s = { n < s : forall k in (n, s], f(n) < f(k) }.
struct TrueSet {
  Code s = 0;
  FinSubset members;

  bool contains(Code n) const { return members.contains(n); }
};

inline TrueSet true_set_at(const Injection& f, Code s) {
  std::vector<Code> members;
  for (Code n = 0; n < s; ++n) {
    bool ok = true;
    for (Code k = n + 1; k <= s; ++k)
      if (f(k) < f(n)) {
        ok = false;
        break;
      }
    if (ok) members.push_back(n);
  }
  return TrueSet{s, FinSubset(std::move(members))};
}

/// Is n true at stage s?
inline bool true_at(const Injection& f, Code n, Code s) {
  if (n >= s) return false;
  for (Code k = n + 1; k <= s; ++k)
    if (f(k) < f(n)) return false;
  return true;
}

/// Verdict on whether n is f-true (globally). The scan covers k in
/// (n, horizon]; beyond the table the tail is checked analytically, so when
/// the horizon covers the table the verdict is exact either way.
struct TruthVerdict {
  bool is_true = false;
  bool exact = false;
  /// Least refuting k for a false verdict; the horizon otherwise.
  Code witness_or_horizon = 0;
};

inline TruthVerdict is_true_upto(const Injection& f, Code n, Code horizon) {
  for (Code k = n + 1; k <= horizon; ++k)
    if (f(k) < f(n)) return {false, true, k};

  Code table_len = f.table().size();
  if (horizon >= table_len || horizon == UINT64_MAX) {
    // Table fully scanned. The least tail stage after n has the least tail
    // value; the tail is increasing, so one comparison settles it.
    Code k0 = std::max(n + 1, table_len);
    if (k0 + f.tail_offset() < f(n)) {
      // Tail refutes truth even though the scanned prefix did not (possible
      // only when horizon < k0).
      return {false, true, k0};
    }
    return {true, true, horizon};
  }
  return {true, false, horizon};
}

/// Exact truth of n, via the analytic tail check.
inline bool is_true_exact(const Injection& f, Code n) {
  Code table_len = f.table().size();
  return is_true_upto(f, n, std::max(n, table_len)).is_true;
}

/// Decides "n is in the range of f" through the true-stage criterion: pick
/// a true stage m with f(m) > n; then n is in the range iff some k < m has
/// f(k) = n. Must agree with the naive range scan.
inline bool range_member_decoded(const Injection& f, Code n) {
  Code table_len = f.table().size();
  // Tail stages are all true and take arbitrarily large values.
  Code m = table_len;
  while (!(is_true_exact(f, m) && f(m) > n)) ++m;
  for (Code k = 0; k < m; ++k)
    if (f(k) == n) return true;
  return false;
}

/// Ground-truth range membership, by inspection of the representation.
inline bool range_member_naive(const Injection& f, Code n) {
  for (Code v : f.table())
    if (v == n) return true;
  return n >= f.table().size() + f.tail_offset();
}

}  // namespace wqo
