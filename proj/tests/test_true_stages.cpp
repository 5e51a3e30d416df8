#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "wqo/true_stages.hpp"

using namespace wqo;

namespace {

Injection f3() { return Injection({2, 0, 1}, 3); }

Injection random_injection(std::mt19937_64& rng, std::size_t max_table) {
  std::uniform_int_distribution<std::size_t> len_d(0, max_table);
  std::size_t len = len_d(rng);
  std::vector<Code> values(len * 3);
  std::iota(values.begin(), values.end(), Code{0});
  std::shuffle(values.begin(), values.end(), rng);
  std::vector<Code> table(values.begin(), values.begin() + len);
  Code mx = 0;
  for (Code v : table) mx = std::max(mx, v);
  std::uniform_int_distribution<Code> off_d(mx + 1, mx + 4);
  return Injection(std::move(table), table.empty() ? 0 : off_d(rng));
}

}  // namespace

TEST_CASE("injection validation") {
  CHECK_THROWS_AS(Injection({2, 2}, 5), SpecError);
  CHECK_THROWS_AS(Injection({4, 1}, 3), SpecError);  // tail collides
  CHECK_NOTHROW(Injection({}, 0));
  CHECK_NOTHROW(Injection({2, 0, 1}, 3));
}

TEST_CASE("true_set_at matches the definition on the examples") {
  Injection id = Injection::identity();
  for (Code s = 0; s < 8; ++s) {
    TrueSet t = true_set_at(id, s);
    REQUIRE(t.members.size() == s);
    for (Code n = 0; n < s; ++n) CHECK(t.contains(n));
  }

  Injection f = f3();
  CHECK(true_set_at(f, 0).members == FinSubset{});
  CHECK(true_set_at(f, 1).members == FinSubset{});
  CHECK(true_set_at(f, 2).members == FinSubset{1});
  CHECK(true_set_at(f, 3).members == FinSubset{1, 2});
  CHECK(true_set_at(f, 4).members == FinSubset{1, 2, 3});
}

TEST_CASE("T_{s+1} within T_s plus {s}, and anti-monotonicity") {
  std::mt19937_64 rng(9001);
  for (int trial = 0; trial < 40; ++trial) {
    Injection f = random_injection(rng, 6);
    for (Code s = 0; s < 14; ++s) {
      TrueSet cur = true_set_at(f, s);
      TrueSet next = true_set_at(f, s + 1);
      CHECK(next.members.subset_of(cur.members.with(s)));
      // n true at a later stage stays true at earlier stages covering it.
      for (Code n : next.members.elems())
        if (n < s) CHECK(cur.contains(n));
    }
  }
}

TEST_CASE("is_true_upto examples") {
  Injection f = f3();
  TruthVerdict v0 = is_true_upto(f, 0, 10);
  CHECK_FALSE(v0.is_true);
  CHECK(v0.exact);
  CHECK(v0.witness_or_horizon == 1);  // f(1) = 0 < 2 = f(0)

  TruthVerdict v1 = is_true_upto(f, 1, 10);
  CHECK(v1.is_true);
  CHECK(v1.exact);

  TruthVerdict vid = is_true_upto(Injection::identity(), 5, 5);
  CHECK(vid.is_true);
  CHECK(vid.exact);
}

TEST_CASE("is_true_upto verdicts agree with a brute scan") {
  std::mt19937_64 rng(9002);
  for (int trial = 0; trial < 40; ++trial) {
    Injection f = random_injection(rng, 6);
    Code far = 10 * std::max<Code>(1, f.table().size());
    for (Code n = 0; n < 12; ++n) {
      bool brute = true;
      for (Code k = n + 1; k <= far; ++k)
        if (f(k) < f(n)) brute = false;
      CHECK(is_true_exact(f, n) == brute);
      TruthVerdict v = is_true_upto(f, n, far);
      CHECK(v.exact);
      CHECK(v.is_true == brute);
    }
  }
}

TEST_CASE("range decoding matches the naive scan") {
  std::mt19937_64 rng(9003);
  Injection f = f3();
  CHECK_FALSE(range_member_decoded(f, 4));
  CHECK(range_member_decoded(f, 1));
  CHECK(range_member_decoded(Injection::identity(), 17));

  for (int trial = 0; trial < 40; ++trial) {
    Injection g = random_injection(rng, 6);
    for (Code n = 0; n < 50; ++n)
      CHECK(range_member_decoded(g, n) == range_member_naive(g, n));
  }
}
