#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_helpers.hpp"
#include "wqo/topology.hpp"

using namespace wqo;
using wqo::testing::rado_code;
using wqo::testing::random_order;

TEST_CASE("base invariants hold for both base kinds") {
  std::mt19937_64 rng(11001);
  for (int trial = 0; trial < 10; ++trial) {
    QuasiOrder q = random_order(rng, 5);

    CSCSpace alex = base_space(q, BaseKind::Alexandroff);
    for (Code x = 0; x < 5; ++x) {
      // Coverage: x lies in its own basic open.
      CHECK(alex.member(x, x));
      for (Code i = 0; i < 5; ++i)
        for (Code j = 0; j < 5; ++j) {
          if (!alex.member(x, i) || !alex.member(x, j)) continue;
          Code k = alex.refine(x, i, j);
          CHECK(alex.member(x, k));
          for (Code y = 0; y < 5; ++y)
            if (alex.member(y, k)) {
              CHECK(alex.member(y, i));
              CHECK(alex.member(y, j));
            }
        }
    }

    CSCSpace upper = base_space(q, BaseKind::Upper);
    for (Code x = 0; x < 5; ++x) {
      CHECK(upper.member(x, 0));  // empty index codes the whole space
      for (Code i = 0; i < 32; ++i)
        for (Code j = 0; j < 32; ++j) {
          if (!upper.member(x, i) || !upper.member(x, j)) continue;
          Code k = upper.refine(x, i, j);
          CHECK(upper.member(x, k));
          for (Code y = 0; y < 5; ++y)
            if (upper.member(y, k)) {
              CHECK(upper.member(y, i));
              CHECK(upper.member(y, j));
            }
        }
    }
  }
}

TEST_CASE("base membership examples") {
  QuasiOrder omega = build_order(OrderSpec::omega());
  CSCSpace alex = base_space(omega, BaseKind::Alexandroff);
  CHECK(alex.member(5, 3));
  CHECK_FALSE(alex.member(2, 3));

  CSCSpace upper = base_space(omega, BaseKind::Upper);
  CHECK_FALSE(upper.member(2, FinSubset{4}.to_mask()));
  CHECK(upper.member(7, FinSubset{4}.to_mask()));
  for (Code x : {0, 3, 9}) CHECK(upper.member(x, 0));
}

TEST_CASE("eff_open_member") {
  QuasiOrder omega = build_order(OrderSpec::omega());
  CSCSpace alex = base_space(omega, BaseKind::Alexandroff);

  OpenCode empty = OpenCode::empty();
  OpenMembership none = eff_open_member(alex, empty, 3, 50);
  CHECK_FALSE(none.in);
  CHECK(none.exact);  // finitely presented

  OpenCode h0 = OpenCode::from_lists({{0}});
  OpenMembership w = eff_open_member(alex, h0, 7, 10);
  CHECK(w.in);
  CHECK(w.stage == 0);
  CHECK(w.index == 0);

  CSCSpace upper = base_space(omega, BaseKind::Upper);
  OpenCode singles(
      [](Code n) { return std::vector<Code>{FinSubset{n}.to_mask()}; });
  // First stage whose index set does not dominate 3 is n = 0 (3 outside
  // {0}-down).
  OpenMembership m = eff_open_member(upper, singles, 3, 10);
  CHECK(m.in);
  CHECK(m.stage == 0);
  CHECK(m.index == FinSubset{0}.to_mask());

  // 0 lies below every singleton, so no stage of this stream admits it.
  OpenMembership unbounded = eff_open_member(upper, singles, 0, 6);
  CHECK_FALSE(unbounded.in);
  CHECK_FALSE(unbounded.exact);
  CHECK(unbounded.horizon == 6);
}

TEST_CASE("refinement witness checks out") {
  QuasiOrder omega = build_order(OrderSpec::omega());
  CHECK(refinement_check(omega, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}).ok);

  QuasiOrder rado = build_order(OrderSpec::rado());
  std::vector<Code> pairs;
  for (Code i = 0; i < 4; ++i)
    for (Code j = i + 1; j < 5; ++j) pairs.push_back(rado_code(i, j));
  CHECK(refinement_check(rado, pairs).ok);

  QuasiOrder anti = build_order(OrderSpec::finite(5, {}));
  CHECK(refinement_check(anti, {0, 1, 2, 3, 4}).ok);

  std::mt19937_64 rng(11002);
  for (int trial = 0; trial < 10; ++trial) {
    QuasiOrder q = random_order(rng, 6);
    CHECK(refinement_check(q, {0, 1, 2, 3, 4, 5}).ok);
  }
}

TEST_CASE("ascending_from_bad separators are exact") {
  QuasiOrder omega_star = build_order(OrderSpec::omega_star());
  CSCSpace alex = base_space(omega_star, BaseKind::Alexandroff);
  auto found = find_bad_prefix(omega_star, 3, 10000);
  REQUIRE(found.prefix.has_value());
  ChainCode chain = ascending_from_bad(*found.prefix);
  const std::vector<Code>& q = found.prefix->seq();
  for (Code n = 0; n < q.size(); ++n) {
    OpenMembership in_next = eff_open_member(alex, chain.at(n + 1), q[n], 16);
    CHECK(in_next.in);
    OpenMembership in_cur = eff_open_member(alex, chain.at(n), q[n], 16);
    CHECK_FALSE(in_cur.in);
    CHECK(in_cur.exact);
  }

  // Length-1 prefix: G_0 empty, G_1 nonempty.
  auto one = BadPrefix::verified(omega_star, {5});
  ChainCode tiny = ascending_from_bad(one);
  CHECK_FALSE(eff_open_member(alex, tiny.at(0), 5, 4).in);
  CHECK(eff_open_member(alex, tiny.at(1), 5, 4).in);
}

TEST_CASE("round trip: chain from bad, bad from chain") {
  QuasiOrder omega_star = build_order(OrderSpec::omega_star());
  CSCSpace alex = base_space(omega_star, BaseKind::Alexandroff);
  auto found = find_bad_prefix(omega_star, 10, 100000);
  REQUIRE(found.prefix.has_value());
  ChainCode chain = ascending_from_bad(*found.prefix);
  BadSearch recovered = bad_from_ascending(omega_star, alex, chain, 10, 500000);
  REQUIRE(recovered.prefix.has_value());
  CHECK(recovered.prefix->size() == 10);
  CHECK(is_bad_prefix(omega_star, recovered.prefix->seq()));
}

TEST_CASE("custom growing chain over omega_star yields arbitrary lengths") {
  QuasiOrder omega_star = build_order(OrderSpec::omega_star());
  CSCSpace alex = base_space(omega_star, BaseKind::Alexandroff);
  ChainCode chain{[](Code n) { return OpenCode::from_lists({{n}}); }, 16};
  BadSearch recovered = bad_from_ascending(omega_star, alex, chain, 8, 500000);
  REQUIRE(recovered.prefix.has_value());
  CHECK(recovered.prefix->size() == 8);
}

TEST_CASE("stabilized chains give NotFoundWithinBudget") {
  QuasiOrder omega_star = build_order(OrderSpec::omega_star());
  CSCSpace alex = base_space(omega_star, BaseKind::Alexandroff);
  ChainCode constant{[](Code) { return OpenCode::empty(); }, 8};
  BadSearch recovered =
      bad_from_ascending(omega_star, alex, constant, 4, 20000);
  CHECK_FALSE(recovered.prefix.has_value());
}

TEST_CASE("stabilization_scan") {
  QuasiOrder omega_star = build_order(OrderSpec::omega_star());
  CSCSpace alex = base_space(omega_star, BaseKind::Alexandroff);
  std::vector<Code> sample{0, 1, 2, 3, 4, 5, 6, 7};

  auto found = find_bad_prefix(omega_star, 6, 10000);
  REQUIRE(found.prefix.has_value());
  ChainCode growing = ascending_from_bad(*found.prefix);
  for (const StepReport& r :
       stabilization_scan(alex, growing, 6, sample, 16)) {
    CHECK(r.grew);
    CHECK(r.exact);
  }

  ChainCode constant{[](Code) { return OpenCode::from_lists({{3}}); }, 8};
  for (const StepReport& r :
       stabilization_scan(alex, constant, 5, sample, 16))
    CHECK_FALSE(r.grew);

  // G_n = {n}-up over omega: a shrinking family, so never a growth witness.
  QuasiOrder omega = build_order(OrderSpec::omega());
  CSCSpace alex_w = base_space(omega, BaseKind::Alexandroff);
  ChainCode shrink{[](Code n) { return OpenCode::from_lists({{n}}); }, 8};
  for (const StepReport& r :
       stabilization_scan(alex_w, shrink, 5, sample, 16))
    CHECK_FALSE(r.grew);
}

TEST_CASE("compact_cover_prefix") {
  QuasiOrder anti3 = build_order(OrderSpec::finite(3, {}));
  CSCSpace alex = base_space(anti3, BaseKind::Alexandroff);
  OpenCode singles([](Code n) { return std::vector<Code>{n}; });
  CoverResult r = compact_cover_prefix(alex, singles, 10);
  CHECK(r.covered);
  CHECK(r.prefix_len == 3);

  OpenCode all_at_once = OpenCode::from_lists({{0, 1, 2}});
  CoverResult r1 = compact_cover_prefix(alex, all_at_once, 10);
  CHECK(r1.covered);
  CHECK(r1.prefix_len == 1);

  QuasiOrder chain3 = build_order(OrderSpec::finite(3, {{0, 1}, {1, 2}}));
  CSCSpace alex_c = base_space(chain3, BaseKind::Alexandroff);
  CoverResult r2 = compact_cover_prefix(alex_c, OpenCode::from_lists({{0}}), 10);
  CHECK(r2.covered);
  CHECK(r2.prefix_len == 1);  // 0-up is everything

  CoverResult r3 =
      compact_cover_prefix(alex_c, OpenCode::from_lists({{2}}), 10);
  CHECK_FALSE(r3.covered);
  CHECK(r3.horizon == 10);

  QuasiOrder omega = build_order(OrderSpec::omega());
  CSCSpace alex_w = base_space(omega, BaseKind::Alexandroff);
  CHECK_THROWS_AS(compact_cover_prefix(alex_w, singles, 5), CarrierError);
}

TEST_CASE("round trip through the sharp power of rado") {
  QuasiOrder rado = build_order(OrderSpec::rado());
  QuasiOrder ps = power_order(rado, PowerMode::Sharp);
  CSCSpace alex = base_space(ps, BaseKind::Alexandroff);
  auto found = find_bad_prefix(ps, 10, 1000000);
  REQUIRE(found.prefix.has_value());
  ChainCode chain = ascending_from_bad(*found.prefix);
  const std::vector<Code>& q = found.prefix->seq();
  for (Code n = 0; n < q.size(); ++n) {
    CHECK(eff_open_member(alex, chain.at(n + 1), q[n], 16).in);
    CHECK_FALSE(eff_open_member(alex, chain.at(n), q[n], 16).in);
  }
  BadSearch recovered = bad_from_ascending(ps, alex, chain, 10, 2000000);
  REQUIRE(recovered.prefix.has_value());
  CHECK(recovered.prefix->size() == 10);
  CHECK(is_bad_prefix(ps, recovered.prefix->seq()));
}
