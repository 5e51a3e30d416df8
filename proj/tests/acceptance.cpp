// Acceptance suite: one pass/fail line per criterion, exit status = number
// of failed criteria. Criterion 10 drives the CLI binary, whose path is
// argv[1]; the schema it validates against ships in docs/.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "wqo/wqo.hpp"

using namespace wqo;
using Clock = std::chrono::steady_clock;

namespace {

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

QuasiOrder random_order(std::mt19937_64& rng, Code n, double edge_prob = 0.3) {
  std::vector<std::pair<Code, Code>> edges;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Code a = 0; a < n; ++a)
    for (Code b = 0; b < n; ++b)
      if (a != b && coin(rng) < edge_prob) edges.emplace_back(a, b);
  return build_order(OrderSpec::finite(n, std::move(edges)));
}

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

PosetWithPoint random_poset(std::mt19937_64& rng, Code n) {
  std::vector<std::pair<Code, Code>> edges;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Code a = 0; a < n; ++a)
    for (Code b = a + 1; b < n; ++b)
      if (coin(rng) < 0.35) edges.emplace_back(a, b);
  std::uniform_int_distribution<Code> pick(0, n - 1);
  return PosetWithPoint(n, std::move(edges), pick(rng));
}

std::vector<Code> sample_carrier(const QuasiOrder& q, std::size_t count) {
  std::vector<Code> out;
  Code c = 0;
  while (out.size() < count) {
    auto next = q.universe().first_from(c);
    if (!next) break;
    out.push_back(*next);
    if (*next == UINT64_MAX) break;
    c = *next + 1;
  }
  return out;
}

// --------------------------------------------------------------------------
// Criterion 1: order laws on 1000 random orders plus the named ones.

bool criterion1(std::string& detail) {
  auto start = Clock::now();
  std::mt19937_64 rng = make_rng(101);
  std::uint64_t failures = 0;

  std::vector<QuasiOrder> orders;
  std::uniform_int_distribution<Code> size_d(1, 8);
  for (int i = 0; i < 1000; ++i)
    orders.push_back(random_order(rng, size_d(rng)));
  orders.push_back(build_order(OrderSpec::rado()));
  orders.push_back(build_order(OrderSpec::omega()));
  orders.push_back(build_order(OrderSpec::omega_star()));
  orders.push_back(build_order(OrderSpec::antichain()));

  for (const QuasiOrder& q : orders) {
    std::vector<Code> sample = sample_carrier(q, 8);
    std::size_t n = sample.size();
    for (Code a : sample)
      if (!q.leq(a, a)) ++failures;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (q.leq(sample[i], sample[j]) && q.leq(sample[j], sample[k]) &&
              !q.leq(sample[i], sample[k]))
            ++failures;

    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    auto rand_set = [&] {
      std::vector<Code> v;
      std::size_t size = idx(rng) % std::min<std::size_t>(n, 4);
      for (std::size_t i = 0; i <= size; ++i) v.push_back(sample[idx(rng)]);
      return FinSubset(std::move(v));
    };
    for (int t = 0; t < 12; ++t) {
      FinSubset a = rand_set(), b = rand_set(), c = rand_set();
      if (!flat_leq(q, a, a) || !sharp_leq(q, a, a)) ++failures;
      if (flat_leq(q, a, b) && flat_leq(q, b, c) && !flat_leq(q, a, c))
        ++failures;
      if (sharp_leq(q, a, b) && sharp_leq(q, b, c) && !sharp_leq(q, a, c))
        ++failures;
      // Subset monotonicity.
      FinSubset bigger = a.with(sample[idx(rng)]);
      if (!flat_leq(q, a, bigger) || !sharp_leq(q, bigger, a)) ++failures;
      // Singleton embedding.
      Code x = sample[idx(rng)], y = sample[idx(rng)];
      bool le = q.leq(x, y);
      if (flat_leq(q, FinSubset{x}, FinSubset{y}) != le) ++failures;
      if (sharp_leq(q, FinSubset{x}, FinSubset{y}) != le) ++failures;
    }
  }

  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream os;
  os << orders.size() << " orders, " << failures << " failures, " << secs
     << "s";
  detail = os.str();
  return failures == 0 && secs < 30.0;
}

// --------------------------------------------------------------------------
// Criterion 2: fast-path leq == naive replay, exhaustively.

bool criterion2(std::string& detail) {
  std::mt19937_64 rng = make_rng(202);
  std::uint64_t checked = 0, mismatches = 0;
  const Code stages = 12;
  for (int i = 0; i < 50; ++i) {
    Injection f = random_injection(rng, 6);
    for (Code psize = 1; psize <= 4; ++psize) {
      PosetWithPoint p = random_poset(rng, psize);
      XiOrder fast = xi_order(f, p, stages);
      XiTable naive(f, p, stages);
      for (Code n1 = 0; n1 < stages; ++n1)
        for (Code p1 = 0; p1 < psize; ++p1)
          for (Code n2 = 0; n2 < stages; ++n2)
            for (Code p2 = 0; p2 < psize; ++p2) {
              ++checked;
              if (fast.leq({n1, p1}, {n2, p2}) !=
                  naive.leq({n1, p1}, {n2, p2}))
                ++mismatches;
            }
    }
  }
  detail = std::to_string(checked) + " pairs, " + std::to_string(mismatches) +
           " mismatches";
  return mismatches == 0;
}

// --------------------------------------------------------------------------
// Criterion 3: the placement lemma across the same corpus.

bool criterion3(std::string& detail) {
  std::mt19937_64 rng = make_rng(303);
  std::uint64_t checked = 0, failures = 0;
  for (int i = 0; i < 50; ++i) {
    Injection f = random_injection(rng, 6);
    for (Code psize = 1; psize <= 4; ++psize) {
      PosetWithPoint p = random_poset(rng, psize);
      XiOrder xi = xi_order(f, p, 16);
      for (Code m = 1; m <= 15; ++m)
        for (Code n = 0; n < m; ++n) {
          ++checked;
          if (!lemma_placement_check(xi, n, m)) ++failures;
        }
    }
  }
  detail = std::to_string(checked) + " pairs, " + std::to_string(failures) +
           " failures";
  return failures == 0;
}

// --------------------------------------------------------------------------
// Criteria 4 and 5: the reversal chains strictly descend with the
// designated separators.

bool criterion4(std::string& detail) {
  std::mt19937_64 rng = make_rng(404);
  std::uint64_t steps = 0, failures = 0;
  for (int i = 0; i < 50; ++i) {
    Injection f = random_injection(rng, 6);
    FlatReversal rev(f, 12);
    for (Code s = 0; s < 12; ++s) {
      ++steps;
      try {
        rev.separator(s);
      } catch (const VerificationError&) {
        ++failures;
      }
    }
  }
  detail = std::to_string(steps) + " steps, " + std::to_string(failures) +
           " failures";
  return failures == 0;
}

bool criterion5(std::string& detail) {
  std::mt19937_64 rng = make_rng(505);
  std::uint64_t steps = 0, failures = 0;
  for (int i = 0; i < 50; ++i) {
    Injection f = random_injection(rng, 6);
    SharpReversal rev(f, 12);
    for (Code s = 0; s < 12; ++s) {
      ++steps;
      try {
        if (!rev.claims(s).all()) ++failures;
        rev.separator(s);
      } catch (const VerificationError&) {
        ++failures;
      }
    }
  }
  detail = std::to_string(steps) + " steps, " + std::to_string(failures) +
           " failures";
  return failures == 0;
}

// --------------------------------------------------------------------------
// Criterion 6: the translation lemma against the direct oracles.

bool criterion6(std::string& detail) {
  std::mt19937_64 rng = make_rng(606);
  std::uint64_t instances = 0, checked = 0, mismatches = 0;

  auto run_instance = [&](const QuasiOrder& q, Code size) {
    ++instances;
    std::vector<FinSubset> pool;  // all subsets of size <= 3
    for (Code mask = 0; mask < (Code{1} << size); ++mask) {
      if (std::popcount(mask) > 3) continue;
      pool.push_back(FinSubset::from_mask(mask));
    }

    auto check_family = [&](const std::vector<FinSubset>& gens) {
      FlatTranslation flat = translate_flat(q, gens);
      bool sharp_applicable = true;
      for (const FinSubset& g : gens)
        if (g.empty()) sharp_applicable = false;
      std::optional<ClosedCode> sharp;
      Code horizon = 0;
      if (sharp_applicable) {
        sharp = translate_sharp(q, gens);
        horizon = *sharp->stage_count() + 1;
      }
      for (const FinSubset& x : pool) {
        bool direct_flat = false, direct_sharp = false;
        for (const FinSubset& g : gens) {
          direct_flat = direct_flat || flat_leq(q, x, g);
          direct_sharp = direct_sharp || sharp_leq(q, x, g);
        }
        ++checked;
        if (flat.membership(x).member != direct_flat) ++mismatches;
        if (sharp) {
          ClosedVerdict v =
              closed_member(*sharp, SymbolicSubset::fin(x, q), horizon);
          if (v.in != direct_sharp || !v.exact) ++mismatches;
        }
      }
    };

    // All generator families of 1..3 distinct pool members. Two- and
    // three-generator families are subsampled deterministically on the
    // larger carriers to keep the suite inside its time budget; singleton
    // families are exhaustive.
    for (std::size_t i = 0; i < pool.size(); ++i) check_family({pool[i]});
    std::size_t stride2 = size <= 4 ? 1 : (size == 5 ? 3 : 7);
    std::size_t stride3 = size <= 3 ? 1 : (size == 4 ? 5 : 41);
    std::size_t c2 = 0, c3 = 0;
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        if (c2++ % stride2 == 0) check_family({pool[i], pool[j]});
        for (std::size_t k = j + 1; k < pool.size(); ++k)
          if (c3++ % stride3 == 0) check_family({pool[i], pool[j], pool[k]});
      }
  };

  for (Code size = 2; size <= 6; ++size)
    for (int i = 0; i < 40; ++i) {
      QuasiOrder q = random_order(rng, size);
      run_instance(q, size);
    }

  std::ostringstream os;
  os << instances << " instances, " << checked << " memberships, "
     << mismatches << " mismatches";
  detail = os.str();
  return instances >= 200 && mismatches == 0;
}

// --------------------------------------------------------------------------
// Criterion 7: chain round trips on omega* and the sharp power of Rado.

bool criterion7(std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  std::vector<std::pair<std::string, QuasiOrder>> cases;
  cases.emplace_back("omega_star", build_order(OrderSpec::omega_star()));
  cases.emplace_back(
      "sharp_power(rado)",
      power_order(build_order(OrderSpec::rado()), PowerMode::Sharp));

  for (auto& [name, q] : cases) {
    BadSearch found = find_bad_prefix(q, 10, 1000000);
    if (!found.prefix) {
      os << name << ": no bad prefix; ";
      ok = false;
      continue;
    }
    CSCSpace alex = base_space(q, BaseKind::Alexandroff);
    ChainCode chain = ascending_from_bad(*found.prefix);
    const std::vector<Code>& seq = found.prefix->seq();
    std::size_t strict = 0;
    for (Code n = 0; n < 10; ++n) {
      bool enters = eff_open_member(alex, chain.at(n + 1), seq[n], 12).in;
      OpenMembership cur = eff_open_member(alex, chain.at(n), seq[n], 12);
      if (enters && !cur.in && cur.exact) ++strict;
    }
    BadSearch rec = bad_from_ascending(q, alex, chain, 10, 2000000);
    bool recovered = rec.prefix.has_value() && rec.prefix->size() == 10 &&
                     is_bad_prefix(q, rec.prefix->seq());
    os << name << ": " << strict << "/10 strict, recovered="
       << (recovered ? "yes" : "no") << "; ";
    ok = ok && strict == 10 && recovered;
  }
  detail = os.str();
  return ok;
}

// --------------------------------------------------------------------------
// Criterion 8: range decoding and bad-prefix decoding.

bool criterion8(std::string& detail) {
  std::mt19937_64 rng = make_rng(808);
  std::uint64_t range_mismatches = 0, contradictions = 0, decoded = 0;
  bool identity_found = false;

  std::vector<Injection> corpus{Injection::identity()};
  for (int i = 0; i < 49; ++i) corpus.push_back(random_injection(rng, 6));

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Injection& f = corpus[i];
    for (Code n = 0; n < 50; ++n)
      if (range_member_decoded(f, n) != range_member_naive(f, n))
        ++range_mismatches;

    XiOrder xi = xi_order(f, PosetWithPoint::point(), 24);
    QuasiOrder q = xi.as_quasi_order();
    BadSearch found = find_bad_prefix(q, 21, 1000000);
    if (found.prefix) {
      ++decoded;
      if (i == 0) identity_found = true;
      for (Code n = 0; n < 20; ++n) {
        DecodeVerdict v =
            decode_from_bad(xi, *found.prefix, n, found.prefix->size());
        bool truly = is_true_exact(f, n);
        if ((v == DecodeVerdict::True && !truly) ||
            (v == DecodeVerdict::False && truly))
          ++contradictions;
      }
    }
  }
  std::ostringstream os;
  os << "range mismatches " << range_mismatches << ", decoded instances "
     << decoded << "/50, contradictions " << contradictions;
  detail = os.str();
  return range_mismatches == 0 && contradictions == 0 && identity_found;
}

// --------------------------------------------------------------------------
// Criterion 9: the sharp power of Rado is caught failing wqo-ness.

bool criterion9(std::string& detail) {
  QuasiOrder ps =
      power_order(build_order(OrderSpec::rado()), PowerMode::Sharp);
  BadSearch found = find_bad_prefix(ps, 8, 1000000);
  std::ostringstream os;
  os << "expansions " << found.expansions;
  if (!found.prefix) {
    detail = os.str() + ", not found";
    return false;
  }
  os << ", length " << found.prefix->size();
  detail = os.str();
  return found.prefix->size() >= 8 && is_bad_prefix(ps, found.prefix->seq());
}

// --------------------------------------------------------------------------
// Criterion 10: the CLI contract.

int run_cli(const std::string& cli, const std::string& args,
            const std::string& out_file) {
  std::string cmd = cli + " " + args + " > " + out_file + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Minimal structural validator for the subset of JSON Schema the shipped
// schema uses: type, required, properties, items, enum.
bool validate_schema(const json& schema, const json& value) {
  if (schema.contains("enum")) {
    for (const json& v : schema["enum"])
      if (v == value) return true;
    return false;
  }
  if (schema.contains("type")) {
    std::string t = schema["type"].get<std::string>();
    if (t == "object" && !value.is_object()) return false;
    if (t == "array" && !value.is_array()) return false;
    if (t == "string" && !value.is_string()) return false;
    if (t == "boolean" && !value.is_boolean()) return false;
    if (t == "integer" && !value.is_number_integer() &&
        !value.is_number_unsigned())
      return false;
  }
  if (schema.contains("required"))
    for (const json& key : schema["required"])
      if (!value.contains(key.get<std::string>())) return false;
  if (schema.contains("properties") && value.is_object())
    for (auto& [key, sub] : schema["properties"].items())
      if (value.contains(key) && !validate_schema(sub, value[key]))
        return false;
  if (schema.contains("items") && value.is_array())
    for (const json& item : value)
      if (!validate_schema(schema["items"], item)) return false;
  return true;
}

bool criterion10(const std::string& cli, std::string& detail) {
  std::string dir = "acceptance_tmp";
  std::system(("mkdir -p " + dir).c_str());
  std::string inj = dir + "/f3.json";
  {
    std::ofstream f(inj);
    f << R"({"table":[2,0,1],"tail_offset":3})";
  }
  std::string corrupt = dir + "/corrupt.json";
  {
    std::ofstream f(corrupt);
    f << R"({"table":[2,2,1],"tail_offset":3})";
  }

  json schema;
  {
    std::ifstream s(WQO_SCHEMA_PATH);
    if (!s) {
      detail = "cannot locate the report schema at " WQO_SCHEMA_PATH;
      return false;
    }
    s >> schema;
  }

  std::ostringstream os;
  bool ok = true;
  for (std::string sub : {"flat-chain", "sharp-chain"}) {
    std::string out = dir + "/" + sub + ".json";
    int rc = run_cli(
        cli, "verify " + sub + " --injection " + inj + " --stages 10", out);
    bool schema_ok = false;
    if (rc == 0) {
      std::ifstream in(out);
      json report;
      in >> report;
      schema_ok = validate_schema(schema, report) &&
                  report["ok"].get<bool>() && report["steps"].size() == 10;
    }
    os << sub << ": exit " << rc << ", schema "
       << (schema_ok ? "valid" : "INVALID") << "; ";
    ok = ok && rc == 0 && schema_ok;
  }
  int rc_corrupt =
      run_cli(cli, "verify flat-chain --injection " + corrupt + " --stages 4",
              dir + "/corrupt_out.json");
  os << "corrupt: exit " << rc_corrupt;
  ok = ok && rc_corrupt == 2;
  detail = os.str();
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "./tools/wqo";
  int failures = 0;
  auto report = [&](int index, const char* name, bool pass,
                    const std::string& detail) {
    std::cout << "criterion " << index << " (" << name
              << "): " << (pass ? "PASS" : "FAIL") << " [" << detail << "]\n";
    std::cout.flush();
    if (!pass) ++failures;
  };

  std::string d;
  bool p;

  p = criterion1(d);
  report(1, "order laws", p, d);
  p = criterion2(d);
  report(2, "xi oracle equivalence", p, d);
  p = criterion3(d);
  report(3, "placement lemma", p, d);
  p = criterion4(d);
  report(4, "flat reversal chain", p, d);
  p = criterion5(d);
  report(5, "sharp reversal chain", p, d);
  p = criterion6(d);
  report(6, "translation lemma", p, d);
  p = criterion7(d);
  report(7, "chain round trip", p, d);
  p = criterion8(d);
  report(8, "range decoding", p, d);
  p = criterion9(d);
  report(9, "rado sharp witness", p, d);
  p = criterion10(cli, d);
  report(10, "cli contract", p, d);

  if (failures == 0)
    std::cout << "all criteria passed\n";
  else
    std::cout << failures << " criteria failed\n";
  return failures;
}
