// Command-line front end: build orders, run the chain verifications, export
// the stage structures, decode ranges. Exit codes: 0 success, 1 failed
// check, 2 usage or configuration error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wqo/wqo.hpp"

namespace {

using namespace wqo;

struct Options {
  std::string injection_arg;
  std::string order_arg;
  std::string poset_arg;
  Code point = 0;
  Code stages = 8;
  std::uint64_t budget = 1000000;
  std::size_t len = 8;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::string out_path;
  std::string mode = "flat";
};

json load_json_arg(const std::string& arg, const char* what) {
  if (arg.empty()) throw SpecError(std::string(what) + ": missing input");
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
    try {
      return json::parse(arg);
    } catch (const json::parse_error& e) {
      throw SpecError(std::string(what) + ": bad inline JSON: " + e.what());
    }
  }
  std::ifstream in(arg);
  if (!in) throw SpecError(std::string(what) + ": cannot read " + arg);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw SpecError(std::string(what) + ": bad JSON in " + arg + ": " +
                    e.what());
  }
}

Injection load_injection(const Options& o) {
  return injection_from_json(load_json_arg(o.injection_arg, "--injection"));
}

QuasiOrder load_order(const Options& o) {
  return build_order(order_spec_from_json(load_json_arg(o.order_arg, "--order")));
}

void emit(const Options& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(o.out_path, std::ios::binary);
  if (!out) throw SpecError("--out: cannot write " + o.out_path);
  out << text;
}

void emit_report(const Options& o, const json& report) {
  if (o.format == "text") {
    std::string text = "command: " + report["command"].get<std::string>() +
                       "\nok: " + (report["ok"].get<bool>() ? "true" : "false");
    if (report.contains("steps"))
      text += "\nsteps: " + std::to_string(report["steps"].size());
    emit(o, text);
  } else {
    emit(o, report.dump(2));
  }
}

json base_report(const Options& o, const std::string& command) {
  return json{{"command", command}, {"seed", o.seed}, {"ok", true},
              {"steps", json::array()}};
}

int run_verify_flat_chain(const Options& o) {
  Injection f = load_injection(o);
  FlatReversal rev(f, o.stages);
  json report = base_report(o, "verify flat-chain");
  report["injection"] = injection_to_json(f);
  report["stages"] = o.stages;
  for (Code s = 0; s < o.stages; ++s)
    report["steps"].push_back(separator_step_to_json(rev.separator(s)));
  emit_report(o, report);
  return 0;
}

int run_verify_sharp_chain(const Options& o) {
  Injection f = load_injection(o);
  SharpReversal rev(f, o.stages);
  json report = base_report(o, "verify sharp-chain");
  report["injection"] = injection_to_json(f);
  report["stages"] = o.stages;
  bool ok = true;
  for (Code s = 0; s < o.stages; ++s) {
    SharpClaims claims = rev.claims(s);
    ok = ok && claims.all();
    json step = separator_step_to_json(rev.separator(s));
    step["claims"] = {{"antichain", claims.antichain},
                      {"avoidance", claims.avoidance},
                      {"persistence", claims.persistence}};
    report["steps"].push_back(std::move(step));
  }
  report["ok"] = ok;
  emit_report(o, report);
  return ok ? 0 : 1;
}

int run_verify_prop38(const Options& o) {
  QuasiOrder q = load_order(o);
  json report = base_report(o, "verify prop38");
  report["len"] = o.len;
  BadSearch found = find_bad_prefix(q, o.len, o.budget);
  if (!found.prefix) {
    report["ok"] = false;
    report["reason"] = "no bad prefix found within budget";
    emit_report(o, report);
    return 1;
  }
  report["bad_prefix"] = found.prefix->seq();

  CSCSpace alex = base_space(q, BaseKind::Alexandroff);
  ChainCode chain = ascending_from_bad(*found.prefix);
  const std::vector<Code>& seq = found.prefix->seq();
  bool ok = true;
  Code horizon = static_cast<Code>(seq.size()) + 2;
  for (Code n = 0; n < seq.size(); ++n) {
    bool enters = eff_open_member(alex, chain.at(n + 1), seq[n], horizon).in;
    bool avoids = !eff_open_member(alex, chain.at(n), seq[n], horizon).in;
    ok = ok && enters && avoids;
    report["steps"].push_back({{"index", n},
                               {"separator", seq[n]},
                               {"strict", enters && avoids}});
  }
  BadSearch recovered = bad_from_ascending(q, alex, chain, o.len, o.budget);
  bool round = recovered.prefix.has_value() &&
               recovered.prefix->size() == o.len;
  report["recovered"] = round;
  if (recovered.prefix) report["recovered_prefix"] = recovered.prefix->seq();
  report["ok"] = ok && round;
  emit_report(o, report);
  return (ok && round) ? 0 : 1;
}

int run_verify_translate(const Options& o) {
  QuasiOrder q = load_order(o);
  auto bound = q.universe().bound();
  if (!bound || *bound > 8)
    throw SpecError("verify translate: needs a finite order of at most 8 elements");
  std::vector<Code> carrier;
  for (Code c = 0; c < *bound; ++c)
    if (q.contains(c)) carrier.push_back(c);

  // Every generator set of at most 3 generators drawn from the subsets of
  // size at most 3, against every x of size at most 3.
  std::vector<FinSubset> pool;
  std::size_t n = carrier.size();
  for (Code mask = 0; mask < (Code{1} << n); ++mask) {
    if (std::popcount(mask) > 3) continue;
    std::vector<Code> v;
    for (std::size_t b = 0; b < n; ++b)
      if (mask & (Code{1} << b)) v.push_back(carrier[b]);
    pool.push_back(FinSubset(std::move(v)));
  }

  json report = base_report(o, "verify translate");
  std::uint64_t checked = 0;
  bool ok = true;
  auto agree = [&](const std::vector<FinSubset>& gens) {
    FlatTranslation flat = translate_flat(q, gens);
    bool sharp_ok = true;
    for (const FinSubset& g : gens)
      if (g.empty()) sharp_ok = false;
    std::optional<ClosedCode> sharp;
    if (sharp_ok) sharp = translate_sharp(q, gens);
    Code horizon = sharp ? *sharp->stage_count() + 1 : 0;
    for (const FinSubset& x : pool) {
      bool direct_flat = false, direct_sharp = false;
      for (const FinSubset& g : gens) {
        direct_flat = direct_flat || flat_leq(q, x, g);
        direct_sharp = direct_sharp || sharp_leq(q, x, g);
      }
      ++checked;
      if (flat.membership(x).member != direct_flat) ok = false;
      if (sharp &&
          closed_member(*sharp, SymbolicSubset::fin(x, q), horizon).in !=
              direct_sharp)
        ok = false;
    }
  };
  for (std::size_t i = 0; i < pool.size() && ok; ++i) {
    agree({pool[i]});
    for (std::size_t j = i + 1; j < pool.size() && ok; ++j)
      agree({pool[i], pool[j]});
  }
  report["checked"] = checked;
  report["ok"] = ok;
  emit_report(o, report);
  return ok ? 0 : 1;
}

int run_verify_lemma43(const Options& o) {
  Injection f = load_injection(o);
  PosetWithPoint p = PosetWithPoint::point();
  if (!o.poset_arg.empty()) {
    OrderSpec spec = order_spec_from_json(load_json_arg(o.poset_arg, "--poset"));
    if (spec.kind != OrderSpec::Kind::Finite)
      throw SpecError("--poset must be a finite order spec");
    p = PosetWithPoint(spec.elements, spec.le, o.point);
  }
  XiOrder xi = xi_order(f, p, o.stages + 1);
  json report = base_report(o, "verify lemma43");
  report["injection"] = injection_to_json(f);
  bool ok = true;
  for (Code m = 1; m <= o.stages; ++m)
    for (Code n = 0; n < m; ++n)
      if (!lemma_placement_check(xi, n, m)) {
        ok = false;
        report["steps"].push_back({{"n", n}, {"m", m}, {"holds", false}});
      }
  report["ok"] = ok;
  emit_report(o, report);
  return ok ? 0 : 1;
}

int run_verify_decode(const Options& o) {
  Injection f = load_injection(o);
  json report = base_report(o, "verify decode");
  report["injection"] = injection_to_json(f);

  bool range_ok = true;
  for (Code n = 0; n < 50; ++n)
    if (range_member_decoded(f, n) != range_member_naive(f, n))
      range_ok = false;
  report["range_agrees"] = range_ok;

  XiOrder xi = xi_order(f, PosetWithPoint::point(), o.stages);
  QuasiOrder q = xi.as_quasi_order();
  std::size_t target = o.stages > 2 ? o.stages - 2 : 1;
  BadSearch found = find_bad_prefix(q, target, o.budget);
  bool decode_ok = true;
  if (found.prefix) {
    report["bad_prefix_len"] = found.prefix->size();
    for (Code n = 0; n < 20; ++n) {
      DecodeVerdict v = decode_from_bad(xi, *found.prefix, n,
                                        found.prefix->size());
      bool truly = is_true_exact(f, n);
      if (v == DecodeVerdict::True && !truly) decode_ok = false;
      if (v == DecodeVerdict::False && truly) decode_ok = false;
    }
  } else {
    report["bad_prefix_len"] = 0;
  }
  report["decode_consistent"] = decode_ok;
  report["ok"] = range_ok && decode_ok;
  emit_report(o, report);
  return (range_ok && decode_ok) ? 0 : 1;
}

int run_export_xi(const Options& o) {
  Injection f = load_injection(o);
  PosetWithPoint p = PosetWithPoint::point();
  if (!o.poset_arg.empty()) {
    OrderSpec spec = order_spec_from_json(load_json_arg(o.poset_arg, "--poset"));
    if (spec.kind != OrderSpec::Kind::Finite)
      throw SpecError("--poset must be a finite order spec");
    p = PosetWithPoint(spec.elements, spec.le, o.point);
  }
  XiOrder xi = xi_order(f, p, o.stages);
  if (o.format == "dot") {
    emit(o, xi_to_dot(xi));
  } else {
    json j{{"command", "export xi"},
           {"injection", injection_to_json(f)},
           {"stages", o.stages},
           {"anchors", anchor_log_to_json(xi)}};
    emit(o, j.dump(2));
  }
  return 0;
}

int run_export_truestages(const Options& o) {
  Injection f = load_injection(o);
  emit(o, true_stage_table_to_json(f, o.stages).dump());
  return 0;
}

int run_export_chain(const Options& o) {
  Injection f = load_injection(o);
  json report{{"command", "export chain"},
              {"mode", o.mode},
              {"injection", injection_to_json(f)},
              {"steps", json::array()}};
  if (o.mode == "flat") {
    FlatReversal rev(f, o.stages);
    for (Code s = 0; s < o.stages; ++s) {
      json step = separator_step_to_json(rev.separator(s));
      json gens = json::array();
      for (const FinSubset& g : rev.stage(s).e) gens.push_back(g.elems());
      step["generators"] = gens;
      report["steps"].push_back(std::move(step));
    }
  } else if (o.mode == "sharp") {
    SharpReversal rev(f, o.stages);
    for (Code s = 0; s < o.stages; ++s) {
      json step = separator_step_to_json(rev.separator(s));
      json gens = json::array();
      for (const FinSubset& g : rev.stage(s).e) gens.push_back(g.elems());
      step["generators"] = gens;
      report["steps"].push_back(std::move(step));
    }
  } else {
    throw SpecError("--mode must be flat or sharp");
  }
  emit(o, report.dump(2));
  return 0;
}

int run_search_bad(const Options& o) {
  QuasiOrder q = load_order(o);
  BadSearch found = find_bad_prefix(q, o.len, o.budget);
  json report{{"command", "search bad"},
              {"order", q.name()},
              {"len", o.len},
              {"budget", o.budget},
              {"expansions", found.expansions},
              {"found", found.prefix.has_value()},
              {"exhausted", found.exhausted}};
  if (found.prefix) report["prefix"] = found.prefix->seq();
  emit(o, report.dump(2));
  return found.prefix ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Executable well-quasi-order and Noetherian-topology toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--injection", o.injection_arg,
                    "injection JSON (file or inline)");
    cmd->add_option("--order", o.order_arg, "order spec JSON (file or inline)");
    cmd->add_option("--poset", o.poset_arg,
                    "finite poset spec JSON for xi (file or inline)");
    cmd->add_option("--point", o.point, "designated point of the poset");
    cmd->add_option("--stages", o.stages, "stage budget");
    cmd->add_option("--budget", o.budget, "search budget");
    cmd->add_option("--len", o.len, "target bad-prefix length");
    cmd->add_option("--format", o.format, "output format: json|dot|text");
    cmd->add_option("--seed", o.seed, "seed recorded in reports");
    cmd->add_option("--out", o.out_path, "output path (default stdout)");
    cmd->add_option("--mode", o.mode, "chain mode: flat|sharp");
  };

  CLI::App* verify = app.add_subcommand("verify", "run a verification");
  std::map<std::string, int (*)(const Options&)> verify_cmds{
      {"flat-chain", run_verify_flat_chain},
      {"sharp-chain", run_verify_sharp_chain},
      {"prop38", run_verify_prop38},
      {"translate", run_verify_translate},
      {"lemma43", run_verify_lemma43},
      {"decode", run_verify_decode}};
  for (auto& [name, fn] : verify_cmds) add_common(verify->add_subcommand(name));
  verify->require_subcommand(1);

  CLI::App* exp = app.add_subcommand("export", "export structures");
  std::map<std::string, int (*)(const Options&)> export_cmds{
      {"xi", run_export_xi},
      {"truestages", run_export_truestages},
      {"chain", run_export_chain}};
  for (auto& [name, fn] : export_cmds) add_common(exp->add_subcommand(name));
  exp->require_subcommand(1);

  CLI::App* search = app.add_subcommand("search", "bounded searches");
  add_common(search->add_subcommand("bad"));
  search->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    for (auto& [name, fn] : verify_cmds)
      if (verify->got_subcommand(name)) return fn(o);
    for (auto& [name, fn] : export_cmds)
      if (exp->got_subcommand(name)) return fn(o);
    if (search->got_subcommand("bad")) return run_search_bad(o);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const SpecError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CarrierError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const VerificationError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
