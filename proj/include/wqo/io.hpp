#pragma once

#include <sstream>

#include <json.hpp>

#include "wqo/reversal.hpp"
#include "wqo/topology.hpp"

namespace wqo {

using nlohmann::json;

namespace detail {

inline Code code_from_json(const json& v, const char* what) {
  if (v.is_number_unsigned()) return v.get<Code>();
  if (v.is_number_integer()) {
    auto s = v.get<std::int64_t>();
    if (s >= 0) return static_cast<Code>(s);
  }
  throw SpecError(std::string(what) + ": expected a non-negative integer");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Order specs

inline OrderSpec order_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw SpecError("order spec: expected an object with a \"kind\" string");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "omega") return OrderSpec::omega();
  if (kind == "omega_star") return OrderSpec::omega_star();
  if (kind == "antichain") return OrderSpec::antichain();
  if (kind == "rado") return OrderSpec::rado();
  if (kind == "finite") {
    if (!j.contains("elements"))
      throw SpecError("finite order spec: missing \"elements\"");
    Code n = detail::code_from_json(j["elements"], "finite order spec");
    std::vector<std::pair<Code, Code>> le;
    if (j.contains("le")) {
      for (const json& e : j["le"]) {
        if (!e.is_array() || e.size() != 2)
          throw SpecError("finite order spec: \"le\" entries are pairs");
        le.emplace_back(detail::code_from_json(e[0], "finite order spec"),
                        detail::code_from_json(e[1], "finite order spec"));
      }
    }
    return OrderSpec::finite(n, std::move(le));
  }
  if (kind == "sum" || kind == "product") {
    if (!j.contains("left") || !j.contains("right"))
      throw SpecError(kind + " order spec: missing \"left\"/\"right\"");
    OrderSpec l = order_spec_from_json(j["left"]);
    OrderSpec r = order_spec_from_json(j["right"]);
    return kind == "sum" ? OrderSpec::sum(std::move(l), std::move(r))
                         : OrderSpec::product(std::move(l), std::move(r));
  }
  throw SpecError("order spec: unknown kind \"" + kind + "\"");
}

inline json order_spec_to_json(const OrderSpec& s) {
  using Kind = OrderSpec::Kind;
  switch (s.kind) {
    case Kind::Omega: return {{"kind", "omega"}};
    case Kind::OmegaStar: return {{"kind", "omega_star"}};
    case Kind::Antichain: return {{"kind", "antichain"}};
    case Kind::Rado: return {{"kind", "rado"}};
    case Kind::Finite: {
      json le = json::array();
      for (auto& [a, b] : s.le) le.push_back({a, b});
      return {{"kind", "finite"}, {"elements", s.elements}, {"le", le}};
    }
    case Kind::Sum:
      return {{"kind", "sum"},
              {"left", order_spec_to_json(*s.left)},
              {"right", order_spec_to_json(*s.right)}};
    case Kind::Product:
      return {{"kind", "product"},
              {"left", order_spec_to_json(*s.left)},
              {"right", order_spec_to_json(*s.right)}};
  }
  throw SpecError("order spec: unknown kind");
}

// ---------------------------------------------------------------------------
// Injections

inline Injection injection_from_json(const json& j) {
  if (!j.is_object() || !j.contains("table") || !j.contains("tail_offset"))
    throw SpecError("injection: expected {\"table\": [...], \"tail_offset\": k}");
  std::vector<Code> table;
  for (const json& v : j["table"])
    table.push_back(detail::code_from_json(v, "injection table"));
  return Injection(std::move(table),
                   detail::code_from_json(j["tail_offset"], "tail_offset"));
}

inline json injection_to_json(const Injection& f) {
  return {{"table", f.table()}, {"tail_offset", f.tail_offset()}};
}

// ---------------------------------------------------------------------------
// Symbolic subsets

inline SymbolicSubset symbolic_from_json(const json& j, const QuasiOrder& o) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("set"))
    throw SpecError("symbolic subset: expected {\"shape\": ..., \"set\": [...]}");
  std::vector<Code> v;
  for (const json& c : j["set"])
    v.push_back(detail::code_from_json(c, "symbolic subset"));
  FinSubset f(std::move(v));
  std::string shape = j["shape"].get<std::string>();
  using S = SymbolicSubset::Shape;
  S s;
  if (shape == "fin") s = S::Fin;
  else if (shape == "up") s = S::Up;
  else if (shape == "down") s = S::Down;
  else if (shape == "co_up") s = S::CoUp;
  else if (shape == "co_down") s = S::CoDown;
  else throw SpecError("symbolic subset: unknown shape \"" + shape + "\"");
  return SymbolicSubset(s, std::move(f), o);
}

inline json symbolic_to_json(const SymbolicSubset& x) {
  const char* shape = nullptr;
  using S = SymbolicSubset::Shape;
  switch (x.shape()) {
    case S::Fin: shape = "fin"; break;
    case S::Up: shape = "up"; break;
    case S::Down: shape = "down"; break;
    case S::CoUp: shape = "co_up"; break;
    case S::CoDown: shape = "co_down"; break;
  }
  return {{"shape", shape}, {"set", x.generators().elems()}};
}

// ---------------------------------------------------------------------------
// Open and closed codes (finitely presented form)

inline OpenCode open_code_from_json(const json& j) {
  if (!j.is_object() || !j.contains("stages"))
    throw SpecError("open code: expected {\"stages\": [[i,...],...]}");
  std::vector<std::vector<Code>> stages;
  for (const json& st : j["stages"]) {
    std::vector<Code> indices;
    for (const json& i : st)
      indices.push_back(detail::code_from_json(i, "open code"));
    stages.push_back(std::move(indices));
  }
  return OpenCode::from_lists(std::move(stages));
}

inline ClosedCode closed_code_from_json(const json& j, PowerSpace space) {
  if (!j.is_object() || !j.contains("stages"))
    throw SpecError("closed code: expected {\"stages\": [[[q,...],...],...]}");
  std::vector<std::vector<FinSubset>> stages;
  for (const json& st : j["stages"]) {
    std::vector<FinSubset> indices;
    for (const json& i : st) {
      std::vector<Code> v;
      for (const json& c : i)
        v.push_back(detail::code_from_json(c, "closed code"));
      indices.push_back(FinSubset(std::move(v)));
    }
    stages.push_back(std::move(indices));
  }
  return ClosedCode::from_lists(std::move(space), std::move(stages));
}

// ---------------------------------------------------------------------------
// Reports

inline json separator_step_to_json(const SeparatorStep& step) {
  json j{{"index", step.s},
         {"case", step.case_i ? "i" : "ii"},
         {"separator", step.witness.elems()},
         {"strict", true}};
  if (step.n0) j["n0"] = *step.n0;
  return j;
}

inline json true_stage_table_to_json(const Injection& f, Code stages) {
  json rows = json::array();
  for (Code s = 0; s < stages; ++s)
    rows.push_back(true_set_at(f, s).members.elems());
  return rows;
}

inline json step_report_to_json(const StepReport& r) {
  json j{{"index", r.position},
         {"status", r.grew ? "strict" : "equal_on_sample"}};
  if (r.grew) j["separator"] = r.witness;
  return j;
}

// ---------------------------------------------------------------------------
// DOT export of the stage-bounded Xi structure

/// Emits the Hasse-like digraph of Xi up to the stage bound: solid edges
/// form the transitive reduction of the strict order, dashed edges record
/// each copy's anchor, annotated Above/Below. Deterministic output.
inline std::string xi_to_dot(const XiOrder& xi) {
  Code stages = xi.stage_bound();
  Code psize = xi.poset().size();
  std::vector<XiElement> nodes;
  for (Code n = 0; n < stages; ++n)
    for (Code p = 0; p < psize; ++p) nodes.push_back({n, p});

  auto strictly_less = [&](XiElement a, XiElement b) {
    return xi.leq(a, b) && !xi.leq(b, a);
  };

  std::ostringstream out;
  out << "digraph xi {\n  rankdir=BT;\n";
  for (const XiElement& e : nodes)
    out << "  n" << e.stage << "_" << e.point << " [label=\"(" << e.stage
        << "," << e.point << ")\"];\n";
  // Transitive reduction: a -> b iff a < b with nothing strictly between.
  for (const XiElement& a : nodes)
    for (const XiElement& b : nodes) {
      if (!strictly_less(a, b)) continue;
      bool covered = false;
      for (const XiElement& c : nodes)
        if (strictly_less(a, c) && strictly_less(c, b)) {
          covered = true;
          break;
        }
      if (!covered)
        out << "  n" << a.stage << "_" << a.point << " -> n" << b.stage << "_"
            << b.point << ";\n";
    }
  for (Code s = 1; s < stages; ++s) {
    const AnchorRecord& rec = xi.anchors().for_copy(s);
    out << "  n" << s << "_" << xi.poset().x() << " -> n" << rec.anchor_stage
        << "_" << xi.poset().x() << " [style=dashed, label=\""
        << (rec.dir == AnchorRecord::Dir::Above ? "above" : "below")
        << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

inline json anchor_log_to_json(const XiOrder& xi) {
  json rows = json::array();
  for (Code s = 1; s < xi.stage_bound(); ++s) {
    const AnchorRecord& rec = xi.anchors().for_copy(s);
    rows.push_back(
        {{"stage", s},
         {"anchor", rec.anchor_stage},
         {"dir", rec.dir == AnchorRecord::Dir::Above ? "above" : "below"}});
  }
  return rows;
}

}  // namespace wqo
