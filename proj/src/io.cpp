#include "qrep/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "qrep/bounds.hpp"
#include "qrep/errors.hpp"
#include "qrep/swap.hpp"

namespace qrep {

namespace {

constexpr double kCheckSlack = 1e-9;

// Round to 12 significant digits so that the serialised value has at most
// that many.
double r12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(r12(x)) : Json(nullptr); }

double field(const Json& j, const char* key, const std::string& kind) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ValidationError("state '" + kind + "': missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

bool same_state(const DensityOperator& a, const DensityOperator& b) {
  return a.dim() == b.dim() && max_abs_diff(a.matrix(), b.matrix()) == 0.0;
}

Json rule_to_json(const CorrectionRule& r) {
  if (!r.table.empty()) {
    Json t = Json::array();
    for (const auto& p : r.table) t.push_back(p.name());
    return Json{{"pauli", r.constant.name()}, {"product", r.product_of}, {"table_nodes", r.table_nodes},
                {"table", t}};
  }
  if (r.product_of.empty()) return r.constant.name();
  return Json{{"pauli", r.constant.name()}, {"product", r.product_of}};
}

CorrectionRule rule_from_json(const Json& j, int n_links) {
  if (j.is_string()) return CorrectionRule::fixed(pauli_from_string(j.get<std::string>()));
  if (!j.is_object()) throw ValidationError("protocol: a correction rule must be a Pauli name or an object");
  CorrectionRule r;
  if (j.contains("pauli")) r.constant = pauli_from_string(j.at("pauli").get<std::string>());
  if (j.contains("product")) {
    for (const auto& k : j.at("product")) {
      if (!k.is_number_integer()) throw ValidationError("protocol: product entries must be node indices");
      const int node = k.get<int>();
      if (node < 1 || node > n_links - 1)
        throw ValidationError("protocol: product refers to node " + std::to_string(node) +
                              ", valid nodes are 1.." + std::to_string(n_links - 1));
      r.product_of.push_back(node);
    }
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "pauli" && key != "product")
      throw ValidationError("protocol: unknown correction field '" + key + "'");
  }
  return r;
}

Json chain_bounds_check(const std::vector<double>& F, double average_fidelity) {
  const auto [lo, hi] = chain_fidelity_bounds(F);
  // Beyond two links the upper bound is only established for F_k >= 1/2.
  bool upper_applies = F.size() <= 2;
  if (!upper_applies) {
    upper_applies = true;
    for (double f : F) upper_applies = upper_applies && f >= 0.5;
  }
  const bool ok = average_fidelity >= lo - kCheckSlack &&
                  (!upper_applies || average_fidelity <= hi + kCheckSlack);
  return {{"lower", r12(lo)},
          {"upper", r12(hi)},
          {"upper_applies", upper_applies},
          {"average_fidelity", r12(average_fidelity)},
          {"ok", ok}};
}

}  // namespace

// --------------------------------------------------------------- states

PauliLabel pauli_from_string(const std::string& s) {
  if (s == "I") return {0, 0};
  if (s == "Z") return {0, 1};
  if (s == "X") return {1, 0};
  if (s == "XZ" || s == "Y") return {1, 1};
  throw ValidationError("unknown Pauli '" + s + "' (expected I, X, Z, XZ or Y)");
}

DensityOperator state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ValidationError("state descriptor must be an object with a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "werner") return werner_state(field(j, "F", kind));
  if (kind == "r_state") return r_state(field(j, "p", kind));
  if (kind == "s_state") return s_state(field(j, "p", kind));
  if (kind == "theta") return theta_state(field(j, "theta", kind));
  if (kind == "opt") return opt_state(field(j, "p", kind), field(j, "F", kind));
  if (kind == "bd") {
    if (!j.contains("lambda") || !j.at("lambda").is_array() || j.at("lambda").size() != 4)
      throw ValidationError("state 'bd': 'lambda' must be an array of 4 numbers");
    BellDiagonalCoeffs c;
    for (std::size_t k = 0; k < 4; ++k) c.lambda[k] = j.at("lambda").at(k).get<double>();
    return bd_state(c);
  }
  if (kind == "matrix") {
    if (!j.contains("entries") || !j.at("entries").is_array())
      throw ValidationError("state 'matrix': 'entries' must be an array of [re, im] pairs");
    const Json& e = j.at("entries");
    if (e.size() != 16) throw ValidationError("state 'matrix': expected 16 entries for two qubits");
    ComplexMatrix m(4);
    for (std::size_t k = 0; k < 16; ++k) {
      const Json& z = e.at(k);
      if (!z.is_array() || z.size() != 2) throw ValidationError("state 'matrix': entries must be [re, im]");
      m(k / 4, k % 4) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
    }
    return DensityOperator(m, default_pair());
  }
  throw ValidationError("unknown state kind '" + kind + "'");
}

Json state_to_json(const DensityOperator& rho) {
  Json e = Json::array();
  for (const auto& z : rho.matrix().entries()) e.push_back({r12(z.real()), r12(z.imag())});
  return {{"kind", "matrix"}, {"entries", e}};
}

Json bd_to_json(const BellDiagonalCoeffs& c) {
  return Json::array({r12(c[0]), r12(c[1]), r12(c[2]), r12(c[3])});
}

// ------------------------------------------------------------ protocols

SwapAndCorrectProtocol protocol_from_json(const Json& j, int n_links) {
  if (n_links < 2) throw ValidationError("protocol: need at least 2 links");
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "sequential") return builtin_protocol(BuiltinProtocol::sequential, n_links);
    if (s == "correct_at_end") return builtin_protocol(BuiltinProtocol::correct_at_end, n_links);
    throw ValidationError("protocol: unknown builtin '" + s + "'");
  }
  if (!j.is_object() || !j.contains("corrections"))
    throw ValidationError("protocol: expected a builtin name or an object with 'corrections'");
  SwapAndCorrectProtocol p;
  p.n_links = n_links;
  if (j.contains("bsm_order")) {
    p.bsm_order = j.at("bsm_order").get<std::vector<int>>();
  } else {
    for (int k = 1; k < n_links; ++k) p.bsm_order.push_back(k);
  }
  const Json& c = j.at("corrections");
  if (!c.is_array() || c.size() != static_cast<std::size_t>(n_links + 1))
    throw ValidationError("protocol: 'corrections' needs " + std::to_string(n_links + 1) +
                          " rules (nodes 0.." + std::to_string(n_links) + ")");
  for (const auto& r : c) p.corrections.push_back(rule_from_json(r, n_links));
  return p;
}

Json protocol_to_json(const SwapAndCorrectProtocol& p) {
  if (p.builtin) return *p.builtin == BuiltinProtocol::sequential ? "sequential" : "correct_at_end";
  Json c = Json::array();
  for (const auto& r : p.corrections) c.push_back(rule_to_json(r));
  return {{"bsm_order", p.bsm_order}, {"corrections", c}};
}

Json protocol_report_to_json(const ProtocolReport& r) {
  Json failing = Json::array();
  for (const auto& s : r.failing) {
    Json f = Json::array();
    for (const auto& l : s) f.push_back(l.name());
    failing.push_back(f);
  }
  return {{"valid", r.valid()},
          {"physical", r.physical},
          {"correct", r.correct},
          {"brute_force_checked", r.brute_force_checked},
          {"brute_force_ok", r.brute_force_ok},
          {"failing_syndromes", failing},
          {"message", r.message}};
}

// -------------------------------------------------------------- reports

Json swap_report(const DensityOperator& rho1, const DensityOperator& rho2) {
  Json out;
  out["links"] = Json::array();
  std::vector<double> F, P;
  for (const auto* r : {&rho1, &rho2}) {
    F.push_back(fidelity_to_pure(*r, bell_state(0, 0)));
    P.push_back(max_p(*r));
    out["links"].push_back({{"fidelity", r12(F.back())}, {"max_p", r12(P.back())},
                            {"bell_diagonal", bd_to_json(bd_twirl(*r))}});
  }
  const auto outcomes = swap_all_outcomes(rho1, rho2);
  Json list = Json::array();
  for (const auto& o : outcomes) {
    Json e{{"label", o.label.name()}, {"index", o.label.index()}, {"probability", r12(o.probability)},
           {"fidelity", number_or_null(o.fidelity)}};
    if (o.defined()) e["bell_diagonal"] = bd_to_json(bd_twirl(*o.state));
    list.push_back(e);
  }
  out["outcomes"] = list;
  const DensityOperator avg = nonpostselected_swap(rho1, rho2);
  const double favg = fidelity_to_pure(avg, bell_state(0, 0));
  out["average"] = {{"fidelity", r12(favg)}, {"bell_diagonal", bd_to_json(bd_twirl(avg))}};
  out["bd_prediction"] = bd_to_json(bd_swap(bd_twirl(rho1), bd_twirl(rho2)));

  Json checks;
  checks["chain_bounds"] = chain_bounds_check(F, favg);
  bool ok = checks["chain_bounds"]["ok"].get<bool>();
  if (std::abs(F[0] - F[1]) <= 1e-12) {
    // Both links lie in S_{p,F} with the smaller of the two p values.
    const double p = std::min(std::min(P[0], P[1]), F[0]);
    const double hi = f_max(p, F[0]), lo = f_min_analytic(p, F[0]);
    bool in = true;
    for (const auto& o : outcomes)
      if (o.defined()) in = in && o.fidelity <= hi + kCheckSlack && o.fidelity >= lo - kCheckSlack;
    checks["postselected_bounds"] = {{"p", r12(p)}, {"F", r12(F[0])}, {"f_min_analytic", r12(lo)},
                                     {"f_max", r12(hi)}, {"ok", in}};
    ok = ok && in;
  }
  checks["ok"] = ok;
  out["checks"] = checks;
  return out;
}

Json chain_report(const std::vector<DensityOperator>& links, const SwapAndCorrectProtocol& p) {
  const int n = static_cast<int>(links.size());
  if (n != p.n_links) throw ValidationError("chain: protocol is for " + std::to_string(p.n_links) +
                                            " links but " + std::to_string(n) + " were given");
  Json out;
  out["n_links"] = n;
  out["protocol"] = protocol_to_json(p);
  const ProtocolReport rep = validate_protocol(p);
  out["validation"] = protocol_report_to_json(rep);
  if (!rep.valid()) {
    out["valid"] = false;
    return out;
  }
  out["valid"] = true;
  bool identical = true;
  for (const auto& l : links) identical = identical && same_state(l, links.front());
  const OutcomeDistribution dist =
      identical ? outcome_distribution(links.front(), n, p) : outcome_distribution(links, p);
  Json list = Json::array();
  for (const auto& e : dist.entries)
    list.push_back({{"probability", r12(e.probability)},
                    {"syndromes", e.syndromes},
                    {"fidelity", r12(e.fidelity)},
                    {"bell_diagonal", bd_to_json(bd_twirl(e.state))}});
  out["outcomes"] = list;
  out["merged"] = identical;
  out["zero_probability_syndromes"] = dist.zero_probability_syndromes;
  const DensityOperator avg = dist.average();
  const double favg = fidelity_to_pure(avg, bell_state(0, 0));
  out["average"] = {{"fidelity", r12(favg)}, {"bell_diagonal", bd_to_json(bd_twirl(avg))}};
  std::vector<BellDiagonalCoeffs> c;
  std::vector<double> F;
  for (const auto& l : links) {
    c.push_back(bd_twirl(l));
    F.push_back(c.back().fidelity());
  }
  const BellDiagonalCoeffs pred = bd_chain(c);
  out["bd_prediction"] = bd_to_json(pred);
  Json checks;
  checks["chain_bounds"] = chain_bounds_check(F, favg);
  const double dev = bd_twirl(avg).max_abs_diff(pred);
  checks["bd_equivalence"] = {{"max_abs_diff", r12(dev)}, {"ok", dev <= 1e-10}};
  checks["ok"] = checks["chain_bounds"]["ok"].get<bool>() && dev <= 1e-10;
  out["checks"] = checks;
  return out;
}

std::string dump_json(const Json& j) { return j.dump(2); }

}  // namespace qrep
