#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qrep/chain.hpp"
#include "qrep/states.hpp"

namespace qrep {

using Json = nlohmann::json;

// State descriptors:
//   {"kind": "werner", "F": f}        {"kind": "r_state", "p": p}
//   {"kind": "s_state", "p": p}       {"kind": "theta", "theta": t}
//   {"kind": "opt", "p": p, "F": f}   {"kind": "bd", "lambda": [l00, l01, l10, l11]}
//   {"kind": "matrix", "entries": [[re, im], ...]}   (row-major, 16 entries)
// Malformed descriptors throw ValidationError naming the offending field.
DensityOperator state_from_json(const Json& j);
Json state_to_json(const DensityOperator& rho);  // always the "matrix" kind
Json bd_to_json(const BellDiagonalCoeffs& c);

// "I", "X", "Z", "XZ" (alias "Y", equal up to phase).
PauliLabel pauli_from_string(const std::string& s);

// Protocols: "sequential", "correct_at_end", or
//   {"bsm_order": [k, ...],            optional, default 1..N-1
//    "corrections": [rule_0, ..., rule_N]}
// where a rule is a Pauli name or {"pauli": name, "product": [node, ...]}:
// the correction is pauli * prod of the listed syndrome entries.
SwapAndCorrectProtocol protocol_from_json(const Json& j, int n_links);
Json protocol_to_json(const SwapAndCorrectProtocol& p);
Json protocol_report_to_json(const ProtocolReport& r);

// All four outcomes of a two-link swap with probabilities, fidelities and
// Bell-diagonal coefficients, the averaged output, and bound checks.
Json swap_report(const DensityOperator& rho1, const DensityOperator& rho2);
// Syndrome-resolved chain outputs (merged for identical links), averaged
// output, Bell-diagonal prediction and bound checks.  An invalid protocol
// yields only the validation report with "valid": false.
Json chain_report(const std::vector<DensityOperator>& links, const SwapAndCorrectProtocol& p);

// Writes numbers with 12 significant digits.
std::string dump_json(const Json& j);

}  // namespace qrep
