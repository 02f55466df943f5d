#include <gtest/gtest.h>

#include <cmath>

#include "qrep/errors.hpp"
#include "qrep/io.hpp"
#include "qrep/swap.hpp"

using namespace qrep;

TEST(Io, StateDescriptors) {
  EXPECT_LT(max_abs_diff(state_from_json(Json::parse(R"({"kind": "werner", "F": 0.9})")).matrix(),
                         werner_state(0.9).matrix()),
            1e-15);
  EXPECT_LT(max_abs_diff(state_from_json(Json::parse(R"({"kind": "r_state", "p": 0.9})")).matrix(),
                         r_state(0.9).matrix()),
            1e-15);
  EXPECT_LT(max_abs_diff(state_from_json(Json::parse(R"({"kind": "opt", "p": 0.5, "F": 0.95})")).matrix(),
                         opt_state(0.5, 0.95).matrix()),
            1e-15);
  const DensityOperator bd = state_from_json(Json::parse(R"({"kind": "bd", "lambda": [0.9, 0.1, 0, 0]})"));
  EXPECT_NEAR(bd_twirl(bd)[1], 0.1, 1e-15);
  // A matrix descriptor reproduces the state it was written from.
  const DensityOperator t = theta_state(0.4);
  EXPECT_LT(max_abs_diff(state_from_json(state_to_json(t)).matrix(), t.matrix()), 1e-11);
}

TEST(Io, MalformedDescriptorsNameTheField) {
  try {
    state_from_json(Json::parse(R"({"kind": "werner"})"));
    FAIL() << "no exception";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("'F'"), std::string::npos);
  }
  EXPECT_THROW(state_from_json(Json::parse(R"({"kind": "nope"})")), ValidationError);
  EXPECT_THROW(state_from_json(Json::parse(R"({"kind": "bd", "lambda": [0.5, 0.6, 0, 0]})")), Error);
  EXPECT_THROW(state_from_json(Json::parse(R"({"kind": "matrix", "entries": [[1, 0]]})")), Error);
}

TEST(Io, ProtocolRoundTrip) {
  const Json custom = Json::parse(R"({"bsm_order": [2, 1],
      "corrections": ["I", "I", "I", {"pauli": "I", "product": [1, 2]}]})");
  const SwapAndCorrectProtocol p = protocol_from_json(custom, 3);
  EXPECT_TRUE(validate_protocol(p).valid());
  EXPECT_EQ(protocol_to_json(p), custom);
  EXPECT_EQ(protocol_to_json(protocol_from_json("sequential", 4)), Json("sequential"));
  EXPECT_THROW(protocol_from_json(Json::parse(R"({"corrections": ["I", "I"]})"), 3), ValidationError);
  EXPECT_THROW(protocol_from_json(Json::parse(R"({"corrections": ["I", "I", "I", {"product": [3]}]})"), 3),
               ValidationError);
  EXPECT_EQ(pauli_from_string("Y"), pauli_from_string("XZ"));
  EXPECT_THROW(pauli_from_string("Q"), ValidationError);
}

TEST(Io, SwapReportOfThetaStates) {
  const DensityOperator t = theta_state(M_PI / 6.0);
  const Json r = swap_report(t, t);
  double odd = 0.0;
  for (const auto& o : r["outcomes"]) {
    const std::string label = o["label"];
    if (label == "X" || label == "XZ") {
      odd += o["probability"].get<double>();
      EXPECT_NEAR(o["fidelity"].get<double>(), 1.0, 1e-12);
    }
  }
  EXPECT_NEAR(odd, 0.375, 1e-12);
  EXPECT_TRUE(r["checks"]["ok"].get<bool>());
}

TEST(Io, ChainReports) {
  const DensityOperator l = state_from_json(Json::parse(R"({"kind": "bd", "lambda": [0.9, 0.1, 0, 0]})"));
  const Json r = chain_report({l, l, l}, builtin_protocol(BuiltinProtocol::correct_at_end, 3));
  EXPECT_NEAR(r["average"]["fidelity"].get<double>(), 0.756, 1e-12);
  EXPECT_TRUE(r["checks"]["ok"].get<bool>());
  EXPECT_TRUE(r["merged"].get<bool>());

  const DensityOperator perfect = werner_state(1.0);
  const Json q = chain_report({perfect, perfect, perfect, perfect},
                              builtin_protocol(BuiltinProtocol::sequential, 4));
  for (const auto& o : q["outcomes"]) EXPECT_EQ(o["fidelity"].get<double>(), 1.0);

  // An incorrect protocol is reported, not run.
  const Json bad = chain_report(
      {l, l, l}, protocol_from_json(Json::parse(R"({"corrections": ["I", "I", "I", "I"]})"), 3));
  EXPECT_FALSE(bad["valid"].get<bool>());
  EXPECT_FALSE(bad.contains("outcomes"));
  EXPECT_FALSE(bad["validation"]["failing_syndromes"].empty());
}

TEST(Io, NumbersHaveTwelveSignificantDigits) {
  const Json r = swap_report(werner_state(0.9), werner_state(0.8));
  // 0.72 + 0.02 / 3 = 0.72666...
  const std::string text = dump_json(r);
  EXPECT_NE(text.find("0.726666666667"), std::string::npos) << text;
}
