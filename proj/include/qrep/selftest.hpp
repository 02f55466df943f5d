#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qrep/random.hpp"

namespace qrep {

struct SelftestOptions {
  std::uint64_t seed = kDefaultSeed;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  double seconds = 0.0;
  std::vector<std::string> failures;                     // first few, with context
  std::vector<std::pair<std::string, double>> metrics;   // worst-case residuals etc.
  int checks = 0;
};

// Module invariant suites: qcore, states, swap, chain, sdp, bounds, qkd.
const std::vector<std::string>& selftest_suite_names();
// Throws DomainError for an unknown name.
SuiteResult run_suite(const std::string& name, const SelftestOptions& o = {});
std::vector<SuiteResult> run_selftest(const SelftestOptions& o = {});

}  // namespace qrep
