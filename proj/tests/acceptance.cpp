// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.  Bound and key-rate curves are compared against the CSV
// goldens in tests/golden (regenerate with --write-goldens).
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qrep/bounds.hpp"
#include "qrep/chain.hpp"
#include "qrep/qkd.hpp"
#include "qrep/random.hpp"
#include "qrep/states.hpp"
#include "qrep/swap.hpp"

#ifndef QREP_GOLDEN_DIR
#define QREP_GOLDEN_DIR "tests/golden"
#endif

namespace fs = std::filesystem;
using namespace qrep;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

struct Config {
  fs::path golden_dir = QREP_GOLDEN_DIR;
  bool write_goldens = false;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double max_diff(const BellDiagonalCoeffs& a, const BellDiagonalCoeffs& b) { return a.max_abs_diff(b); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(lo + (hi - lo) * k / (n - 1));
  v.back() = hi;  // no round-off past the end point
  return v;
}

std::vector<std::vector<double>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

// Compares `fresh` against a golden file column by column.  Returns an empty
// string on agreement, else a description of the first mismatch.
std::string compare_golden(const Config& cfg, const std::string& name, const std::string& header,
                           const std::vector<std::string>& fresh_lines, const std::vector<double>& tol) {
  const fs::path path = cfg.golden_dir / name;
  if (cfg.write_goldens) {
    fs::create_directories(cfg.golden_dir);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << header << "\n";
    for (const auto& l : fresh_lines) out << l << "\n";
    return "";
  }
  if (!fs::exists(path)) return "missing golden " + path.string();
  const auto golden = read_csv(path);
  if (golden.size() != fresh_lines.size()) return name + ": row count differs";
  for (std::size_t r = 0; r < golden.size(); ++r) {
    std::vector<double> row;
    std::stringstream ss(fresh_lines[r]);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != golden[r].size()) return name + ": column count differs";
    for (std::size_t c = 0; c < row.size(); ++c)
      if (std::abs(row[c] - golden[r][c]) > tol[std::min(c, tol.size() - 1)])
        return name + ": row " + std::to_string(r + 1) + " column " + std::to_string(c + 1) + " differs by " +
               fmt("%.3e", std::abs(row[c] - golden[r][c]));
  }
  return "";
}

// ------------------------------------------------------------------- 1

Result bd_swap_exactness() {
  Rng rng(kDefaultSeed + 1);
  double coeff = 0.0, prob = 0.0;
  for (int t = 0; t < 200; ++t) {
    const BellDiagonalCoeffs a = random_bd(rng), b = random_bd(rng);
    const BellDiagonalCoeffs expect = bd_swap(a, b);
    for (const auto& o : swap_all_outcomes(a.reconstruct(), b.reconstruct())) {
      prob = std::max(prob, std::abs(o.probability - 0.25));
      coeff = std::max(coeff, max_abs_diff(o.state->matrix(), expect.reconstruct().matrix()));
      coeff = std::max(coeff, max_diff(bd_twirl(*o.state), expect));
    }
  }
  return {coeff <= 1e-12 && prob <= 1e-12,
          "max state residual " + fmt("%.2e", coeff) + ", max |p - 1/4| " + fmt("%.2e", prob)};
}

// ------------------------------------------------------------------- 2

Result chain_equivalence() {
  Rng rng(kDefaultSeed + 2);
  double worst = 0.0;
  int invalid = 0;
  for (int n : {3, 4})
    for (int t = 0; t < 50; ++t) {
      std::vector<DensityOperator> links;
      std::vector<BellDiagonalCoeffs> coeffs;
      for (int k = 0; k < n; ++k) {
        links.push_back(random_density(rng));
        coeffs.push_back(bd_twirl(links.back()));
      }
      const BellDiagonalCoeffs expect = bd_chain(coeffs);
      for (int q = 0; q < 10; ++q) {
        const SwapAndCorrectProtocol p = random_valid_protocol(n, rng);
        if (!validate_protocol(p).valid()) ++invalid;
        worst = std::max(worst, max_diff(bd_twirl(run_chain_nonpostselected(links, p)), expect));
      }
    }
  return {worst <= 1e-10 && invalid == 0,
          "max residual " + fmt("%.2e", worst) + " over 1000 (links, protocol) pairs" +
              (invalid ? ", " + std::to_string(invalid) + " invalid protocols" : "")};
}

// ------------------------------------------------------------------- 3

Result saturation() {
  double worst = 0.0;
  for (double F : linspace(0.5, 1.0, 20))
    for (double x : linspace(0.0, 1.0, 20)) {
      const double p = F * x;
      const DensityOperator s = opt_state(p, F);
      const SwapOutcome o = postselected_swap(s, s, opt_saturating_label());
      worst = std::max(worst, std::abs(o.fidelity - f_max(p, F)));
    }
  return {worst <= 1e-10, "max |F' - f_max| " + fmt("%.2e", worst) + " at label " + opt_saturating_label().name()};
}

// ------------------------------------------------------------------- 4

Result bound_ordering(const Config& cfg) {
  struct Grid {
    std::string name;
    std::vector<std::pair<double, double>> points;
  };
  std::vector<Grid> grids;
  for (double F : {0.75, 0.9}) {
    Grid g{"bounds_fixF_" + fmt("%.12g", F) + ".csv", {}};
    for (double p : linspace(0.0, F, 100)) g.points.emplace_back(p, F);
    grids.push_back(g);
  }
  Grid g5{"bounds_fixP_0.csv", {}};
  for (double F : linspace(0.5, 1.0, 100)) g5.points.emplace_back(0.0, F);
  grids.push_back(g5);

  std::string problems;
  int rows = 0;
  for (const auto& g : grids) {
    const auto sweep = bound_sweep(g.points);
    std::vector<std::string> lines;
    for (const auto& r : sweep) {
      ++rows;
      const std::string bad = r.ordering_violation(1e-6);
      if (!bad.empty() && problems.empty())
        problems = g.name + " p=" + fmt("%.6g", r.p) + " F=" + fmt("%.6g", r.F) + ": " + bad;
      lines.push_back(bound_csv_line(r));
    }
    // Closed-form columns must agree to print precision; SDP values to 1e-6;
    // the argmin delta* of a flat minimum only to 1e-3.
    const std::vector<double> tol = {1e-11, 1e-11, 1e-11, 1e-11, 1e-6, 1e-3, 1e-11, 1e-11, 1e-11, 1e-11};
    const std::string g_bad = compare_golden(cfg, g.name, bound_csv_header(), lines, tol);
    if (!g_bad.empty() && problems.empty()) problems = g_bad;
  }
  return {problems.empty(), problems.empty() ? std::to_string(rows) + " rows ordered and match goldens" : problems};
}

// ------------------------------------------------------------------- 5

Result upper_bound_tightness() {
  double gap = 0.0, dd = 0.0;
  for (double F : {0.6, 0.7, 0.8, 0.9, 0.95})
    for (double p : {0.1, 0.2, 0.3, 0.4, 0.5}) {
      const SdpBound b = f_max_sdp(p, F);
      gap = std::max(gap, std::abs(b.bound - f_max(p, F)));
      dd = std::max(dd, std::abs(b.delta_star - 0.25));
    }
  return {gap <= 1e-5 && dd <= 1e-4, "max |f_max_sdp - f_max| " + fmt("%.2e", gap) + ", max |delta* - 1/4| " +
                                         fmt("%.2e", dd)};
}

// ------------------------------------------------------------------- 6

Result curve_endpoints() {
  double flat = 0.0, ends = 0.0;
  for (double F : {0.6, 0.75, 0.95}) {
    const auto curve = fidelity_vs_delta(0.0, F, 41);
    for (const auto& c : curve)
      if (c.delta <= 0.25) flat = std::max(flat, std::abs(c.upper - 1.0));
    ends = std::max(ends, std::abs(curve.front().upper - curve.front().lower));
    ends = std::max(ends, std::abs(curve.back().upper - curve.back().lower));
  }
  return {flat <= 1e-5 && ends <= 1e-4,
          "max |upper - 1| for delta <= 1/4 " + fmt("%.2e", flat) + ", endpoint gap " + fmt("%.2e", ends)};
}

// ------------------------------------------------------------------- 7

Result monte_carlo_sandwich() {
  Rng rng(kDefaultSeed + 7);
  double below = 0.0, above = 0.0;
  long samples = 0;
  for (double F : {0.6, 0.7, 0.8, 0.9, 0.95})
    for (double x : {0.0, 0.25, 0.5, 0.75, 0.9}) {
      const double p = F * x;
      const double lo = f_min_sdp(p, F).bound, hi = f_max(p, F);
      const double ft = noise_fidelity(p, F);
      for (int t = 0; t < 10000; ++t) {
        const NoisyDecomposition d1{p, F, random_with_fidelity(ft, rng)};
        const NoisyDecomposition d2{p, F, random_with_fidelity(ft, rng)};
        const SwapStats s = noisy_swap_stats(d1, d2, PauliLabel{});
        if (!(s.probability > 1e-14)) continue;
        ++samples;
        below = std::max(below, lo - s.fidelity);
        above = std::max(above, s.fidelity - hi);
      }
    }
  return {below <= 1e-6 && above <= 1e-9, std::to_string(samples) + " samples, worst excess below " +
                                              fmt("%.2e", below) + ", above " + fmt("%.2e", above)};
}

// ------------------------------------------------------------------- 8

Result qkd_reproduction(const Config& cfg) {
  const DensityOperator opt = opt_state(0.5, 0.95);
  const auto rows = qkd_sweep(opt, 2, 14);
  double closed = 0.0, convex = 0.0;
  for (const auto& r : rows) {
    closed = std::max(closed, std::abs(r.skf_bd - opt_chain_skf_closed_form(0.95, r.n)));
    closed = std::max(closed, std::abs(chain_skf(opt, r.n, SkfMode::nonpostselected) -
                                       opt_chain_skf_closed_form(0.95, r.n)));
    convex = std::max(convex, r.skf_bd - r.skf_postselected);
  }
  const double w3 = chain_skf(opt, 3, SkfMode::werner_approx), w4 = chain_skf(opt, 4, SkfMode::werner_approx);
  const auto r_rows = qkd_sweep(r_state(0.95), 2, 14);
  double r_gap = 0.0;
  for (const auto& r : r_rows) r_gap = std::max(r_gap, std::abs(r.skf_postselected - r.skf_bd));

  std::vector<std::string> opt_lines, r_lines;
  for (const auto& r : rows) opt_lines.push_back(qkd_csv_line(r));
  for (const auto& r : r_rows) r_lines.push_back(qkd_csv_line(r));
  const std::vector<double> tol = {0.0, 1e-9};
  std::string golden = compare_golden(cfg, "qkd_opt_p0.5_F0.95.csv", qkd_csv_header(), opt_lines, tol);
  if (golden.empty()) golden = compare_golden(cfg, "qkd_r_state_p0.95.csv", qkd_csv_header(), r_lines, tol);

  const bool ok = closed <= 1e-9 && convex <= 1e-12 && w3 > 0.0 && w4 == 0.0 && r_gap <= 0.01 && golden.empty();
  return {ok, "closed-form residual " + fmt("%.2e", closed) + ", postselection deficit " + fmt("%.2e", convex) +
                  ", Werner n=3 " + fmt("%.4f", w3) + " n=4 " + fmt("%g", w4) + ", R-state gap " +
                  fmt("%.4f", r_gap) + (golden.empty() ? "" : "; " + golden)};
}

// ------------------------------------------------------------------- 9

// Random Bell-diagonal coefficients conditioned on fidelity >= 1/2.
BellDiagonalCoeffs random_bd_above_half(Rng& rng) {
  for (;;) {
    const BellDiagonalCoeffs c = random_bd(rng);
    if (c.fidelity() >= 0.5) return c;
  }
}

double chain_fidelity(const std::vector<DensityOperator>& links) {
  const int n = static_cast<int>(links.size());
  return fidelity_to_pure(run_chain_nonpostselected(links, builtin_protocol(BuiltinProtocol::correct_at_end, n)),
                          bell_state(0, 0));
}

// The upper bound is proved by induction through (2F_k - 1) >= 0, so the
// criterion samples links with F_k >= 1/2.  Chains with arbitrary fidelities
// are checked too and their violations reported, not counted.
Result chain_bounds() {
  Rng rng(kDefaultSeed + 9);
  double outside = 0.0, attained = 0.0;
  for (int t = 0; t < 500; ++t) {
    const int n = 2 + t % 4;
    std::vector<DensityOperator> links;
    std::vector<double> F;
    for (int k = 0; k < n; ++k) {
      const BellDiagonalCoeffs c = random_bd_above_half(rng);
      links.push_back(c.reconstruct());
      F.push_back(c.fidelity());
    }
    const double f = chain_fidelity(links);
    const auto [lo, hi] = chain_fidelity_bounds(F);
    outside = std::max({outside, lo - f, f - hi});

    // Rank-two links sharing one error type reach the upper bound.
    std::vector<DensityOperator> matched;
    for (double x : F) {
      BellDiagonalCoeffs c;
      c.lambda = {x, 1.0 - x, 0.0, 0.0};
      matched.push_back(c.reconstruct());
    }
    attained = std::max(attained, std::abs(chain_fidelity(matched) - hi));
  }
  int unrestricted = 0;
  for (int t = 0; t < 500; ++t) {
    const int n = 2 + t % 4;
    std::vector<BellDiagonalCoeffs> c;
    std::vector<double> F;
    for (int k = 0; k < n; ++k) {
      c.push_back(random_bd(rng));
      F.push_back(c.back().fidelity());
    }
    const auto [lo, hi] = chain_fidelity_bounds(F);
    const double f = bd_chain(c).fidelity();
    if (f < lo - 1e-10 || f > hi + 1e-10) ++unrestricted;
  }
  return {outside <= 1e-10 && attained <= 1e-12,
          "max excursion outside bounds " + fmt("%.2e", std::max(outside, 0.0)) + ", upper-bound attainment " +
              fmt("%.2e", attained) + " (F_k >= 1/2; " + std::to_string(unrestricted) +
              "/500 unrestricted chains exceed the upper bound)"};
}

// ------------------------------------------------------------------ 10

Result werner_accuracy() {
  Rng rng(kDefaultSeed + 10);
  double worst_ratio = 0.0;
  for (int t = 0; t < 400; ++t) {
    const int n = 2 + t % 4;
    std::vector<DensityOperator> links;
    std::vector<double> F;
    double eps = 0.0;
    for (int k = 0; k < n; ++k) {
      const double e = rng.uniform(0.0, 0.01);
      links.push_back(random_with_fidelity(1.0 - e, rng));
      F.push_back(1.0 - e);
      eps = std::max(eps, e);
    }
    const double f = chain_fidelity(links);
    const double limit = n * (n - 1) * eps * eps;  // 2 C(n,2) eps^2
    worst_ratio = std::max(worst_ratio, std::abs(f - werner_chain_fidelity(F)) / limit);
  }
  return {worst_ratio <= 1.0, "max |F' - F'_W| / (2 C(N,2) eps^2) = " + fmt("%.3f", worst_ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  std::vector<int> only;
  CLI::App app{"Acceptance criteria"};
  std::string golden_dir = cfg.golden_dir.string();
  app.add_option("--golden-dir", golden_dir, "Directory of golden CSV files");
  app.add_flag("--write-goldens", cfg.write_goldens, "Overwrite the goldens with this run's values");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);
  cfg.golden_dir = golden_dir;

  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Result()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "bell-diagonal swap exactness", 5, bd_swap_exactness},
      {2, "chain twirl equivalence", 60, chain_equivalence},
      {3, "upper-bound saturation", 5, saturation},
      {4, "bound ordering and goldens", 600, [&] { return bound_ordering(cfg); }},
      {5, "SDP upper-bound tightness", 120, upper_bound_tightness},
      {6, "rate-fidelity curve endpoints", 180, curve_endpoints},
      {7, "Monte Carlo sandwich", 120, monte_carlo_sandwich},
      {8, "QKD key-rate curves", 120, [&] { return qkd_reproduction(cfg); }},
      {9, "chain fidelity bounds", 60, chain_bounds},
      {10, "Werner approximation accuracy", 30, werner_accuracy},
  };

  bool all = true;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_seconds) {
      r.pass = false;
      r.detail += "; runtime over the " + fmt("%g", c.limit_seconds) + " s limit";
    }
    all = all && r.pass;
    std::printf("%s %2d %s (%.2f s): %s\n", r.pass ? "PASS" : "FAIL", c.id, c.name, secs, r.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
