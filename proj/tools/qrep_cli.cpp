#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qrep/bounds.hpp"
#include "qrep/errors.hpp"
#include "qrep/io.hpp"
#include "qrep/qkd.hpp"
#include "qrep/selftest.hpp"

namespace fs = std::filesystem;
using namespace qrep;

namespace {

constexpr const char* kOutDirVariable = "QREP_OUT_DIR";

// Raised for inconsistent flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// An explicit -o path wins; otherwise the file goes to $QREP_OUT_DIR (or the
// working directory) under its default name.
fs::path output_path(const std::string& explicit_path, const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  const char* dir = std::getenv(kOutDirVariable);
  return fs::path(dir && *dir ? dir : ".") / default_name;
}

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

// JSON given inline or as @path.
Json read_json_arg(const std::string& arg, const std::string& what) {
  std::string text = arg;
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw std::runtime_error("cannot read " + what + " file '" + arg.substr(1) + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(what + ": invalid JSON (" + e.what() + ")");
  }
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> v;
  for (int k = 0; k < steps; ++k) v.push_back(steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1));
  if (steps > 1) v.back() = hi;  // no round-off past the end point
  return v;
}

// ------------------------------------------------------------------ bounds

struct BoundsArgs {
  double fix_f = NAN, fix_p = NAN;
  double p_min = 0.0, p_max = NAN;
  double f_min = 0.5, f_max = 1.0;
  int p_steps = 100, f_steps = 100;
  unsigned threads = 0;
  std::string out;
};

int cmd_bounds(const BoundsArgs& a) {
  std::vector<std::pair<double, double>> points;
  std::string name;
  if (std::isnan(a.fix_f) == std::isnan(a.fix_p))
    throw UsageError("bounds: give exactly one of --fix-f and --fix-p");
  if (!std::isnan(a.fix_f)) {
    const double hi = std::isnan(a.p_max) ? a.fix_f : a.p_max;
    if (a.p_steps < 1 || a.p_min > hi) throw UsageError("bounds: empty p grid");
    for (double p : linspace(a.p_min, hi, a.p_steps)) points.emplace_back(p, a.fix_f);
    name = "bounds_fixF_" + fmt12(a.fix_f) + ".csv";
  } else {
    if (a.f_steps < 1 || a.f_min > a.f_max) throw UsageError("bounds: empty F grid");
    for (double F : linspace(a.f_min, a.f_max, a.f_steps)) points.emplace_back(a.fix_p, F);
    name = "bounds_fixP_" + fmt12(a.fix_p) + ".csv";
  }
  const auto rows = bound_sweep(points, {}, a.threads);
  std::string csv = bound_csv_header() + "\n";
  for (const auto& r : rows) {
    const std::string bad = r.ordering_violation();
    if (!bad.empty())
      throw ValidationError("bounds: row p=" + fmt12(r.p) + " F=" + fmt12(r.F) + " violates " + bad);
    csv += bound_csv_line(r) + "\n";
  }
  const fs::path path = output_path(a.out, name);
  write_file(path, csv);
  std::cout << "wrote " << rows.size() << " rows to " << path.string() << "\n";
  return 0;
}

// --------------------------------------------------------------------- qkd

struct QkdArgs {
  std::string link = "opt";
  double p = 0.5, F = 0.95;
  std::string state;
  int n_min = 2, n_max = 14;
  std::string out;
};

int cmd_qkd(const QkdArgs& a) {
  if (a.n_min < 2 || a.n_min > a.n_max) throw UsageError("qkd: empty or invalid n range");
  DensityOperator link;
  std::string name;
  if (a.link == "opt") {
    link = opt_state(a.p, a.F);
    name = "qkd_opt_p" + fmt12(a.p) + "_F" + fmt12(a.F) + ".csv";
  } else if (a.link == "r_state") {
    link = r_state(a.p);
    name = "qkd_r_state_p" + fmt12(a.p) + ".csv";
  } else {
    if (a.state.empty()) throw UsageError("qkd: --link custom needs --state");
    link = state_from_json(read_json_arg(a.state, "--state"));
    name = "qkd_custom.csv";
  }
  const auto rows = qkd_sweep(link, a.n_min, a.n_max);
  std::string csv = qkd_csv_header() + "\n";
  for (const auto& r : rows) {
    if (r.skf_postselected < r.skf_bd - 1e-12)
      throw ValidationError("qkd: postselected below non-postselected at n=" + std::to_string(r.n));
    csv += qkd_csv_line(r) + "\n";
  }
  const fs::path path = output_path(a.out, name);
  write_file(path, csv);
  std::cout << "wrote " << rows.size() << " rows to " << path.string() << "\n";
  return 0;
}

// ------------------------------------------------------------ swap / chain

void emit_json(const Json& j, const std::string& out) {
  const std::string text = dump_json(j) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
}

int cmd_swap(const std::vector<std::string>& states, const std::string& out) {
  if (states.size() != 2) throw UsageError("swap: give exactly two --state descriptors");
  emit_json(swap_report(state_from_json(read_json_arg(states[0], "--state")),
                        state_from_json(read_json_arg(states[1], "--state"))),
            out);
  return 0;
}

int cmd_chain(const std::vector<std::string>& states, int n, const std::string& protocol,
              const std::string& out) {
  std::vector<DensityOperator> links;
  for (const auto& s : states) links.push_back(state_from_json(read_json_arg(s, "--state")));
  if (links.size() == 1 && n > 1) links.assign(n, links.front());
  if (links.size() < 2) throw UsageError("chain: need at least two links (--state repeated or --n)");
  if (n > 0 && static_cast<std::size_t>(n) != links.size())
    throw UsageError("chain: --n disagrees with the number of --state descriptors");
  const Json pj = (protocol == "sequential" || protocol == "correct_at_end")
                      ? Json(protocol)
                      : read_json_arg(protocol, "--protocol");
  const Json report = chain_report(links, protocol_from_json(pj, static_cast<int>(links.size())));
  emit_json(report, out);
  return report.value("valid", true) ? 0 : 1;
}

// ------------------------------------------------------------- delta curve

int cmd_delta_curve(double p, double F, int points, const std::string& out) {
  if (points < 2) throw UsageError("delta-curve: need at least two points");
  std::string csv = "delta,lower,upper\n";
  for (const auto& c : fidelity_vs_delta(p, F, points))
    csv += fmt12(c.delta) + "," + fmt12(c.lower) + "," + fmt12(c.upper) + "\n";
  const fs::path path = output_path(out, "delta_curve_p" + fmt12(p) + "_F" + fmt12(F) + ".csv");
  write_file(path, csv);
  std::cout << "wrote " << points << " rows to " << path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- selftest

int cmd_selftest(std::uint64_t seed, const std::vector<std::string>& only) {
  SelftestOptions o;
  o.seed = seed;
  const auto& names = only.empty() ? selftest_suite_names() : only;
  bool ok = true;
  double total = 0.0;
  std::printf("selftest seed %llu\n", static_cast<unsigned long long>(seed));
  for (const auto& name : names) {
    const SuiteResult r = run_suite(name, o);
    ok = ok && r.passed;
    total += r.seconds;
    std::printf("%-4s %-8s %4d checks  %8.3f s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.checks,
                r.seconds);
    for (const auto& [metric, value] : r.metrics) std::printf("       %-30s %.3e\n", metric.c_str(), value);
    for (const auto& f : r.failures) std::printf("       failure: %s\n", f.c_str());
  }
  std::printf("%s in %.3f s\n", ok ? "all suites passed" : "FAILURES", total);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement swapping, fidelity bounds and key rates for repeater chains"};
  app.require_subcommand(1);

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "Bound sweep over p at fixed F, or over F at fixed p (CSV)");
  bounds->add_option("--fix-f", ba.fix_f, "Fixed fidelity F; sweeps p over [p-min, p-max]");
  bounds->add_option("--fix-p", ba.fix_p, "Fixed p; sweeps F over [f-min, f-max]");
  bounds->add_option("--p-min", ba.p_min, "Lowest p (default 0)");
  bounds->add_option("--p-max", ba.p_max, "Highest p (default F)");
  bounds->add_option("--p-steps", ba.p_steps, "Number of p points (default 100)");
  bounds->add_option("--f-min", ba.f_min, "Lowest F (default 0.5)");
  bounds->add_option("--f-max", ba.f_max, "Highest F (default 1)");
  bounds->add_option("--f-steps", ba.f_steps, "Number of F points (default 100)");
  bounds->add_option("--threads", ba.threads, "Worker threads (0: one per core)");
  bounds->add_option("-o,--output", ba.out, "Output CSV path");

  QkdArgs qa;
  auto* qkd = app.add_subcommand("qkd", "Secret-key fraction versus number of links (CSV)");
  qkd->add_option("--link", qa.link, "Link family")->check(CLI::IsMember({"opt", "r_state", "custom"}));
  qkd->add_option("--p", qa.p, "p of the link (opt and r_state)");
  qkd->add_option("--F", qa.F, "Fidelity of an opt link");
  qkd->add_option("--state", qa.state, "State descriptor for --link custom (JSON or @file)");
  qkd->add_option("--n-min", qa.n_min, "Smallest number of links (default 2)");
  qkd->add_option("--n-max", qa.n_max, "Largest number of links (default 14)");
  qkd->add_option("-o,--output", qa.out, "Output CSV path");

  std::vector<std::string> swap_states;
  std::string swap_out;
  auto* swap = app.add_subcommand("swap", "All four outcomes of swapping two links (JSON)");
  swap->add_option("--state", swap_states, "State descriptor (JSON or @file), given twice")->required();
  swap->add_option("-o,--output", swap_out, "Output JSON path (default stdout)");

  std::vector<std::string> chain_states;
  int chain_n = 0;
  std::string chain_protocol = "correct_at_end", chain_out;
  auto* chain = app.add_subcommand("chain", "Swap-and-correct chain report (JSON)");
  chain->add_option("--state", chain_states, "Link descriptor per link, or one repeated --n times")->required();
  chain->add_option("--n", chain_n, "Number of links when one descriptor is given");
  chain->add_option("--protocol", chain_protocol,
                    "sequential, correct_at_end, or a protocol JSON (inline or @file)");
  chain->add_option("-o,--output", chain_out, "Output JSON path (default stdout)");

  double dc_p = 0.0, dc_F = 0.75;
  int dc_points = 50;
  std::string dc_out;
  auto* curve = app.add_subcommand("delta-curve", "Lower and upper fidelity versus swap probability (CSV)");
  curve->add_option("--p", dc_p, "p");
  curve->add_option("--F", dc_F, "F");
  curve->add_option("--points", dc_points, "Number of delta points (default 50)");
  curve->add_option("-o,--output", dc_out, "Output CSV path");

  std::uint64_t seed = kDefaultSeed;
  std::vector<std::string> suites;
  auto* selftest = app.add_subcommand("selftest", "Run the invariant suites of every module");
  selftest->add_option("--seed", seed, "Random seed (default 20240917)");
  selftest->add_option("--suite", suites, "Run only these suites")->check(CLI::IsMember(selftest_suite_names()));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bounds) return cmd_bounds(ba);
    if (*qkd) return cmd_qkd(qa);
    if (*swap) return cmd_swap(swap_states, swap_out);
    if (*chain) return cmd_chain(chain_states, chain_n, chain_protocol, chain_out);
    if (*curve) return cmd_delta_curve(dc_p, dc_F, dc_points, dc_out);
    if (*selftest) return cmd_selftest(seed, suites);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
