#pragma once

// Prime sweeps behind the command-line tool: job parsing, one JSON payload per
// prime, ordered JSON-lines / CSV output, and baseline verification.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "markoff_lab/fibonacci.hpp"
#include "markoff_lab/ff.hpp"
#include "markoff_lab/hurwitz.hpp"
#include "markoff_lab/markoff.hpp"
#include "markoff_lab/recurrence.hpp"

namespace markoff_lab::sweep {

using json = nlohmann::json;
using ff::u64;

inline constexpr const char* kVersion = "0.1.0";

enum class ExitCode : int { ok = 0, operational = 1, violation = 2 };

class JobError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment {
  markoff_components,
  hurwitz_components,
  reduce_check,
  prop_suite,
  pisano_suite,
  fib_corollaries,
};

inline const std::vector<std::pair<std::string, Experiment>>& experiment_names() {
  static const std::vector<std::pair<std::string, Experiment>> names = {
      {"markoff-components", Experiment::markoff_components},
      {"hurwitz-components", Experiment::hurwitz_components},
      {"reduce-check", Experiment::reduce_check},
      {"prop-suite", Experiment::prop_suite},
      {"pisano-suite", Experiment::pisano_suite},
      {"fib-corollaries", Experiment::fib_corollaries},
  };
  return names;
}

inline Experiment parse_experiment(const std::string& s) {
  for (const auto& [name, e] : experiment_names()) {
    if (name == s) return e;
  }
  throw JobError("unknown experiment '" + s + "'");
}

inline std::string to_string(Experiment e) {
  for (const auto& [name, x] : experiment_names()) {
    if (x == e) return name;
  }
  return "?";
}

enum class Format { jsonl, csv };

inline Format parse_format(const std::string& s) {
  if (s == "json-lines" || s == "jsonl") return Format::jsonl;
  if (s == "csv") return Format::csv;
  throw JobError("unknown format '" + s + "'");
}

struct SweepJob {
  Experiment kind = Experiment::markoff_components;
  std::vector<u64> moduli;  // primes, or arbitrary N >= 2 for pisano-suite
  std::map<std::string, u64> params;
  std::optional<u64> seed;
};

namespace detail {

inline u64 parse_u64(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw JobError("invalid " + what + " '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw JobError("invalid " + what + " '" + s + "'");
  }
}

}  // namespace detail

/// "5..97" (inclusive range) or "5,7,11". Ranges keep only primes unless
/// `primes_only` is false; explicit lists must already be prime.
inline std::vector<u64> parse_moduli(const std::string& spec, bool primes_only) {
  std::vector<u64> out;
  if (auto dots = spec.find(".."); dots != std::string::npos) {
    const u64 lo = detail::parse_u64(spec.substr(0, dots), "range start");
    const u64 hi = detail::parse_u64(spec.substr(dots + 2), "range end");
    for (u64 v = lo; v <= hi; ++v) {
      if (primes_only ? ff::is_prime(v) : v >= 2) out.push_back(v);
    }
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const u64 v = detail::parse_u64(item, "modulus");
      if (primes_only && !ff::is_prime(v)) throw JobError(item + " is not prime");
      if (!primes_only && v < 2) throw JobError("modulus must be at least 2");
      out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw JobError(primes_only ? "no primes in range" : "no moduli in range");
  return out;
}

inline std::map<std::string, u64> parse_params(const std::string& spec) {
  std::map<std::string, u64> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw JobError("parameter '" + item + "' is not key=value");
    out[item.substr(0, eq)] = detail::parse_u64(item.substr(eq + 1), "value for " + item.substr(0, eq));
  }
  return out;
}

/// Fills defaults and rejects keys that do not belong to the experiment.
inline void normalize_params(SweepJob& job) {
  std::map<std::string, u64> defaults;
  switch (job.kind) {
    case Experiment::markoff_components:
      defaults = {{"A", 3}, {"B", 0}, {"perm", 1}, {"sign", 1}, {"vieta", 1}};
      break;
    case Experiment::hurwitz_components:
    case Experiment::reduce_check:
      defaults = {{"n", 4}, {"a", job.params.count("n") ? job.params.at("n") : 4}};
      break;
    case Experiment::prop_suite:
      defaults = {{"cases", 30}};
      if (!job.seed) throw JobError("prop-suite requires --seed");
      break;
    case Experiment::pisano_suite:
    case Experiment::fib_corollaries:
      break;
  }
  for (const auto& [key, value] : job.params) {
    if (!defaults.count(key)) {
      throw JobError("parameter '" + key + "' does not apply to " + to_string(job.kind));
    }
  }
  for (const auto& [key, value] : defaults) job.params.emplace(key, value);
  if (job.kind == Experiment::hurwitz_components || job.kind == Experiment::reduce_check) {
    const u64 n = job.params.at("n");
    if (n < 3 || n > static_cast<u64>(hurwitz::kMaxVariables)) throw JobError("n must lie in [3, 6]");
  }
}

// ---------------------------------------------------------------------------
// Payloads

inline json to_json(const recurrence::BoundReport& r) {
  json j = {{"p", r.p},
            {"lhs_exact", r.lhs_exact},
            {"rhs_bound", r.rhs_bound},
            {"branch_taken", r.branch_taken},
            {"flags", r.flags}};
  j["holds"] = r.holds ? json(*r.holds) : json(nullptr);
  return j;
}

inline json to_json(const ComponentReport& r) {
  return {{"total_nonzero", r.total_nonzero},
          {"component_sizes", r.component_sizes},
          {"giant_size", r.giant_size},
          {"residual", r.residual},
          {"min_component", r.min_component}};
}

/// Payload plus whether every asserted check in it passed.
struct Outcome {
  json payload;
  bool violation = false;
};

inline Outcome markoff_payload(u64 p, const std::map<std::string, u64>& prm) {
  const ff::FieldCtx ctx(p);
  const markoff::MarkoffParams params(ctx, prm.at("A"), prm.at("B"));
  const markoff::Generators gens{prm.at("perm") != 0, prm.at("sign") != 0, prm.at("vieta") != 0};
  const ComponentReport rep = markoff::components(params, gens);
  const markoff::GiantReport g = markoff::giant_report(rep, p);
  Outcome o;
  o.payload = {{"p", p}, {"A", params.A}, {"B", params.B}};
  o.payload.update(to_json(rep));
  o.payload["giant_fraction"] = g.giant_fraction;
  o.payload["log_pow_one_third"] = g.log_pow_one_third;
  o.payload["log_pow_seven_ninths"] = g.log_pow_seven_ninths;
  o.payload["exp_sqrt_log"] = g.exp_sqrt_log;
  const bool all_moves = gens.permutations && gens.sign_flips && gens.vieta;
  if (params.classical() && all_moves) {
    const auto div = markoff::chen_divisibility(rep, params);
    const bool ok = std::all_of(div.begin(), div.end(), [](bool b) { return b; });
    o.payload["chen_divisible"] = ok;
    o.violation = !ok;
  } else {
    o.payload["chen_divisible"] = nullptr;
  }
  return o;
}

inline Outcome hurwitz_payload(u64 p, const std::map<std::string, u64>& prm) {
  const ff::FieldCtx ctx(p);
  const int n = static_cast<int>(prm.at("n"));
  const hurwitz::HurwitzParams params(ctx, n, prm.at("a"));
  const Decomposition d = hurwitz::decompose_solutions(params);
  const hurwitz::Sandwich sw = hurwitz::sandwich_bounds(p, n);
  const hurwitz::GiantUnionReport u = hurwitz::giant_union_check(params, d);
  Outcome o;
  o.payload = {{"p", p}, {"n", n}, {"a", params.a}};
  o.payload.update(to_json(d.report));
  o.payload["sandwich_low"] = sw.low;
  o.payload["sandwich_high"] = sw.high;
  o.payload["sandwich_holds"] = sw.holds(d.report.total_nonzero);
  o.payload["reduced_spec_count"] = u.reduced_spec_count;
  o.payload["union_specs_checked"] = u.checked_specs;
  o.payload["union_specs_outside"] = u.specs_outside_giant;
  o.payload["union_check_passed"] = u.passed();
  o.violation = !sw.holds(d.report.total_nonzero) || !u.passed();
  return o;
}

inline Outcome reduce_payload(u64 p, const std::map<std::string, u64>& prm) {
  const ff::FieldCtx ctx(p);
  const int n = static_cast<int>(prm.at("n"));
  const hurwitz::HurwitzParams params(ctx, n, prm.at("a"));

  // Fibers over every nonzero shared tuple.
  u64 tuples = 0;
  u64 below = 0;
  u64 empty = 0;
  u64 min_count = UINT64_MAX;
  std::vector<u64> first_below;
  u64 combos = 1;
  for (int i = 0; i < n - 2; ++i) combos *= p - 1;
  for (u64 c = 0; c < combos; ++c) {
    std::vector<u64> shared(static_cast<std::size_t>(n - 2));
    u64 r = c;
    for (auto& v : shared) {
      v = r % (p - 1) + 1;
      r /= p - 1;
    }
    const auto fc = hurwitz::fiber_count(params, shared);
    ++tuples;
    min_count = std::min(min_count, fc.count);
    if (fc.count == 0) ++empty;
    if (fc.exceeds_bound && !*fc.exceeds_bound) {
      if (below == 0) first_below = shared;
      ++below;
    }
  }

  // Lemma criterion against the factorization search.
  u64 pairs = 0;
  u64 disagreements = 0;
  json first_disagreement = nullptr;
  for (u64 b = 0; b < p; ++b) {
    for (u64 c = 0; c < p; ++c) {
      const auto chk = hurwitz::check_irreducibility(b, c, ctx);
      ++pairs;
      if (!chk.agrees()) {
        if (disagreements == 0) first_disagreement = {b, c};
        ++disagreements;
      }
    }
  }

  // Reduction paths between nonzero-frozen specs: all ordered pairs when
  // there are at most 200 specs, otherwise to and from the first spec.
  std::vector<hurwitz::ReducedSpec> specs;
  for (auto& s : hurwitz::all_reduced_specs(params)) {
    if (s.all_frozen_nonzero()) specs.push_back(std::move(s));
  }
  const std::size_t limit = static_cast<std::size_t>(2 * n - 3);
  u64 path_pairs = 0;
  u64 too_long = 0;
  u64 empty_fibers = 0;
  u64 failures = 0;
  std::size_t max_len = 0;
  auto run_path = [&](const hurwitz::ReducedSpec& x, const hurwitz::ReducedSpec& y) {
    ++path_pairs;
    try {
      const auto path = hurwitz::reduction_path(params, x, y);
      max_len = std::max(max_len, path.length());
      if (path.length() > limit) ++too_long;
      for (const auto& st : path.steps) {
        if (st.shared_fiber_size == 0) ++empty_fibers;
      }
    } catch (const hurwitz::HurwitzError&) {
      ++failures;
    }
  };
  if (specs.size() <= 200) {
    for (const auto& x : specs) {
      for (const auto& y : specs) run_path(x, y);
    }
  } else {
    for (std::size_t j = 1; j < specs.size(); ++j) {
      run_path(specs[0], specs[j]);
      run_path(specs[j], specs[0]);
    }
  }

  Outcome o;
  o.payload = {{"p", p}, {"n", n}, {"a", params.a}};
  o.payload["fiber"] = {{"tuples_checked", tuples},
                        {"min_count", tuples ? min_count : 0},
                        {"bound", hurwitz::fiber_bound(p)},
                        {"below_bound", below},
                        {"empty", empty},
                        {"first_below", first_below.empty() ? json(nullptr) : json(first_below)}};
  o.payload["irreducibility"] = {{"pairs_checked", pairs},
                                 {"disagreements", disagreements},
                                 {"first_disagreement", first_disagreement}};
  o.payload["paths"] = {{"pairs_checked", path_pairs},
                        {"max_length", max_len},
                        {"length_limit", limit},
                        {"too_long", too_long},
                        {"empty_fibers", empty_fibers},
                        {"failures", failures}};
  o.violation = below > 0 || disagreements > 0 || too_long > 0 || empty_fibers > 0 || failures > 0;
  return o;
}

inline std::mt19937_64 rng_for(u64 seed, u64 p) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(p)};
  return std::mt19937_64(seq);
}

struct PropTally {
  json reports = json::array();
  u64 unflagged = 0;
  u64 flagged = 0;
  u64 violations = 0;

  void add(const recurrence::BoundReport& r) {
    reports.push_back(to_json(r));
    if (r.flags.empty()) {
      ++unflagged;
    } else {
      ++flagged;
    }
    if (r.violated()) ++violations;
  }
  json summary() const {
    return {{"unflagged", unflagged}, {"flagged", flagged}, {"violations", violations},
            {"reports", reports}};
  }
};

inline Outcome prop_payload(u64 p, const std::map<std::string, u64>& prm, u64 seed) {
  const ff::FieldCtx ctx(p);
  const u64 cases = prm.at("cases");
  auto rng = rng_for(seed, p);
  const auto divisors = ff::divisors(p - 1);
  std::uniform_int_distribution<std::size_t> pick_div(0, divisors.size() - 1);
  std::uniform_int_distribution<u64> pick_q(1, p - 1);
  PropTally t1;
  PropTally t2;
  PropTally t3;
  for (u64 i = 0; i < cases; ++i) {
    const auto s1 = recurrence::random_nondegenerate_spec(ctx, rng);
    const auto s2 = recurrence::random_nondegenerate_spec(ctx, rng);
    t1.add(recurrence::prop1_check(s1, s2));
    const auto g = ff::subgroup_of_order(divisors[pick_div(rng)], ctx);
    t2.add(recurrence::prop2_check(s1, g));
    t3.add(recurrence::prop3_check(s2, pick_q(rng)));
  }
  Outcome o;
  o.payload = {{"p", p},
               {"cases", cases},
               {"prop1", t1.summary()},
               {"prop2", t2.summary()},
               {"prop3", t3.summary()}};
  o.violation = t1.violations + t2.violations + t3.violations > 0;
  return o;
}

inline Outcome pisano_payload(u64 n) {
  const auto rec = fibonacci::pisano(n);
  u64 lcm_checks = 0;
  u64 lcm_failures = 0;
  for (u64 m = 2; m < n; ++m) {
    if (std::gcd(m, n) != 1) continue;
    ++lcm_checks;
    if (!fibonacci::pisano_lcm_check(m, n)) ++lcm_failures;
  }
  u64 pp_checks = 0;
  u64 pp_failures = 0;
  if (ff::is_prime(n)) {
    u64 pk = n;
    for (unsigned k = 1; k <= 2 && pk <= fibonacci::kMaxModulus / n; ++k, pk *= n) {
      ++pp_checks;
      if (!fibonacci::pisano_prime_power_check(n, k)) ++pp_failures;
    }
  }
  Outcome o;
  o.payload = {{"N", n},
               {"period", rec.period},
               {"residue_count", rec.residues.size()},
               {"lcm_checks", lcm_checks},
               {"lcm_failures", lcm_failures},
               {"prime_power_checks", pp_checks},
               {"prime_power_failures", pp_failures}};
  o.violation = lcm_failures + pp_failures > 0;
  return o;
}

inline Outcome fib_corollaries_payload(u64 p) {
  if (p < 7) throw JobError("fib-corollaries needs p >= 7");
  const ff::FieldCtx ctx(p);
  const auto rec = fibonacci::pisano(p);
  const bool binet_ok = fibonacci::binet_residue_set(p).residues == rec.residues;
  u64 subgroups = 0;
  u64 c2_viol = 0;
  double c2_ratio = 0.0;
  for (u64 d : ff::divisors(p - 1)) {
    const auto r = fibonacci::corollary2_check(p, ff::subgroup_of_order(d, ctx));
    ++subgroups;
    if (r.violated()) ++c2_viol;
    c2_ratio = std::max(c2_ratio, static_cast<double>(r.lhs_exact) / r.rhs_bound);
  }
  u64 shifts = 0;
  u64 c3_viol = 0;
  double c3_ratio = 0.0;
  for (u64 q = 1; q < p; ++q) {
    const auto r = fibonacci::corollary3_check(p, q);
    ++shifts;
    if (r.violated()) ++c3_viol;
    c3_ratio = std::max(c3_ratio, static_cast<double>(r.lhs_exact) / r.rhs_bound);
  }
  Outcome o;
  o.payload = {{"p", p},
               {"pisano_period", rec.period},
               {"residue_count", rec.residues.size()},
               {"binet_matches", binet_ok},
               {"subgroups_checked", subgroups},
               {"cor2_violations", c2_viol},
               {"cor2_max_ratio", c2_ratio},
               {"shifts_checked", shifts},
               {"cor3_violations", c3_viol},
               {"cor3_max_ratio", c3_ratio}};
  o.violation = !binet_ok || c2_viol > 0 || c3_viol > 0;
  return o;
}

inline Outcome payload_for(const SweepJob& job, u64 modulus) {
  switch (job.kind) {
    case Experiment::markoff_components:
      return markoff_payload(modulus, job.params);
    case Experiment::hurwitz_components:
      return hurwitz_payload(modulus, job.params);
    case Experiment::reduce_check:
      return reduce_payload(modulus, job.params);
    case Experiment::prop_suite:
      return prop_payload(modulus, job.params, *job.seed);
    case Experiment::pisano_suite:
      return pisano_payload(modulus);
    case Experiment::fib_corollaries:
      return fib_corollaries_payload(modulus);
  }
  throw JobError("unhandled experiment");
}

// ---------------------------------------------------------------------------
// Records and output

inline json job_echo(const SweepJob& job) {
  json params = json::object();
  for (const auto& [k, v] : job.params) params[k] = v;
  return {{"experiment", to_string(job.kind)},
          {"params", params},
          {"seed", job.seed ? json(*job.seed) : json(nullptr)}};
}

inline const char* modulus_key(const SweepJob& job) {
  return job.kind == Experiment::pisano_suite ? "N" : "p";
}

struct RunResult {
  std::vector<json> records;  // ascending modulus
  bool violation = false;
};

/// Runs every modulus on a pool of workers; records come back in modulus order.
inline RunResult execute(const SweepJob& job, unsigned threads = 1) {
  const std::size_t count = job.moduli.size();
  std::vector<json> records(count);
  std::vector<char> violated(count, 0);
  std::vector<std::string> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      const u64 m = job.moduli[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        Outcome o = payload_for(job, m);
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        json rec = job_echo(job);
        rec[modulus_key(job)] = m;
        rec["payload"] = std::move(o.payload);
        rec["elapsed_ms"] = std::round(ms * 1000.0) / 1000.0;
        rec["version"] = kVersion;
        records[i] = std::move(rec);
        violated[i] = o.violation ? 1 : 0;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i].empty()) {
      throw JobError(std::string(modulus_key(job)) + " = " + std::to_string(job.moduli[i]) +
                     ": " + errors[i]);
    }
  }
  RunResult r;
  r.records = std::move(records);
  r.violation = std::any_of(violated.begin(), violated.end(), [](char v) { return v != 0; });
  return r;
}

namespace detail {

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (j.is_array()) {
    if (std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); })) {
      std::string joined;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) joined += "|";
        joined += j[i].is_string() ? j[i].get<std::string>() : j[i].dump();
      }
      out.emplace_back(prefix, joined);
    } else {
      out.emplace_back(prefix + ".count", std::to_string(j.size()));
    }
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace detail

/// One row per record; component_sizes and other scalar arrays become "a|b|c".
inline std::string to_csv(const std::vector<json>& records) {
  std::ostringstream os;
  bool header = false;
  for (const json& rec : records) {
    std::vector<std::pair<std::string, std::string>> cells;
    detail::flatten(rec, "", cells);
    if (!header) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << detail::csv_escape(cells[i].first);
      os << '\n';
      header = true;
    }
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << detail::csv_escape(cells[i].second);
    os << '\n';
  }
  return os.str();
}

inline std::string to_jsonl(const std::vector<json>& records) {
  std::string out;
  for (const json& rec : records) out += rec.dump() + "\n";
  return out;
}

/// Runs the job and writes the output file. Returns the process exit code.
inline ExitCode run(const SweepJob& job, const std::string& out_path, Format format,
                    unsigned threads, std::ostream& err) {
  try {
    const RunResult r = execute(job, threads);
    std::ofstream os(out_path, std::ios::binary | std::ios::trunc);
    if (!os) {
      err << "error: cannot open output file '" << out_path << "'\n";
      return ExitCode::operational;
    }
    os << (format == Format::jsonl ? to_jsonl(r.records) : to_csv(r.records));
    if (!os.flush()) {
      err << "error: failed writing '" << out_path << "'\n";
      return ExitCode::operational;
    }
    if (r.violation) {
      err << "bound violation: at least one asserted check failed (see payloads)\n";
      return ExitCode::violation;
    }
    return ExitCode::ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::operational;
  }
}

inline std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw JobError("cannot open '" + path + "'");
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error&) {
      throw JobError(path + ":" + std::to_string(lineno) + ": not a JSON record");
    }
  }
  return out;
}

/// Deterministic part of a record: everything except the timing field.
inline json deterministic_fields(json rec) {
  rec.erase("elapsed_ms");
  return rec;
}

/// Field-by-field comparison; writes the first divergence to `err`.
inline ExitCode verify(const std::string& baseline, const std::string& current, std::ostream& err) {
  try {
    const auto a = read_jsonl(baseline);
    const auto b = read_jsonl(current);
    if (a.empty() || b.empty()) {
      err << "error: empty record file\n";
      return ExitCode::operational;
    }
    const auto kind_a = a.front().value("experiment", std::string{});
    const auto kind_b = b.front().value("experiment", std::string{});
    if (kind_a != kind_b) {
      err << "schema mismatch: experiment '" << kind_a << "' vs '" << kind_b << "'\n";
      return ExitCode::operational;
    }
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      const json x = deterministic_fields(a[i]);
      const json y = deterministic_fields(b[i]);
      if (x == y) continue;
      const json diff = json::diff(x, y);
      err << "divergence at record " << (i + 1) << ": "
          << (diff.empty() ? std::string("?") : diff.front().dump()) << "\n";
      return ExitCode::operational;
    }
    if (a.size() != b.size()) {
      err << "divergence: " << a.size() << " vs " << b.size() << " records\n";
      return ExitCode::operational;
    }
    return ExitCode::ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::operational;
  }
}

/// --threads, else MARKOFF_LAB_THREADS, else 1.
inline unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("MARKOFF_LAB_THREADS")) {
    try {
      const unsigned long v = std::stoul(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace markoff_lab::sweep
