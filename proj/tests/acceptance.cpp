// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "markoff_lab/fibonacci.hpp"
#include "markoff_lab/hurwitz.hpp"
#include "markoff_lab/markoff.hpp"
#include "markoff_lab/recurrence.hpp"
#include "markoff_lab/sweep.hpp"
#include "oracles.hpp"

namespace ff = markoff_lab::ff;
namespace mk = markoff_lab::markoff;
namespace hw = markoff_lab::hurwitz;
namespace rc = markoff_lab::recurrence;
namespace fib = markoff_lab::fibonacci;
namespace sw = markoff_lab::sweep;
using ff::FieldCtx;
using ff::u64;

namespace {

constexpr u64 kSeed = 0xC0FFEE;

struct Verdict {
  bool ok = true;
  std::string detail;
};

std::vector<u64> primes_between(u64 lo, u64 hi) {
  std::vector<u64> out;
  for (u64 p = lo; p <= hi; ++p) {
    if (ff::is_prime(p)) out.push_back(p);
  }
  return out;
}

Verdict criterion1() {
  std::mt19937_64 rng(kSeed);
  u64 cases = 0;
  for (u64 p : primes_between(5, 31)) {
    FieldCtx f(p);
    std::uniform_int_distribution<u64> pick(0, p - 1);
    for (int i = 0; i < 20; ++i) {
      const u64 A = 1 + pick(rng) % (p - 1);
      const u64 B = pick(rng);
      std::set<oracle::Triple> got;
      for (const auto& t : mk::enumerate_solutions(mk::MarkoffParams(f, A, B)).triples) {
        got.insert({t.x, t.y, t.z});
      }
      ++cases;
      if (got != oracle::markoff_solutions(p, A, B)) {
        return {false, "mismatch at p=" + std::to_string(p) + " A=" + std::to_string(A) +
                           " B=" + std::to_string(B)};
      }
    }
  }
  return {true, std::to_string(cases) + " (p, A, B) cases match the cubic oracle"};
}

// Criteria 2 and 3 share one decomposition per prime.
struct ClassicalRun {
  u64 primes = 0;
  std::vector<u64> disconnected;
  std::vector<u64> indivisible;
  double seconds = 0.0;
};

const ClassicalRun& classical_run() {
  static const ClassicalRun run = [] {
    ClassicalRun r;
    const auto start = std::chrono::steady_clock::now();
    for (u64 p : primes_between(5, 199)) {
      const mk::MarkoffParams m(FieldCtx(p), 3, 0);
      const auto rep = mk::components(m);
      ++r.primes;
      if (rep.component_count() != 1) r.disconnected.push_back(p);
      const auto div = mk::chen_divisibility(rep, m);
      if (!std::all_of(div.begin(), div.end(), [](bool b) { return b; })) r.indivisible.push_back(p);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }();
  return run;
}

std::string join(const std::vector<u64>& v) {
  std::string s;
  for (u64 x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

Verdict criterion2() {
  const auto& r = classical_run();
  if (!r.disconnected.empty()) return {false, "more than one component at p in {" + join(r.disconnected) + "}"};
  return {true, std::to_string(r.primes) + " primes, one component each"};
}

Verdict criterion3() {
  const auto& r = classical_run();
  if (!r.indivisible.empty()) return {false, "size not divisible by p at p in {" + join(r.indivisible) + "}"};
  return {true, std::to_string(r.primes) + " primes, every component size divisible by p"};
}

Verdict criterion4() {
  std::vector<u64> bad;
  for (u64 p : primes_between(5, 31)) {
    const auto rep = hw::components(hw::HurwitzParams(FieldCtx(p), 4, 4));
    if (!hw::sandwich_bounds(p, 4).holds(rep.total_nonzero)) bad.push_back(p);
  }
  if (!bad.empty()) return {false, "count outside the window at p in {" + join(bad) + "}"};
  return {true, "|H*(p)| inside the window for all 9 primes"};
}

Verdict criterion5() {
  u64 tuples = 0;
  u64 below = 0;
  std::string first;
  std::vector<u64> primes_failing;
  for (u64 p : primes_between(11, 31)) {
    const hw::HurwitzParams h(FieldCtx(p), 4, 4);
    u64 here = 0;
    for (u64 c1 = 1; c1 < p; ++c1) {
      for (u64 c2 = 1; c2 < p; ++c2) {
        const auto fc = hw::fiber_count(h, {c1, c2});
        ++tuples;
        if (!fc.exceeds_bound.value()) {
          if (below == 0) {
            first = "p=" + std::to_string(p) + " c=(" + std::to_string(c1) + "," + std::to_string(c2) +
                    ") count=" + std::to_string(fc.count);
          }
          ++below;
          ++here;
        }
      }
    }
    if (here) primes_failing.push_back(p);
  }
  if (below) {
    return {false, std::to_string(below) + "/" + std::to_string(tuples) +
                       " nonzero pairs at or below p-2sqrt(p)-3 (primes " + join(primes_failing) +
                       "); first " + first};
  }
  return {true, std::to_string(tuples) + " nonzero pairs above the bound"};
}

Verdict criterion6() {
  std::ostringstream detail;
  bool ok = true;
  for (u64 p : {5, 7, 11, 13}) {
    const hw::HurwitzParams h(FieldCtx(p), 4, 4);
    const auto u = hw::giant_union_check(h);
    std::vector<hw::ReducedSpec> specs;
    for (const auto& s : hw::all_reduced_specs(h)) {
      if (s.all_frozen_nonzero()) specs.push_back(s);
    }
    u64 pairs = 0;
    u64 too_long = 0;
    u64 empty = 0;
    u64 failed = 0;
    for (const auto& x : specs) {
      for (const auto& y : specs) {
        ++pairs;
        try {
          const auto path = hw::reduction_path(h, x, y);
          if (path.length() > 5) ++too_long;
          for (const auto& st : path.steps) empty += st.shared_fiber_size == 0;
        } catch (const hw::HurwitzError&) {
          ++failed;
        }
      }
    }
    const bool here = u.passed() && too_long == 0 && empty == 0 && failed == 0;
    ok = ok && here;
    detail << " p=" << p << ": outside " << u.specs_outside_giant << "/" << u.checked_specs
           << ", paths " << pairs << " (long " << too_long << ", empty " << empty << ", failed " << failed << ");";
  }
  std::string d = detail.str();
  d.pop_back();
  return {ok, d.substr(1)};
}

Verdict criterion7() {
  u64 pairs = 0;
  u64 disagree = 0;
  std::string first;
  for (u64 p : {5, 7, 11, 13}) {
    FieldCtx f(p);
    for (u64 b = 0; b < p; ++b) {
      for (u64 c = 0; c < p; ++c) {
        ++pairs;
        if (!hw::check_irreducibility(b, c, f).agrees()) {
          if (disagree == 0) {
            first = "p=" + std::to_string(p) + " b=" + std::to_string(b) + " a=" + std::to_string(c);
          }
          ++disagree;
        }
      }
    }
  }
  if (disagree) {
    return {false, std::to_string(disagree) + "/" + std::to_string(pairs) +
                       " (b, a) pairs where a != 0 yet the conic factors (all at b = +-2); first " + first};
  }
  return {true, std::to_string(pairs) + " pairs agree"};
}

Verdict criterion8() {
  std::mt19937_64 rng(kSeed);
  u64 specs = 0;
  u64 terms = 0;
  for (u64 p : {11, 101, 499}) {
    FieldCtx f(p);
    for (int i = 0; i < 200; ++i) {
      const auto s = rc::random_nondegenerate_spec(f, rng);
      const auto cf = rc::closed_form(s);
      const std::size_t L = rc::one_period(s).size();
      const std::size_t count = std::min<std::size_t>(2 * L, 5000);
      const auto ref = oracle::recurrence_terms(p, s.a, s.eps, s.x1, s.x2, count);
      for (std::size_t n = 1; n <= count; ++n) {
        if (cf.value_at(n, f) != ff::Fp2{ref[n - 1]}) {
          return {false, "mismatch at p=" + std::to_string(p) + " spec " + std::to_string(i) +
                             " n=" + std::to_string(n)};
        }
      }
      ++specs;
      terms += count;
    }
  }
  return {true, std::to_string(specs) + " specs, " + std::to_string(terms) + " terms reproduced"};
}

sw::SweepJob prop_job() {
  sw::SweepJob job;
  job.kind = sw::Experiment::prop_suite;
  job.moduli = {101, 499};
  job.params = {{"cases", 30}};
  job.seed = kSeed;
  sw::normalize_params(job);
  return job;
}

Verdict criterion9() {
  const auto r = sw::execute(prop_job());
  std::ostringstream d;
  u64 violations = 0;
  for (const auto& rec : r.records) {
    d << " p=" << rec.at("p").get<u64>() << ":";
    for (const char* key : {"prop1", "prop2", "prop3"}) {
      const auto& t = rec.at("payload").at(key);
      violations += t.at("violations").get<u64>();
      d << " " << key << " " << t.at("unflagged").get<u64>() << " unflagged/" << t.at("flagged").get<u64>()
        << " flagged";
    }
    d << ";";
  }
  std::string s = d.str();
  s.pop_back();
  if (violations || r.violation) return {false, std::to_string(violations) + " unflagged violations;" + s};
  return {true, "no unflagged violation;" + s};
}

Verdict criterion10() {
  u64 lcm = 0;
  for (u64 m = 2; m <= 60; ++m) {
    for (u64 n = m + 1; n <= 60; ++n) {
      if (std::gcd(m, n) != 1) continue;
      ++lcm;
      if (!fib::pisano_lcm_check(m, n)) return {false, "lcm identity fails for (" + std::to_string(m) + ", " + std::to_string(n) + ")"};
    }
  }
  u64 pp = 0;
  for (u64 p : primes_between(2, 47)) {
    for (unsigned k : {1u, 2u}) {
      ++pp;
      if (!fib::pisano_prime_power_check(p, k)) return {false, "prime-power relation fails for " + std::to_string(p) + "^" + std::to_string(k)};
    }
  }
  return {true, std::to_string(lcm) + " coprime pairs, " + std::to_string(pp) + " prime powers"};
}

Verdict criterion11() {
  u64 count = 0;
  for (u64 p : primes_between(7, 499)) {
    ++count;
    if (fib::binet_residue_set(p).residues != fib::pisano(p).residues) {
      return {false, "residue sets differ at p=" + std::to_string(p)};
    }
  }
  return {true, std::to_string(count) + " primes agree with iteration"};
}

Verdict criterion12() {
  u64 groups = 0;
  u64 shifts = 0;
  double worst2 = 0.0;
  double worst3 = 0.0;
  for (u64 p : primes_between(7, 499)) {
    FieldCtx f(p);
    for (u64 d : ff::divisors(p - 1)) {
      const auto r = fib::corollary2_check(p, ff::subgroup_of_order(d, f));
      ++groups;
      if (!r.holds.value_or(false)) return {false, "corollary 2 fails at p=" + std::to_string(p) + " |G|=" + std::to_string(d)};
      worst2 = std::max(worst2, static_cast<double>(r.lhs_exact) / r.rhs_bound);
    }
    for (u64 q = 1; q < p; ++q) {
      const auto r = fib::corollary3_check(p, q);
      ++shifts;
      if (!r.holds.value_or(false)) return {false, "corollary 3 fails at p=" + std::to_string(p) + " q=" + std::to_string(q)};
      worst3 = std::max(worst3, static_cast<double>(r.lhs_exact) / r.rhs_bound);
    }
  }
  std::ostringstream d;
  d.precision(3);
  d << groups << " subgroups (max lhs/rhs " << worst2 << "), " << shifts << " shifts (max lhs/rhs " << worst3 << ")";
  return {true, d.str()};
}

Verdict criterion13() {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "markoff_lab_acceptance_a.jsonl").string();
  const std::string b = (dir / "markoff_lab_acceptance_b.jsonl").string();
  std::ostringstream err;
  const auto job = prop_job();
  if (sw::run(job, a, sw::Format::jsonl, 1, err) != sw::ExitCode::ok ||
      sw::run(job, b, sw::Format::jsonl, 2, err) != sw::ExitCode::ok) {
    return {false, "suite run failed: " + err.str()};
  }
  auto payloads = [](const std::string& path) {
    std::string out;
    for (const auto& rec : sw::read_jsonl(path)) out += rec.at("payload").dump() + "\n";
    return out;
  };
  const std::string pa = payloads(a);
  const std::string pb = payloads(b);
  const auto code = sw::verify(a, b, err);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  if (pa != pb) return {false, "payload bytes differ between runs"};
  if (code != sw::ExitCode::ok) return {false, "verify exit " + std::to_string(static_cast<int>(code)) + ": " + err.str()};
  return {true, std::to_string(pa.size()) + " payload bytes identical; verify exit 0"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "markoff oracle equivalence", 10, criterion1},
      {2, "classical connectivity", 60, criterion2},
      {3, "component sizes divisible by p", 60, criterion3},
      {4, "hurwitz sandwich", 30, criterion4},
      {5, "fiber bound", 30, criterion5},
      {6, "giant union and reduction paths", 120, criterion6},
      {7, "irreducibility cross-check", 10, criterion7},
      {8, "closed-form reconstruction", 20, criterion8},
      {9, "propositions 1-3", 60, criterion9},
      {10, "pisano relations", 10, criterion10},
      {11, "binet consistency", 20, criterion11},
      {12, "corollaries 2-3", 120, criterion12},
      {13, "determinism", 60, criterion13},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // 2 and 3 share a run; charge its full time to both.
    if (c.id == 2 || c.id == 3) secs = std::max(secs, classical_run().seconds);
    if (secs > c.limit_s) {
      v.ok = false;
      v.detail += " (over time limit)";
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs / %.0fs", secs, c.limit_s);
    std::cout << (v.ok ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.name << " [" << timing << "]: " << v.detail
              << std::endl;
    failed += v.ok ? 0 : 1;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed ? 1 : 0;
}
