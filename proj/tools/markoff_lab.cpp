// markoff_lab: run prime sweeps and compare result files.
//
//   markoff_lab run --experiment markoff-components --primes 5..31 --out x.jsonl
//   markoff_lab run --experiment prop-suite --primes 101,499 --seed 12648430 --out p.jsonl
//   markoff_lab verify baseline.jsonl current.jsonl
//
// Exit status: 0 all asserted checks passed, 2 an asserted check or unflagged
// bound failed, 1 operational error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "markoff_lab/sweep.hpp"

namespace sweep = markoff_lab::sweep;

int main(int argc, char** argv) {
  CLI::App app{"Markoff / Markoff-Hurwitz / recurrence experiments over prime fields"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sweep::kVersion);

  std::string experiment;
  std::string primes;
  std::string params;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json-lines";
  std::optional<unsigned> threads;

  auto* run = app.add_subcommand("run", "run one experiment over a prime range");
  run->add_option("--experiment", experiment,
                  "markoff-components | hurwitz-components | reduce-check | prop-suite | "
                  "pisano-suite | fib-corollaries")
      ->required();
  run->add_option("--primes", primes, "range \"5..97\" or list \"5,7,11\" (moduli N for pisano-suite)")
      ->required();
  run->add_option("--params", params, "key=value,... (e.g. A=3,B=0 or n=4,a=4)");
  run->add_option("--seed", seed, "seed for randomized suites");
  run->add_option("--out", out, "output path")->required();
  run->add_option("--format", format, "json-lines | csv");
  run->add_option("--threads", threads, "worker count (fallback: MARKOFF_LAB_THREADS)");

  std::string baseline;
  std::string current;
  auto* verify = app.add_subcommand("verify", "compare two JSON-lines result files");
  verify->add_option("baseline", baseline)->required();
  verify->add_option("current", current)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(sweep::ExitCode::operational);
  }

  if (*verify) {
    const auto code = sweep::verify(baseline, current, std::cerr);
    if (code == sweep::ExitCode::ok) std::cout << "match\n";
    return static_cast<int>(code);
  }

  sweep::SweepJob job;
  sweep::Format fmt;
  try {
    job.kind = sweep::parse_experiment(experiment);
    job.moduli = sweep::parse_moduli(primes, job.kind != sweep::Experiment::pisano_suite);
    job.params = sweep::parse_params(params);
    job.seed = seed;
    sweep::normalize_params(job);
    fmt = sweep::parse_format(format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(sweep::ExitCode::operational);
  }
  const auto code = sweep::run(job, out, fmt, sweep::resolve_threads(threads), std::cerr);
  if (code != sweep::ExitCode::operational) {
    std::cout << job.moduli.size() << " records written to " << out << "\n";
  }
  return static_cast<int>(code);
}
