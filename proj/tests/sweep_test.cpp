#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "markoff_lab/sweep.hpp"

namespace sw = markoff_lab::sweep;
using sw::ExitCode;
using sw::json;

namespace {

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "markoff_lab_" + name; }

sw::SweepJob make_job(sw::Experiment kind, const std::string& moduli, const std::string& params = "",
                      std::optional<sw::u64> seed = std::nullopt) {
  sw::SweepJob job;
  job.kind = kind;
  job.moduli = sw::parse_moduli(moduli, kind != sw::Experiment::pisano_suite);
  job.params = sw::parse_params(params);
  job.seed = seed;
  sw::normalize_params(job);
  return job;
}

}  // namespace

TEST(Sweep, ParseModuli) {
  EXPECT_EQ(sw::parse_moduli("5..31", true), (std::vector<sw::u64>{5, 7, 11, 13, 17, 19, 23, 29, 31}));
  EXPECT_EQ(sw::parse_moduli("11,5,7,5", true), (std::vector<sw::u64>{5, 7, 11}));
  EXPECT_EQ(sw::parse_moduli("2..6", false), (std::vector<sw::u64>{2, 3, 4, 5, 6}));
  try {
    sw::parse_moduli("24..28", true);
    FAIL();
  } catch (const sw::JobError& e) {
    EXPECT_STREQ(e.what(), "no primes in range");
  }
  EXPECT_THROW(sw::parse_moduli("9", true), sw::JobError);
  EXPECT_THROW(sw::parse_moduli("x..7", true), sw::JobError);
}

TEST(Sweep, ParseParamsAndDefaults) {
  EXPECT_EQ(sw::parse_params("A=1,B=2"), (std::map<std::string, sw::u64>{{"A", 1}, {"B", 2}}));
  EXPECT_THROW(sw::parse_params("A"), sw::JobError);
  EXPECT_THROW(sw::parse_params("A=-1"), sw::JobError);
  auto job = make_job(sw::Experiment::hurwitz_components, "7", "n=5");
  EXPECT_EQ(job.params.at("a"), 5u);
  EXPECT_THROW(make_job(sw::Experiment::markoff_components, "7", "n=4"), sw::JobError);
  EXPECT_THROW(make_job(sw::Experiment::prop_suite, "101"), sw::JobError);
  EXPECT_THROW(make_job(sw::Experiment::hurwitz_components, "7", "n=9"), sw::JobError);
  EXPECT_THROW(sw::parse_experiment("nope"), sw::JobError);
  EXPECT_EQ(sw::to_string(sw::parse_experiment("reduce-check")), "reduce-check");
}

TEST(Sweep, MarkoffRunProducesOrderedRecords) {
  auto job = make_job(sw::Experiment::markoff_components, "5..31", "A=3,B=0");
  const std::string out = temp_path("markoff.jsonl");
  std::ostringstream err;
  EXPECT_EQ(sw::run(job, out, sw::Format::jsonl, 3, err), ExitCode::ok) << err.str();
  auto recs = sw::read_jsonl(out);
  ASSERT_EQ(recs.size(), 9u);
  sw::u64 last = 0;
  for (const auto& r : recs) {
    EXPECT_GT(r.at("p").get<sw::u64>(), last);
    last = r.at("p").get<sw::u64>();
    EXPECT_EQ(r.at("experiment"), "markoff-components");
    EXPECT_EQ(r.at("version"), sw::kVersion);
    EXPECT_TRUE(r.contains("elapsed_ms"));
    EXPECT_EQ(r.at("payload").at("component_sizes").size(), 1u);
    EXPECT_EQ(r.at("payload").at("chen_divisible"), true);
  }
}

TEST(Sweep, ThreadCountDoesNotChangePayloads) {
  auto job = make_job(sw::Experiment::reduce_check, "7,11,13");
  auto a = sw::execute(job, 1);
  auto b = sw::execute(job, 3);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(sw::deterministic_fields(a.records[i]), sw::deterministic_fields(b.records[i]));
  }
}

TEST(Sweep, PisanoSuitePasses) {
  auto job = make_job(sw::Experiment::pisano_suite, "2..60");
  auto r = sw::execute(job);
  EXPECT_FALSE(r.violation);
  EXPECT_EQ(r.records.size(), 59u);
  EXPECT_EQ(r.records.front().at("N"), 2u);
  EXPECT_EQ(r.records.front().at("payload").at("period"), 3u);
}

TEST(Sweep, ReduceCheckFlagsViolationAtEleven) {
  // Empty fibers at p = 11 are a genuine failure of the asserted fiber bound.
  auto job = make_job(sw::Experiment::reduce_check, "11");
  const std::string out = temp_path("reduce.jsonl");
  std::ostringstream err;
  EXPECT_EQ(sw::run(job, out, sw::Format::jsonl, 1, err), ExitCode::violation);
  EXPECT_NE(err.str().find("violation"), std::string::npos);
}

TEST(Sweep, UnwritableOutputIsOperationalError) {
  auto job = make_job(sw::Experiment::pisano_suite, "2..5");
  std::ostringstream err;
  EXPECT_EQ(sw::run(job, "/nonexistent-dir/x/out.jsonl", sw::Format::jsonl, 1, err), ExitCode::operational);
  EXPECT_NE(err.str().find("cannot open output file"), std::string::npos);
}

TEST(Sweep, PropSuiteIsByteIdenticalAcrossRuns) {
  auto job = make_job(sw::Experiment::prop_suite, "101", "cases=10", 0xC0FFEE);
  const std::string a = temp_path("prop_a.jsonl");
  const std::string b = temp_path("prop_b.jsonl");
  std::ostringstream err;
  ASSERT_EQ(sw::run(job, a, sw::Format::jsonl, 1, err), ExitCode::ok) << err.str();
  ASSERT_EQ(sw::run(job, b, sw::Format::jsonl, 1, err), ExitCode::ok) << err.str();
  auto ra = sw::read_jsonl(a);
  auto rb = sw::read_jsonl(b);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].at("payload").dump(), rb[i].at("payload").dump());
  }
  EXPECT_EQ(sw::verify(a, b, err), ExitCode::ok);
  auto other = make_job(sw::Experiment::prop_suite, "101", "cases=10", 1);
  const std::string c = temp_path("prop_c.jsonl");
  ASSERT_EQ(sw::run(other, c, sw::Format::jsonl, 1, err), ExitCode::ok);
  std::ostringstream diff;
  EXPECT_EQ(sw::verify(a, c, diff), ExitCode::operational);
  EXPECT_NE(diff.str().find("divergence"), std::string::npos);
}

TEST(Sweep, VerifyDetectsDivergenceAndSchemaMismatch) {
  const std::string a = temp_path("v_a.jsonl");
  const std::string b = temp_path("v_b.jsonl");
  const std::string c = temp_path("v_c.jsonl");
  std::ostringstream err;
  ASSERT_EQ(sw::run(make_job(sw::Experiment::markoff_components, "5,7"), a, sw::Format::jsonl, 1, err), ExitCode::ok);
  ASSERT_EQ(sw::run(make_job(sw::Experiment::markoff_components, "11,13"), b, sw::Format::jsonl, 1, err), ExitCode::ok);
  ASSERT_EQ(sw::run(make_job(sw::Experiment::pisano_suite, "2..3"), c, sw::Format::jsonl, 1, err), ExitCode::ok);
  EXPECT_EQ(sw::verify(a, a, err), ExitCode::ok);
  std::ostringstream d1;
  EXPECT_EQ(sw::verify(a, b, d1), ExitCode::operational);
  EXPECT_NE(d1.str().find("divergence at record 1"), std::string::npos);
  std::ostringstream d2;
  EXPECT_EQ(sw::verify(a, c, d2), ExitCode::operational);
  EXPECT_NE(d2.str().find("schema mismatch"), std::string::npos);
  std::ostringstream d3;
  EXPECT_EQ(sw::verify(a, temp_path("missing.jsonl"), d3), ExitCode::operational);
}

TEST(Sweep, CsvFlattensComponentSizes) {
  auto r = sw::execute(make_job(sw::Experiment::hurwitz_components, "5"));
  const std::string csv = sw::to_csv(r.records);
  std::istringstream is(csv);
  std::string header;
  std::string row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_NE(header.find("payload.component_sizes"), std::string::npos);
  EXPECT_NE(row.find("48|40|40"), std::string::npos);
  EXPECT_FALSE(std::getline(is, row) && !row.empty());
}

TEST(Sweep, ResolveThreads) {
  ::unsetenv("MARKOFF_LAB_THREADS");
  EXPECT_EQ(sw::resolve_threads(std::nullopt), 1u);
  ::setenv("MARKOFF_LAB_THREADS", "3", 1);
  EXPECT_EQ(sw::resolve_threads(std::nullopt), 3u);
  EXPECT_EQ(sw::resolve_threads(2u), 2u);
  ::setenv("MARKOFF_LAB_THREADS", "junk", 1);
  EXPECT_EQ(sw::resolve_threads(std::nullopt), 1u);
  ::unsetenv("MARKOFF_LAB_THREADS");
}
