#include <cmath>
#include <random>

#include "doctest.h"
#include "lockstep/isa.hpp"
#include "lockstep/scoreboard.hpp"

using namespace lockstep;
using namespace lockstep::stats;

namespace {

CommitRecord nop(std::uint64_t seq) { return CommitRecord{seq, 0, 0x00000013, {}, {}, false}; }

}  // namespace

TEST_CASE("reference commit mix: 4422 double, 3312 single") {
  Scoreboard sb("matmult");
  std::vector<CommitRecord> two = {nop(0), nop(1)}, one = {nop(0)};
  for (int i = 0; i < 4422; i++) sb.record_cycle(two);
  for (int i = 0; i < 3312; i++) sb.record_cycle(one);
  const auto r = sb.finalize();
  // oracle: each double cycle retires two, each single one
  const std::uint64_t expect_instr = 2 * 4422 + 3312;
  CHECK(expect_instr == 12156);
  CHECK(r.instructions == expect_instr);
  CHECK(r.double_commits == 4422);
  CHECK(r.single_commits == 3312);
  CHECK(r.double_fraction == doctest::Approx(4422.0 / (4422.0 + 3312.0)));
  CHECK(std::round(r.double_fraction * 100) == 57);
  CHECK(r.coverage.at("addi") == expect_instr);
}

TEST_CASE("538 cycles at 77 MHz is 6.99 us") {
  Scoreboard sb("fac");
  std::vector<CommitRecord> one = {nop(0)}, none;
  for (int i = 0; i < 124; i++) sb.record_cycle(one);
  for (int i = 0; i < 538 - 124; i++) sb.record_cycle(none);
  const auto r = sb.finalize();
  CHECK(r.cycles == 538);
  CHECK(r.exec_time_us == doctest::Approx(538.0 / 77.0));
  CHECK(std::fabs(r.exec_time_us - 6.99) <= 0.01);
  CHECK(r.cpi == doctest::Approx(538.0 / 124.0));
  CHECK(sb.finalize(100.0).exec_time_us == doctest::Approx(5.38));
}

TEST_CASE("no instructions") {
  Scoreboard sb;
  sb.record_cycle({});
  CHECK_THROWS_AS(sb.finalize(), ZeroInstructions);
}

TEST_CASE("identities on a random commit stream") {
  std::mt19937 rng(5);
  Scoreboard sb("rand");
  std::uint64_t cycles = 0, instr = 0;
  std::vector<CommitRecord> buf;
  for (int i = 0; i < 5000; i++) {
    const unsigned n = rng() % 3;
    buf.assign(n, nop(0));
    sb.record_cycle(buf);
    cycles++;
    instr += n;
  }
  const auto r = sb.finalize();
  CHECK(r.cycles == cycles);
  CHECK(r.instructions == instr);
  CHECK(r.instructions == r.single_commits + 2 * r.double_commits);
  CHECK(r.cycles * 2 >= r.instructions);
  std::uint64_t cov = 0;
  for (const auto& [k, v] : r.coverage) cov += v;
  CHECK(cov == r.instructions);
}

TEST_CASE("key=value report round trips exactly") {
  Scoreboard sb("crc");
  std::vector<CommitRecord> mix = {CommitRecord{0, 0, 0x00A50533, {}, {}, false}, nop(1)};
  for (int i = 0; i < 7; i++) sb.record_cycle(mix);
  sb.record_cycle(std::vector<CommitRecord>{CommitRecord{0, 0, 0xFFFFFFFF, {}, {}, false}});
  sb.record_cycle({});
  const auto r = sb.finalize(76.5);
  const auto text = render_kv(r);
  CHECK(text.rfind("lockstep-stats-version=1\n", 0) == 0);
  CHECK(parse_kv(text) == r);
  CHECK(r.coverage.at("illegal") == 1);
  CHECK_THROWS_AS(parse_kv("program=x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_kv(text + "bogus=1\n"), std::invalid_argument);
}

TEST_CASE("shortest round-trip doubles") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(77) == "77");
  const double x = 538.0 / 77.0;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("text report and csv") {
  Scoreboard sb("fac");
  std::vector<CommitRecord> one = {nop(0)};
  sb.record_cycle(one);
  sb.record_cycle({});
  const auto text = render_text(sb.finalize());
  CHECK(text.find("Application") != std::string::npos);
  CHECK(text.find("fac") != std::string::npos);
  CHECK(render_commit_csv(sb.per_cycle()) == "cycle,commits\n1,1\n2,0\n");
}
