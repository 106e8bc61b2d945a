#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lockstep/iss.hpp"

namespace lockstep::stats {

inline constexpr double kDefaultClockMhz = 77.0;
inline constexpr int kReportVersion = 1;

struct StatsReport {
  std::string program;
  std::uint64_t instructions = 0;
  std::uint64_t cycles = 0;
  double cpi = 0.0;
  double clock_mhz = kDefaultClockMhz;
  double exec_time_us = 0.0;
  std::uint64_t single_commits = 0;
  std::uint64_t double_commits = 0;
  // Double-commit cycles over committing cycles; idle cycles do not count.
  double double_fraction = 0.0;
  std::map<std::string, std::uint64_t> coverage;

  bool operator==(const StatsReport&) const = default;
};

class ZeroInstructions : public std::runtime_error {
 public:
  ZeroInstructions() : std::runtime_error("no instructions retired") {}
};

// Accumulates per-cycle commit counts and per-mnemonic coverage.
class Scoreboard {
 public:
  explicit Scoreboard(std::string program = {}) : program_(std::move(program)) {}

  // commits.size() must be 0, 1 or 2.
  void record_cycle(std::span<const CommitRecord> commits);

  // Throws ZeroInstructions when nothing retired.
  StatsReport finalize(double clock_mhz = kDefaultClockMhz) const;

  std::uint64_t cycles() const { return cycles_; }
  std::uint64_t instructions() const { return single_ + 2 * double_; }
  const std::vector<std::uint8_t>& per_cycle() const { return per_cycle_; }

 private:
  std::string program_;
  std::uint64_t cycles_ = 0;
  std::uint64_t single_ = 0;
  std::uint64_t double_ = 0;
  std::map<std::string, std::uint64_t> coverage_;
  std::vector<std::uint8_t> per_cycle_;
};

// Table-style summary: Application, Instructions, Cycles, us, Correctness,
// then the commit breakdown and the coverage list.
std::string render_text(const StatsReport& report, const std::string& correctness = "OK");

// Versioned key=value report, one field per line:
//   lockstep-stats-version=1
//   program=... instructions=... cycles=... cpi=... clock_mhz=...
//   exec_time_us=... single_commits=... double_commits=... double_fraction=...
//   coverage.<mnemonic>=<count>   (one line per retired mnemonic)
// Floating-point values use the shortest round-trip representation.
std::string render_kv(const StatsReport& report);
// Throws std::invalid_argument on a missing field, unknown key or bad version.
StatsReport parse_kv(const std::string& text);

// cycle,commits rows for external plotting.
std::string render_commit_csv(std::span<const std::uint8_t> per_cycle);

// Shortest decimal form of v that parses back to exactly v.
std::string format_double(double v);

}  // namespace lockstep::stats
