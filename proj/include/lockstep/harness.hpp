#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <variant>

#include "lockstep/image.hpp"
#include "lockstep/iss.hpp"
#include "lockstep/net.hpp"
#include "lockstep/pipeline.hpp"
#include "lockstep/scoreboard.hpp"

namespace lockstep::harness {

struct Location {
  // Instr: same PC but a different instruction word retired.
  enum class Kind : std::uint8_t { Pc, Instr, Reg, Mem, RetirementCount };
  Kind kind = Kind::Pc;
  std::uint32_t index = 0;  // register number or byte address

  bool operator==(const Location&) const = default;
};

std::string to_string(const Location& loc);

// Marks "no write" in MismatchReport::expected/actual (values are 32-bit).
inline constexpr std::uint64_t kNoWrite = std::uint64_t{1} << 32;

struct MismatchReport {
  std::uint64_t cycle = 0;
  std::uint32_t pc_dut = 0;
  std::uint32_t pc_iss = 0;
  Location location;
  std::uint64_t expected = 0;  // ISS
  std::uint64_t actual = 0;    // DUT
  std::uint64_t seq = 0;
  std::string disassembly;

  bool operator==(const MismatchReport&) const = default;
};

struct Ok {
  stats::StatsReport stats;
};
struct Mismatch {
  MismatchReport report;
};
struct EnvError {
  std::string detail;
};
using Verdict = std::variant<Ok, Mismatch, EnvError>;

// 0 for Ok, 1 for Mismatch, 2 for EnvError.
int exit_code(const Verdict& v);

struct RunConfig {
  std::string program_name;
  double clock_mhz = stats::kDefaultClockMhz;
  std::uint64_t max_cycles = 10'000'000;
  // Called once per retired DUT instruction when set.
  std::function<void(std::uint64_t cycle, const CommitRecord&)> on_commit;
  // Called every cycle after the tick; a non-empty result aborts the run
  // with EnvError.
  using OnCycle = std::function<std::vector<std::string>(const dut::Pipeline&, const dut::CycleResult&)>;
  OnCycle on_cycle;
};

// The remote view of the golden model used by the harness.
class IssPort {
 public:
  virtual ~IssPort() = default;
  virtual void load_image(const MemoryImage& image) = 0;
  virtual void reset(std::uint32_t entry) = 0;
  virtual std::vector<CommitRecord> step(std::uint32_t n) = 0;
  virtual std::uint32_t get_reg(unsigned i) = 0;
  virtual std::uint32_t get_pc() = 0;
  virtual std::vector<std::uint8_t> get_mem(std::uint32_t addr, std::uint32_t len) = 0;
  virtual std::uint64_t get_retired() = 0;
};

// In-process adapter, for tests that do not need a socket.
class LocalPort final : public IssPort {
 public:
  explicit LocalPort(Iss& iss) : iss_(iss) {}
  void load_image(const MemoryImage& image) override { iss_.load_image(image); }
  void reset(std::uint32_t entry) override { iss_.reset(entry); }
  std::vector<CommitRecord> step(std::uint32_t n) override { return iss_.step(n); }
  std::uint32_t get_reg(unsigned i) override { return iss_.read_reg(i); }
  std::uint32_t get_pc() override { return iss_.read_pc(); }
  std::vector<std::uint8_t> get_mem(std::uint32_t addr, std::uint32_t len) override {
    return iss_.read_mem(addr, len);
  }
  std::uint64_t get_retired() override { return iss_.read_csr(Csr::Minstret); }

 private:
  Iss& iss_;
};

// Adapter over the socket client.
class ClientPort final : public IssPort {
 public:
  explicit ClientPort(net::IssClient& client) : client_(client) {}
  void load_image(const MemoryImage& image) override { client_.load_image(image); }
  void reset(std::uint32_t entry) override { client_.reset(entry); }
  std::vector<CommitRecord> step(std::uint32_t n) override { return client_.step(n); }
  std::uint32_t get_reg(unsigned i) override { return client_.get_reg(i); }
  std::uint32_t get_pc() override { return client_.get_pc(); }
  std::vector<std::uint8_t> get_mem(std::uint32_t addr, std::uint32_t len) override {
    return client_.get_mem(addr, len);
  }
  std::uint64_t get_retired() override { return client_.get_csr(Csr::Minstret); }

 private:
  net::IssClient& client_;
};

// Drives the DUT cycle by cycle, steps the ISS by each cycle's commit count,
// compares every retirement and the commit-point PC, and on halt sweeps the
// full register file plus every byte either side ever stored to.
Verdict run(const MemoryImage& image, dut::Pipeline& dut, IssPort& iss, const RunConfig& config = {});
Verdict run(const MemoryImage& image, dut::Pipeline& dut, net::IssClient& client, const RunConfig& config = {});

// Field priority: pc, instruction word, register write, memory write. A
// register or memory write present on one side only reports kNoWrite for the
// other; memory writes differing in address or width report the first
// differing byte.
std::optional<MismatchReport> compare_commit(const CommitRecord& dut, const CommitRecord& iss, std::uint64_t cycle);

// Byte addresses written by committed stores on either side.
using DirtySet = std::set<std::uint32_t>;
void mark_dirty(DirtySet& dirty, const CommitRecord& rec);

// Compares x1..x31, the PC and every dirty byte.
std::optional<MismatchReport> compare_state(const dut::Pipeline& dut, IssPort& iss, const DirtySet& dirty,
                                            std::uint64_t cycle);

// Multi-line human-readable verdict.
std::string render_verdict(const Verdict& v);
// key=value form of a MismatchReport (lockstep-mismatch-version=1).
std::string render_mismatch_kv(const MismatchReport& m);
// One trace line: cycle, seq, pc, disassembly, effect.
std::string format_trace_line(std::uint64_t cycle, const CommitRecord& rec);

}  // namespace lockstep::harness
