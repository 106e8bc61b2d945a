#pragma once

// Cycle-level model of a dual-issue, in-order, six-stage RV32IM core:
//
//   IF  fetches two consecutive words per cycle from ideal memory
//   ID  decodes up to two, allocates ROB entries, fills the issue queue;
//       JAL redirects fetch here
//   IS  issues up to two from the queue head, in order, when operands are
//       ready (scoreboard + full bypass) and a unit is free
//   EX  alu0/alu1 (1 cycle), muldiv (MUL 3-cycle pipelined, DIV/REM
//       16-cycle blocking), lsu address generation; branches and JALR
//       resolve here (static not-taken; the redirected target refills
//       IF, ID, IS and issues 3 cycles after the branch)
//   MEM loads read memory, forwarding from older stores still in the ROB
//   WB  marks the ROB entry complete
//
// Up to two complete entries retire per cycle from the ROB head. Stores
// write memory at retirement. Serializing instructions (ECALL, EBREAK, CSR
// reads) issue only from the ROB head.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "lockstep/error.hpp"
#include "lockstep/image.hpp"
#include "lockstep/isa.hpp"
#include "lockstep/iss.hpp"

namespace lockstep::dut {

enum class FaultKind : std::uint8_t { ForwardingDrop, CommitValueCorrupt, CommitOrderSwap, PcSkip, StaleOperand };
enum class TriggerKind : std::uint8_t { Cycle, Seq };

// A single corruption, fired at the first eligible event at or after the
// trigger point:
//   forwarding-drop       an operand that should come off the bypass network
//                         is read from the committed register file instead
//                         (only when the two values differ)
//   commit-value-corrupt  the retired register value is XORed with payload
//   commit-order-swap     the two instructions of a double commit retire in
//                         swapped order
//   pc-skip               the front end drops one fetched word
//   stale-operand         the RAW interlock is ignored once: the consumer
//                         issues with the committed (stale) register value
// Faults that hit an instruction later squashed by a mispredict re-arm.
struct FaultSpec {
  FaultKind kind = FaultKind::CommitValueCorrupt;
  TriggerKind trigger = TriggerKind::Seq;
  std::uint64_t at = 0;
  std::uint32_t payload = 1;

  bool operator==(const FaultSpec&) const = default;
};

// Grammar: kind@(cycle|seq)=N[:payload], e.g. commit-value-corrupt@seq=100:0x1.
// Throws std::invalid_argument.
FaultSpec parse_fault_spec(const std::string& text);
std::string to_string(const FaultSpec& spec);
std::string_view to_string(FaultKind kind);

struct PipelineConfig {
  ExitConfig exit;
  std::uint64_t deadlock_budget = 10'000;
  bool record_issue_log = false;
};

struct CycleResult {
  std::uint64_t cycle = 0;
  std::vector<CommitRecord> commits;
  bool halted = false;
};

struct IssueEvent {
  std::uint64_t seq;
  std::uint64_t cycle;
  std::uint32_t pc;
};

class Pipeline {
 public:
  static constexpr std::size_t kRobSize = 64;
  static constexpr std::size_t kIqSize = 16;
  static constexpr unsigned kFetchWidth = 2;
  static constexpr unsigned kIssueWidth = 2;
  static constexpr unsigned kCommitWidth = 2;
  static constexpr unsigned kAluUnits = 2;
  static constexpr unsigned kMulLatency = 3;
  static constexpr unsigned kDivLatency = 16;

  explicit Pipeline(PipelineConfig config = {});

  void load_image(const MemoryImage& image);
  // Restores the loaded image, zeroes registers and counters, empties every
  // pipeline structure. An armed fault stays armed.
  void reset(std::uint32_t entry_pc);

  // Throws SimError: IllegalInstruction/MisalignedAccess/... when a faulting
  // instruction reaches the ROB head, DeadlockDetected, AlreadyHalted.
  CycleResult tick();

  // Throws SimError(FaultAlreadyArmed) if a fault is already armed this run.
  void inject_fault(const FaultSpec& spec);
  void clear_fault();
  bool fault_fired() const { return fault_ && fault_->fired; }

  // Committed (architectural) state only.
  std::uint32_t read_pc() const { return committed_.pc; }
  std::uint32_t read_reg(unsigned i) const { return committed_.regs[i & 31]; }
  std::vector<std::uint8_t> read_mem(std::uint32_t addr, std::uint32_t len) const {
    return committed_.mem.read_bytes(addr, len);
  }
  const Memory& memory() const { return committed_.mem; }
  std::uint64_t retired() const { return committed_.minstret; }
  const ArchState& committed_state() const { return committed_; }
  // Writes a byte of committed memory directly, bypassing the pipeline.
  void debug_poke(std::uint32_t addr, std::uint8_t value) { committed_.mem.write8(addr, value); }

  std::uint64_t cycle() const { return cycle_; }
  bool halted() const { return halted_; }
  std::uint32_t exit_code() const { return exit_code_; }
  std::size_t rob_occupancy() const { return rob_.size(); }
  std::size_t iq_occupancy() const { return iq_.size(); }
  const std::vector<IssueEvent>& issue_log() const { return issue_log_; }

  // Empty when every structural invariant holds.
  std::vector<std::string> check_invariants() const;

 private:
  enum class Lane : std::uint8_t { Alu0, Alu1, MulDiv, Lsu };

  struct FetchedWord {
    std::uint32_t pc;
    std::uint32_t raw;
    bool mapped;
  };

  struct RobEntry {
    std::uint64_t seq = 0;
    std::uint32_t pc = 0;
    std::uint32_t raw = 0;
    std::optional<isa::DecodedInstr> instr;
    std::optional<SimError> fault;
    std::uint32_t predicted_next = 0;
    std::optional<std::uint64_t> producer[2];  // youngest older writer of rs1/rs2
    bool issued = false;
    bool executed = false;     // effect computed (address known for memory ops)
    bool value_ready = false;  // result available on the bypass network
    bool done = false;         // written back, eligible to retire
    isa::ExecEffect effect;
  };

  struct InFlight {
    std::uint64_t seq;
    Lane lane;
    unsigned remaining;
    std::uint32_t a, b;
  };

  struct ArmedFault {
    FaultSpec spec;
    bool fired = false;
    std::uint64_t victim = 0;
  };

  RobEntry& entry(std::uint64_t seq) { return rob_[seq - rob_.front().seq]; }
  const RobEntry& entry(std::uint64_t seq) const { return rob_[seq - rob_.front().seq]; }
  bool in_rob(std::uint64_t seq) const {
    return !rob_.empty() && seq >= rob_.front().seq && seq <= rob_.back().seq;
  }

  void do_commit(CycleResult& out);
  void do_writeback();
  void do_memory();
  void do_execute();
  void do_issue();
  void do_decode();
  void do_fetch();

  CommitRecord retire(RobEntry& e);
  void flush_after(std::uint64_t seq, std::uint32_t redirect);
  void rebuild_rename();
  std::uint32_t load_with_forwarding(std::uint64_t load_seq, std::uint32_t addr, unsigned width) const;
  bool trigger_reached(std::uint64_t seq) const;

  PipelineConfig config_;
  MemoryImage image_;
  ArchState committed_;

  std::uint64_t cycle_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint32_t fetch_pc_ = 0;
  bool halted_ = false;
  bool faulted_ = false;
  std::uint32_t exit_code_ = 0;
  std::uint64_t idle_cycles_ = 0;

  std::deque<FetchedWord> fetch_buf_;
  std::deque<RobEntry> rob_;
  std::deque<std::uint64_t> iq_;
  std::vector<InFlight> in_flight_;
  std::vector<std::uint64_t> mem_latch_;
  std::vector<std::uint64_t> wb_latch_;
  std::optional<std::uint64_t> rename_[32];

  std::optional<ArmedFault> fault_;
  std::vector<IssueEvent> issue_log_;
};

}  // namespace lockstep::dut
