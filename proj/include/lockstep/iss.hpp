#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lockstep/image.hpp"
#include "lockstep/isa.hpp"

namespace lockstep {

// One retired instruction, as produced by both the ISS and the pipeline.
struct CommitRecord {
  std::uint64_t seq = 0;
  std::uint32_t pc = 0;
  std::uint32_t raw = 0;
  std::optional<isa::RegWrite> reg_write;
  std::optional<isa::MemWrite> mem_write;
  bool halt = false;

  bool operator==(const CommitRecord&) const = default;
};

struct ExitConfig {
  // A 4-byte store to this address halts the program with the stored value
  // as exit code.
  std::optional<std::uint32_t> tohost;
};

enum class Csr : std::uint16_t {
  Minstret = isa::kCsrMinstret,
  Mcycle = 0xB00,
};

// Functional golden model: one architectural instruction per step.
class Iss {
 public:
  explicit Iss(ExitConfig exit = {}) : exit_(exit) {}

  // Replaces memory with the image. The image is kept so reset() can restore
  // pristine memory.
  void load_image(const MemoryImage& image);
  void reset(std::uint32_t entry_pc);

  // Executes up to n instructions; the result is shorter than n only when the
  // program halted. Errors carry pc/raw and leave the ISS faulted.
  std::vector<CommitRecord> step(std::uint32_t n);

  std::uint32_t read_reg(unsigned i) const { return state_.regs[i & 31]; }
  std::uint32_t read_pc() const { return state_.pc; }
  std::vector<std::uint8_t> read_mem(std::uint32_t addr, std::uint32_t len) const {
    return state_.mem.read_bytes(addr, len);
  }
  // Throws SimError(UnsupportedCsr) for anything but minstret; mcycle is not
  // modeled by a functional simulator.
  std::uint64_t read_csr(Csr id) const;

  bool halted() const { return halted_; }
  bool faulted() const { return faulted_; }
  std::uint32_t exit_code() const { return exit_code_; }
  const ArchState& state() const { return state_; }

 private:
  CommitRecord step_one();

  ExitConfig exit_;
  MemoryImage image_;
  ArchState state_;
  std::uint64_t next_seq_ = 0;
  bool halted_ = false;
  bool faulted_ = false;
  std::uint32_t exit_code_ = 0;
};

}  // namespace lockstep
