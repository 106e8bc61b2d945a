#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lockstep/memory.hpp"

namespace lockstep::isa {

enum class Format : std::uint8_t { R, I, S, B, U, J };

// RV32I (including FENCE.I and the Zicsr forms) plus the M extension.
enum class Mnemonic : std::uint8_t {
  Lui, Auipc, Jal, Jalr,
  Beq, Bne, Blt, Bge, Bltu, Bgeu,
  Lb, Lh, Lw, Lbu, Lhu,
  Sb, Sh, Sw,
  Addi, Slti, Sltiu, Xori, Ori, Andi, Slli, Srli, Srai,
  Add, Sub, Sll, Slt, Sltu, Xor, Srl, Sra, Or, And,
  Fence, FenceI, Ecall, Ebreak,
  Csrrw, Csrrs, Csrrc, Csrrwi, Csrrsi, Csrrci,
  Mul, Mulh, Mulhsu, Mulhu, Div, Divu, Rem, Remu,
};

inline constexpr std::size_t kMnemonicCount = static_cast<std::size_t>(Mnemonic::Remu) + 1;

enum class Unit : std::uint8_t { Alu, MulDiv, Lsu };

struct DecodedInstr {
  std::uint32_t raw = 0;
  Mnemonic mnemonic = Mnemonic::Addi;
  Format format = Format::I;
  std::uint8_t rd = 0;
  std::uint8_t rs1 = 0;  // holds the 5-bit zimm for CSRR*I
  std::uint8_t rs2 = 0;
  std::int32_t imm = 0;  // CSR forms: the 12-bit CSR number, zero-extended

  bool operator==(const DecodedInstr&) const = default;
};

// Static properties of an instruction class.
struct OpTraits {
  Mnemonic mnemonic;
  std::string_view name;
  Format format;
  std::uint8_t opcode;
  std::uint8_t funct3;
  std::uint8_t funct7;
  Unit unit;
  bool writes_rd;
  bool reads_rs1;
  bool reads_rs2;
  // Must execute with every older instruction retired (reads CSRs or a0/a7).
  bool serializing;
};

const OpTraits& traits(Mnemonic m);
inline const OpTraits& traits(const DecodedInstr& d) { return traits(d.mnemonic); }
std::string_view name(Mnemonic m);

bool is_load(Mnemonic m);
bool is_store(Mnemonic m);
bool is_branch(Mnemonic m);
// Width in bytes of a load or store, 0 otherwise.
unsigned access_width(Mnemonic m);

std::optional<DecodedInstr> try_decode(std::uint32_t word);
// Throws SimError(IllegalInstruction) for anything outside RV32IM/Zicsr.
DecodedInstr decode(std::uint32_t word, std::uint32_t pc = 0);

// Builds the instruction word from mnemonic, registers and immediate.
// Immediates are truncated to the format's field; the caller is expected to
// pass representable values.
std::uint32_t encode(const DecodedInstr& d);
std::uint32_t encode(Mnemonic m, unsigned rd, unsigned rs1, unsigned rs2, std::int32_t imm);

std::string disassemble(const DecodedInstr& d);

// ABI names used by the exit convention.
inline constexpr unsigned kRegA0 = 10;
inline constexpr unsigned kRegA7 = 17;
inline constexpr std::uint32_t kExitSyscall = 93;

inline constexpr std::uint16_t kCsrMinstret = 0xB02;
inline constexpr std::uint16_t kCsrMinstreth = 0xB82;
inline constexpr std::uint16_t kCsrInstret = 0xC02;
inline constexpr std::uint16_t kCsrInstreth = 0xC82;

struct RegWrite {
  std::uint8_t index = 0;
  std::uint32_t value = 0;
  bool operator==(const RegWrite&) const = default;
};

struct MemWrite {
  std::uint32_t addr = 0;
  std::uint8_t width = 0;
  std::uint32_t value = 0;
  bool operator==(const MemWrite&) const = default;
};

struct MemRead {
  std::uint32_t addr = 0;
  std::uint8_t width = 0;
  bool operator==(const MemRead&) const = default;
};

struct ExecEffect {
  std::uint32_t next_pc = 0;
  std::optional<RegWrite> reg_write;
  std::optional<MemWrite> mem_write;
  std::optional<MemRead> mem_read;
  bool halt = false;
  std::uint32_t exit_code = 0;

  bool operator==(const ExecEffect&) const = default;
};

// Values an instruction may observe besides its encoded sources. Only
// serializing instructions look at these.
struct SystemView {
  std::uint32_t a0 = 0;
  std::uint32_t a7 = 0;
  std::uint64_t instret = 0;
};

// Execute-stage semantics. For loads the effect carries mem_read and a
// reg_write whose value is still zero; complete_load fills it in.
ExecEffect execute(const DecodedInstr& d, std::uint32_t pc, std::uint32_t rs1_val, std::uint32_t rs2_val,
                   const SystemView& sys);

// Applies load sign/zero extension to the little-endian value read at
// effect.mem_read and stores it in effect.reg_write.
void complete_load(const DecodedInstr& d, std::uint32_t loaded, ExecEffect& effect);

}  // namespace lockstep::isa

namespace lockstep {

// Architectural state. x0 is kept at zero by every writer.
struct ArchState {
  std::uint32_t pc = 0;
  std::array<std::uint32_t, 32> regs{};
  std::uint64_t minstret = 0;
  std::uint64_t mcycle = 0;
  Memory mem;
};

namespace isa {

// Pure single-instruction semantics against architectural state. Does not
// mutate anything.
ExecEffect step_semantics(const ArchState& state, const DecodedInstr& d);

}  // namespace isa
}  // namespace lockstep
