#include "lockstep/isa.hpp"

#include <cstdio>

#include "lockstep/error.hpp"

namespace lockstep::isa {
namespace {

constexpr std::uint8_t kOpLui = 0x37;
constexpr std::uint8_t kOpAuipc = 0x17;
constexpr std::uint8_t kOpJal = 0x6F;
constexpr std::uint8_t kOpJalr = 0x67;
constexpr std::uint8_t kOpBranch = 0x63;
constexpr std::uint8_t kOpLoad = 0x03;
constexpr std::uint8_t kOpStore = 0x23;
constexpr std::uint8_t kOpImm = 0x13;
constexpr std::uint8_t kOpReg = 0x33;
constexpr std::uint8_t kOpMiscMem = 0x0F;
constexpr std::uint8_t kOpSystem = 0x73;

using M = Mnemonic;
using F = Format;
using U = Unit;

// Indexed by Mnemonic. Columns: format, opcode, funct3, funct7, unit,
// writes_rd, reads_rs1, reads_rs2, serializing.
constexpr OpTraits kTraits[kMnemonicCount] = {
    {M::Lui, "lui", F::U, kOpLui, 0, 0, U::Alu, true, false, false, false},
    {M::Auipc, "auipc", F::U, kOpAuipc, 0, 0, U::Alu, true, false, false, false},
    {M::Jal, "jal", F::J, kOpJal, 0, 0, U::Alu, true, false, false, false},
    {M::Jalr, "jalr", F::I, kOpJalr, 0, 0, U::Alu, true, true, false, false},
    {M::Beq, "beq", F::B, kOpBranch, 0, 0, U::Alu, false, true, true, false},
    {M::Bne, "bne", F::B, kOpBranch, 1, 0, U::Alu, false, true, true, false},
    {M::Blt, "blt", F::B, kOpBranch, 4, 0, U::Alu, false, true, true, false},
    {M::Bge, "bge", F::B, kOpBranch, 5, 0, U::Alu, false, true, true, false},
    {M::Bltu, "bltu", F::B, kOpBranch, 6, 0, U::Alu, false, true, true, false},
    {M::Bgeu, "bgeu", F::B, kOpBranch, 7, 0, U::Alu, false, true, true, false},
    {M::Lb, "lb", F::I, kOpLoad, 0, 0, U::Lsu, true, true, false, false},
    {M::Lh, "lh", F::I, kOpLoad, 1, 0, U::Lsu, true, true, false, false},
    {M::Lw, "lw", F::I, kOpLoad, 2, 0, U::Lsu, true, true, false, false},
    {M::Lbu, "lbu", F::I, kOpLoad, 4, 0, U::Lsu, true, true, false, false},
    {M::Lhu, "lhu", F::I, kOpLoad, 5, 0, U::Lsu, true, true, false, false},
    {M::Sb, "sb", F::S, kOpStore, 0, 0, U::Lsu, false, true, true, false},
    {M::Sh, "sh", F::S, kOpStore, 1, 0, U::Lsu, false, true, true, false},
    {M::Sw, "sw", F::S, kOpStore, 2, 0, U::Lsu, false, true, true, false},
    {M::Addi, "addi", F::I, kOpImm, 0, 0, U::Alu, true, true, false, false},
    {M::Slti, "slti", F::I, kOpImm, 2, 0, U::Alu, true, true, false, false},
    {M::Sltiu, "sltiu", F::I, kOpImm, 3, 0, U::Alu, true, true, false, false},
    {M::Xori, "xori", F::I, kOpImm, 4, 0, U::Alu, true, true, false, false},
    {M::Ori, "ori", F::I, kOpImm, 6, 0, U::Alu, true, true, false, false},
    {M::Andi, "andi", F::I, kOpImm, 7, 0, U::Alu, true, true, false, false},
    {M::Slli, "slli", F::I, kOpImm, 1, 0x00, U::Alu, true, true, false, false},
    {M::Srli, "srli", F::I, kOpImm, 5, 0x00, U::Alu, true, true, false, false},
    {M::Srai, "srai", F::I, kOpImm, 5, 0x20, U::Alu, true, true, false, false},
    {M::Add, "add", F::R, kOpReg, 0, 0x00, U::Alu, true, true, true, false},
    {M::Sub, "sub", F::R, kOpReg, 0, 0x20, U::Alu, true, true, true, false},
    {M::Sll, "sll", F::R, kOpReg, 1, 0x00, U::Alu, true, true, true, false},
    {M::Slt, "slt", F::R, kOpReg, 2, 0x00, U::Alu, true, true, true, false},
    {M::Sltu, "sltu", F::R, kOpReg, 3, 0x00, U::Alu, true, true, true, false},
    {M::Xor, "xor", F::R, kOpReg, 4, 0x00, U::Alu, true, true, true, false},
    {M::Srl, "srl", F::R, kOpReg, 5, 0x00, U::Alu, true, true, true, false},
    {M::Sra, "sra", F::R, kOpReg, 5, 0x20, U::Alu, true, true, true, false},
    {M::Or, "or", F::R, kOpReg, 6, 0x00, U::Alu, true, true, true, false},
    {M::And, "and", F::R, kOpReg, 7, 0x00, U::Alu, true, true, true, false},
    {M::Fence, "fence", F::I, kOpMiscMem, 0, 0, U::Alu, false, false, false, false},
    {M::FenceI, "fence.i", F::I, kOpMiscMem, 1, 0, U::Alu, false, false, false, false},
    {M::Ecall, "ecall", F::I, kOpSystem, 0, 0, U::Alu, false, false, false, true},
    {M::Ebreak, "ebreak", F::I, kOpSystem, 0, 0, U::Alu, false, false, false, true},
    {M::Csrrw, "csrrw", F::I, kOpSystem, 1, 0, U::Alu, true, true, false, true},
    {M::Csrrs, "csrrs", F::I, kOpSystem, 2, 0, U::Alu, true, true, false, true},
    {M::Csrrc, "csrrc", F::I, kOpSystem, 3, 0, U::Alu, true, true, false, true},
    {M::Csrrwi, "csrrwi", F::I, kOpSystem, 5, 0, U::Alu, true, false, false, true},
    {M::Csrrsi, "csrrsi", F::I, kOpSystem, 6, 0, U::Alu, true, false, false, true},
    {M::Csrrci, "csrrci", F::I, kOpSystem, 7, 0, U::Alu, true, false, false, true},
    {M::Mul, "mul", F::R, kOpReg, 0, 0x01, U::MulDiv, true, true, true, false},
    {M::Mulh, "mulh", F::R, kOpReg, 1, 0x01, U::MulDiv, true, true, true, false},
    {M::Mulhsu, "mulhsu", F::R, kOpReg, 2, 0x01, U::MulDiv, true, true, true, false},
    {M::Mulhu, "mulhu", F::R, kOpReg, 3, 0x01, U::MulDiv, true, true, true, false},
    {M::Div, "div", F::R, kOpReg, 4, 0x01, U::MulDiv, true, true, true, false},
    {M::Divu, "divu", F::R, kOpReg, 5, 0x01, U::MulDiv, true, true, true, false},
    {M::Rem, "rem", F::R, kOpReg, 6, 0x01, U::MulDiv, true, true, true, false},
    {M::Remu, "remu", F::R, kOpReg, 7, 0x01, U::MulDiv, true, true, true, false},
};

constexpr bool table_is_ordered() {
  for (std::size_t i = 0; i < kMnemonicCount; ++i) {
    if (static_cast<std::size_t>(kTraits[i].mnemonic) != i) return false;
  }
  return true;
}
static_assert(table_is_ordered(), "kTraits must be indexed by Mnemonic");

constexpr std::int32_t sext(std::uint32_t value, unsigned bits) {
  const std::uint32_t m = 1u << (bits - 1);
  value &= (bits == 32) ? ~0u : ((1u << bits) - 1);
  return static_cast<std::int32_t>((value ^ m) - m);
}

constexpr std::int32_t imm_i(std::uint32_t w) { return sext(w >> 20, 12); }
constexpr std::int32_t imm_s(std::uint32_t w) { return sext(((w >> 25) << 5) | ((w >> 7) & 0x1F), 12); }
constexpr std::int32_t imm_b(std::uint32_t w) {
  return sext(((w >> 31) << 12) | (((w >> 7) & 1) << 11) | (((w >> 25) & 0x3F) << 5) | (((w >> 8) & 0xF) << 1), 13);
}
constexpr std::int32_t imm_u(std::uint32_t w) { return static_cast<std::int32_t>(w & 0xFFFFF000u); }
constexpr std::int32_t imm_j(std::uint32_t w) {
  return sext(((w >> 31) << 20) | (((w >> 12) & 0xFF) << 12) | (((w >> 20) & 1) << 11) | (((w >> 21) & 0x3FF) << 1),
              21);
}

DecodedInstr make(std::uint32_t w, Mnemonic m) {
  const OpTraits& t = kTraits[static_cast<std::size_t>(m)];
  DecodedInstr d;
  d.raw = w;
  d.mnemonic = m;
  d.format = t.format;
  const auto rd = static_cast<std::uint8_t>((w >> 7) & 0x1F);
  const auto rs1 = static_cast<std::uint8_t>((w >> 15) & 0x1F);
  const auto rs2 = static_cast<std::uint8_t>((w >> 20) & 0x1F);
  switch (t.format) {
    case F::R: d.rd = rd; d.rs1 = rs1; d.rs2 = rs2; break;
    case F::I: d.rd = rd; d.rs1 = rs1; d.imm = imm_i(w); break;
    case F::S: d.rs1 = rs1; d.rs2 = rs2; d.imm = imm_s(w); break;
    case F::B: d.rs1 = rs1; d.rs2 = rs2; d.imm = imm_b(w); break;
    case F::U: d.rd = rd; d.imm = imm_u(w); break;
    case F::J: d.rd = rd; d.imm = imm_j(w); break;
  }
  return d;
}

std::optional<Mnemonic> classify(std::uint32_t w) {
  const std::uint32_t opcode = w & 0x7F;
  const std::uint32_t f3 = (w >> 12) & 7;
  const std::uint32_t f7 = w >> 25;
  switch (opcode) {
    case kOpLui: return M::Lui;
    case kOpAuipc: return M::Auipc;
    case kOpJal: return M::Jal;
    case kOpJalr:
      if (f3 == 0) return M::Jalr;
      return std::nullopt;
    case kOpBranch: {
      constexpr std::optional<Mnemonic> b[8] = {M::Beq, M::Bne, std::nullopt, std::nullopt,
                                                M::Blt, M::Bge, M::Bltu, M::Bgeu};
      return b[f3];
    }
    case kOpLoad: {
      constexpr std::optional<Mnemonic> l[8] = {M::Lb, M::Lh, M::Lw, std::nullopt,
                                                M::Lbu, M::Lhu, std::nullopt, std::nullopt};
      return l[f3];
    }
    case kOpStore:
      if (f3 <= 2) return f3 == 0 ? M::Sb : f3 == 1 ? M::Sh : M::Sw;
      return std::nullopt;
    case kOpImm:
      switch (f3) {
        case 0: return M::Addi;
        case 2: return M::Slti;
        case 3: return M::Sltiu;
        case 4: return M::Xori;
        case 6: return M::Ori;
        case 7: return M::Andi;
        case 1: return f7 == 0 ? std::optional(M::Slli) : std::nullopt;
        case 5:
          if (f7 == 0) return M::Srli;
          if (f7 == 0x20) return M::Srai;
          return std::nullopt;
      }
      return std::nullopt;
    case kOpReg:
      if (f7 == 0x01) {
        return static_cast<Mnemonic>(static_cast<unsigned>(M::Mul) + f3);
      }
      if (f7 == 0x00) {
        constexpr Mnemonic r[8] = {M::Add, M::Sll, M::Slt, M::Sltu, M::Xor, M::Srl, M::Or, M::And};
        return r[f3];
      }
      if (f7 == 0x20) {
        if (f3 == 0) return M::Sub;
        if (f3 == 5) return M::Sra;
      }
      return std::nullopt;
    case kOpMiscMem:
      if (f3 == 0) return M::Fence;
      if (f3 == 1) return M::FenceI;
      return std::nullopt;
    case kOpSystem:
      switch (f3) {
        case 0:
          if (w == 0x00000073) return M::Ecall;
          if (w == 0x00100073) return M::Ebreak;
          return std::nullopt;
        case 1: return M::Csrrw;
        case 2: return M::Csrrs;
        case 3: return M::Csrrc;
        case 5: return M::Csrrwi;
        case 6: return M::Csrrsi;
        case 7: return M::Csrrci;
      }
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

std::string reg_name(unsigned r) { return "x" + std::to_string(r); }

[[noreturn]] void misaligned(std::uint32_t pc, std::uint32_t raw, std::uint32_t addr, unsigned width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "address 0x%08x width %u", addr, width);
  throw SimError(SimErrorKind::MisalignedAccess, pc, raw, buf);
}

std::uint32_t jump_target(const DecodedInstr& d, std::uint32_t pc, std::uint32_t target) {
  if (target & 3) misaligned(pc, d.raw, target, 4);
  return target;
}

std::uint32_t read_csr(const DecodedInstr& d, std::uint32_t pc, const SystemView& sys) {
  const auto csr = static_cast<std::uint16_t>(d.imm & 0xFFF);
  // Only read-only accesses to the retired-instruction counter are modeled.
  const bool writes = d.mnemonic == M::Csrrw || d.mnemonic == M::Csrrwi || d.rs1 != 0;
  if (writes) throw SimError(SimErrorKind::UnsupportedCsr, pc, d.raw, "CSR writes are not modeled");
  switch (csr) {
    case kCsrMinstret:
    case kCsrInstret:
      return static_cast<std::uint32_t>(sys.instret);
    case kCsrMinstreth:
    case kCsrInstreth:
      return static_cast<std::uint32_t>(sys.instret >> 32);
    default: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "csr 0x%03x is not implemented", csr);
      throw SimError(SimErrorKind::UnsupportedCsr, pc, d.raw, buf);
    }
  }
}

std::uint32_t divide(Mnemonic m, std::uint32_t a, std::uint32_t b) {
  const auto sa = static_cast<std::int32_t>(a);
  const auto sb = static_cast<std::int32_t>(b);
  const bool overflow = a == 0x80000000u && b == 0xFFFFFFFFu;
  switch (m) {
    case M::Div:
      if (b == 0) return 0xFFFFFFFFu;
      if (overflow) return a;
      return static_cast<std::uint32_t>(sa / sb);
    case M::Divu:
      return b == 0 ? 0xFFFFFFFFu : a / b;
    case M::Rem:
      if (b == 0) return a;
      if (overflow) return 0;
      return static_cast<std::uint32_t>(sa % sb);
    case M::Remu:
      return b == 0 ? a : a % b;
    default:
      return 0;
  }
}

}  // namespace

const OpTraits& traits(Mnemonic m) { return kTraits[static_cast<std::size_t>(m)]; }
std::string_view name(Mnemonic m) { return traits(m).name; }

bool is_load(Mnemonic m) { return m >= M::Lb && m <= M::Lhu; }
bool is_store(Mnemonic m) { return m >= M::Sb && m <= M::Sw; }
bool is_branch(Mnemonic m) { return m >= M::Beq && m <= M::Bgeu; }

unsigned access_width(Mnemonic m) {
  switch (m) {
    case M::Lb: case M::Lbu: case M::Sb: return 1;
    case M::Lh: case M::Lhu: case M::Sh: return 2;
    case M::Lw: case M::Sw: return 4;
    default: return 0;
  }
}

std::optional<DecodedInstr> try_decode(std::uint32_t word) {
  if ((word & 3) != 3) return std::nullopt;
  auto m = classify(word);
  if (!m) return std::nullopt;
  return make(word, *m);
}

DecodedInstr decode(std::uint32_t word, std::uint32_t pc) {
  if (auto d = try_decode(word)) return *d;
  throw SimError(SimErrorKind::IllegalInstruction, pc, word, "not an RV32IM instruction");
}

std::uint32_t encode(const DecodedInstr& d) {
  const OpTraits& t = traits(d.mnemonic);
  const std::uint32_t rd = d.rd & 0x1Fu;
  const std::uint32_t rs1 = d.rs1 & 0x1Fu;
  const std::uint32_t rs2 = d.rs2 & 0x1Fu;
  const auto imm = static_cast<std::uint32_t>(d.imm);
  std::uint32_t w = t.opcode | (std::uint32_t{t.funct3} << 12);
  switch (t.format) {
    case F::R:
      w |= (rd << 7) | (rs1 << 15) | (rs2 << 20) | (std::uint32_t{t.funct7} << 25);
      break;
    case F::I:
      if (d.mnemonic == M::Slli || d.mnemonic == M::Srli || d.mnemonic == M::Srai) {
        w |= (rd << 7) | (rs1 << 15) | ((imm & 0x1F) << 20) | (std::uint32_t{t.funct7} << 25);
      } else if (d.mnemonic == M::Ebreak) {
        w |= 1u << 20;
      } else {
        w |= (rd << 7) | (rs1 << 15) | ((imm & 0xFFF) << 20);
      }
      break;
    case F::S:
      w |= ((imm & 0x1F) << 7) | (rs1 << 15) | (rs2 << 20) | (((imm >> 5) & 0x7F) << 25);
      break;
    case F::B:
      w |= (((imm >> 11) & 1) << 7) | (((imm >> 1) & 0xF) << 8) | (rs1 << 15) | (rs2 << 20) |
           (((imm >> 5) & 0x3F) << 25) | (((imm >> 12) & 1) << 31);
      break;
    case F::U:
      w |= (rd << 7) | (imm & 0xFFFFF000u);
      break;
    case F::J:
      w |= (rd << 7) | (((imm >> 12) & 0xFF) << 12) | (((imm >> 11) & 1) << 20) | (((imm >> 1) & 0x3FF) << 21) |
           (((imm >> 20) & 1) << 31);
      break;
  }
  return w;
}

std::uint32_t encode(Mnemonic m, unsigned rd, unsigned rs1, unsigned rs2, std::int32_t imm) {
  DecodedInstr d;
  d.mnemonic = m;
  d.format = traits(m).format;
  d.rd = static_cast<std::uint8_t>(rd);
  d.rs1 = static_cast<std::uint8_t>(rs1);
  d.rs2 = static_cast<std::uint8_t>(rs2);
  d.imm = imm;
  return encode(d);
}

std::string disassemble(const DecodedInstr& d) {
  const OpTraits& t = traits(d.mnemonic);
  std::string out(t.name);
  auto x = [](unsigned r) { return reg_name(r); };
  char hex[16];
  switch (d.mnemonic) {
    case M::Ecall:
    case M::Ebreak:
    case M::FenceI:
      return out;
    case M::Fence: {
      std::snprintf(hex, sizeof hex, "0x%x", static_cast<unsigned>(d.imm) & 0xFFF);
      return out + " " + hex;
    }
    case M::Lui:
    case M::Auipc:
      std::snprintf(hex, sizeof hex, "0x%x", static_cast<std::uint32_t>(d.imm) >> 12);
      return out + " " + x(d.rd) + ", " + hex;
    case M::Jal:
      return out + " " + x(d.rd) + ", " + std::to_string(d.imm);
    case M::Csrrw:
    case M::Csrrs:
    case M::Csrrc:
      std::snprintf(hex, sizeof hex, "0x%03x", static_cast<unsigned>(d.imm) & 0xFFF);
      return out + " " + x(d.rd) + ", " + hex + ", " + x(d.rs1);
    case M::Csrrwi:
    case M::Csrrsi:
    case M::Csrrci:
      std::snprintf(hex, sizeof hex, "0x%03x", static_cast<unsigned>(d.imm) & 0xFFF);
      return out + " " + x(d.rd) + ", " + hex + ", " + std::to_string(d.rs1);
    default:
      break;
  }
  if (is_load(d.mnemonic) || d.mnemonic == M::Jalr) {
    return out + " " + x(d.rd) + ", " + std::to_string(d.imm) + "(" + x(d.rs1) + ")";
  }
  if (is_store(d.mnemonic)) {
    return out + " " + x(d.rs2) + ", " + std::to_string(d.imm) + "(" + x(d.rs1) + ")";
  }
  switch (t.format) {
    case F::R: return out + " " + x(d.rd) + ", " + x(d.rs1) + ", " + x(d.rs2);
    case F::I: return out + " " + x(d.rd) + ", " + x(d.rs1) + ", " + std::to_string(d.imm);
    case F::B: return out + " " + x(d.rs1) + ", " + x(d.rs2) + ", " + std::to_string(d.imm);
    default: return out;
  }
}

ExecEffect execute(const DecodedInstr& d, std::uint32_t pc, std::uint32_t a, std::uint32_t b,
                   const SystemView& sys) {
  ExecEffect e;
  e.next_pc = pc + 4;
  const auto imm = static_cast<std::uint32_t>(d.imm);
  const auto sa = static_cast<std::int32_t>(a);
  const auto sb = static_cast<std::int32_t>(b);
  std::optional<std::uint32_t> result;

  switch (d.mnemonic) {
    case M::Lui: result = imm; break;
    case M::Auipc: result = pc + imm; break;
    case M::Jal:
      e.next_pc = jump_target(d, pc, pc + imm);
      result = pc + 4;
      break;
    case M::Jalr:
      e.next_pc = jump_target(d, pc, (a + imm) & ~1u);
      result = pc + 4;
      break;
    case M::Beq: case M::Bne: case M::Blt: case M::Bge: case M::Bltu: case M::Bgeu: {
      bool taken = false;
      switch (d.mnemonic) {
        case M::Beq: taken = a == b; break;
        case M::Bne: taken = a != b; break;
        case M::Blt: taken = sa < sb; break;
        case M::Bge: taken = sa >= sb; break;
        case M::Bltu: taken = a < b; break;
        default: taken = a >= b; break;
      }
      if (taken) e.next_pc = jump_target(d, pc, pc + imm);
      break;
    }
    case M::Lb: case M::Lh: case M::Lw: case M::Lbu: case M::Lhu: {
      const unsigned width = access_width(d.mnemonic);
      const std::uint32_t addr = a + imm;
      if (addr % width) misaligned(pc, d.raw, addr, width);
      e.mem_read = MemRead{addr, static_cast<std::uint8_t>(width)};
      break;
    }
    case M::Sb: case M::Sh: case M::Sw: {
      const unsigned width = access_width(d.mnemonic);
      const std::uint32_t addr = a + imm;
      if (addr % width) misaligned(pc, d.raw, addr, width);
      const std::uint32_t mask = width == 4 ? ~0u : ((1u << (8 * width)) - 1);
      e.mem_write = MemWrite{addr, static_cast<std::uint8_t>(width), b & mask};
      break;
    }
    case M::Addi: result = a + imm; break;
    case M::Slti: result = sa < d.imm ? 1 : 0; break;
    case M::Sltiu: result = a < imm ? 1 : 0; break;
    case M::Xori: result = a ^ imm; break;
    case M::Ori: result = a | imm; break;
    case M::Andi: result = a & imm; break;
    case M::Slli: result = a << (imm & 31); break;
    case M::Srli: result = a >> (imm & 31); break;
    case M::Srai: result = static_cast<std::uint32_t>(sa >> (imm & 31)); break;
    case M::Add: result = a + b; break;
    case M::Sub: result = a - b; break;
    case M::Sll: result = a << (b & 31); break;
    case M::Slt: result = sa < sb ? 1 : 0; break;
    case M::Sltu: result = a < b ? 1 : 0; break;
    case M::Xor: result = a ^ b; break;
    case M::Srl: result = a >> (b & 31); break;
    case M::Sra: result = static_cast<std::uint32_t>(sa >> (b & 31)); break;
    case M::Or: result = a | b; break;
    case M::And: result = a & b; break;
    case M::Fence: case M::FenceI: break;
    case M::Ecall:
      if (sys.a7 != kExitSyscall) {
        throw SimError(SimErrorKind::UnsupportedEcall, pc, d.raw, "a7=" + std::to_string(sys.a7));
      }
      e.halt = true;
      e.exit_code = sys.a0;
      break;
    case M::Ebreak:
      e.halt = true;
      e.exit_code = 0;
      break;
    case M::Csrrw: case M::Csrrs: case M::Csrrc: case M::Csrrwi: case M::Csrrsi: case M::Csrrci:
      result = read_csr(d, pc, sys);
      break;
    case M::Mul: result = a * b; break;
    case M::Mulh:
      result = static_cast<std::uint32_t>((std::int64_t{sa} * std::int64_t{sb}) >> 32);
      break;
    case M::Mulhsu:
      result = static_cast<std::uint32_t>((std::int64_t{sa} * static_cast<std::int64_t>(b)) >> 32);
      break;
    case M::Mulhu:
      result = static_cast<std::uint32_t>((std::uint64_t{a} * std::uint64_t{b}) >> 32);
      break;
    case M::Div: case M::Divu: case M::Rem: case M::Remu:
      result = divide(d.mnemonic, a, b);
      break;
  }
  if (result && d.rd != 0) e.reg_write = RegWrite{d.rd, *result};
  return e;
}

void complete_load(const DecodedInstr& d, std::uint32_t loaded, ExecEffect& effect) {
  std::uint32_t value = 0;
  switch (d.mnemonic) {
    case M::Lb: value = static_cast<std::uint32_t>(sext(loaded, 8)); break;
    case M::Lh: value = static_cast<std::uint32_t>(sext(loaded, 16)); break;
    case M::Lw: value = loaded; break;
    case M::Lbu: value = loaded & 0xFF; break;
    case M::Lhu: value = loaded & 0xFFFF; break;
    default: return;
  }
  if (d.rd != 0) effect.reg_write = RegWrite{d.rd, value};
}

ExecEffect step_semantics(const ArchState& state, const DecodedInstr& d) {
  const SystemView sys{state.regs[kRegA0], state.regs[kRegA7], state.minstret};
  ExecEffect e = execute(d, state.pc, state.regs[d.rs1], state.regs[d.rs2], sys);
  if (e.mem_read) complete_load(d, state.mem.read(e.mem_read->addr, e.mem_read->width), e);
  return e;
}

}  // namespace lockstep::isa
