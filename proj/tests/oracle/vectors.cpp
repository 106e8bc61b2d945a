#include "oracle/vectors.hpp"

#include <cstdio>

#include "lockstep/error.hpp"
#include "lockstep/iss.hpp"
#include "oracle/ref_interp.hpp"

namespace oracle {
namespace {

constexpr std::uint32_t kBase = 0x1000;
constexpr std::uint32_t kDataPage = 0x20000;

// Raw encoders, independent of the library's encoder.
std::uint32_t r_type(std::uint32_t f7, std::uint32_t rs2, std::uint32_t rs1, std::uint32_t f3, std::uint32_t rd,
                     std::uint32_t op) {
  return (f7 << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | op;
}
std::uint32_t i_type(std::int32_t imm, std::uint32_t rs1, std::uint32_t f3, std::uint32_t rd, std::uint32_t op) {
  return (static_cast<std::uint32_t>(imm & 0xFFF) << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | op;
}
std::uint32_t s_type(std::int32_t imm, std::uint32_t rs2, std::uint32_t rs1, std::uint32_t f3) {
  const auto u = static_cast<std::uint32_t>(imm);
  return (((u >> 5) & 0x7F) << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) | ((u & 0x1F) << 7) | 0x23;
}
std::uint32_t b_type(std::int32_t imm, std::uint32_t rs2, std::uint32_t rs1, std::uint32_t f3) {
  const auto u = static_cast<std::uint32_t>(imm);
  return (((u >> 12) & 1) << 31) | (((u >> 5) & 0x3F) << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) |
         (((u >> 1) & 0xF) << 8) | (((u >> 11) & 1) << 7) | 0x63;
}

// lui+addi pairs that materialize every register value.
std::vector<std::uint32_t> prologue(const Vector& v) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t r = 1; r < 32; r++) {
    const std::uint32_t val = v.regs[r];
    const std::uint32_t lo = val & 0xFFF;
    const std::uint32_t hi = (val + (lo >= 0x800 ? 0x1000 : 0)) & 0xFFFFF000u;
    out.push_back(hi | (r << 7) | 0x37);
    out.push_back(i_type(static_cast<std::int32_t>(lo), r, 0, r, 0x13));
  }
  return out;
}

Outcome outcome_of(lockstep::SimErrorKind k) {
  using K = lockstep::SimErrorKind;
  switch (k) {
    case K::IllegalInstruction: return Outcome::Illegal;
    case K::MisalignedAccess: return Outcome::Misaligned;
    case K::UnsupportedCsr: return Outcome::BadCsr;
    case K::UnsupportedEcall: return Outcome::BadEcall;
    case K::UnmappedAddress: return Outcome::Unmapped;
    default: return Outcome::Ok;  // never produced by a single step
  }
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

const std::uint32_t kEdges[] = {0, 1, 0xFFFFFFFFu, 0x80000000u, 0x7FFFFFFFu, 7, 0xFFFFFFF9u, 3};

}  // namespace

std::vector<Vector> directed_vectors() {
  std::vector<Vector> out;
  auto with = [&](std::uint32_t word, std::uint32_t a, std::uint32_t b) {
    Vector v;
    v.word = word;
    for (unsigned r = 1; r < 32; r++) v.regs[r] = r * 0x01010101u;
    v.regs[5] = a;
    v.regs[6] = b;
    v.regs[7] = kDataPage + 0x100;
    v.regs[17] = 93;
    out.push_back(v);
  };
  // M extension over the operand grid, DIV/REM overflow and by-zero included.
  for (std::uint32_t f3 = 0; f3 < 8; f3++)
    for (auto a : kEdges)
      for (auto b : kEdges) with(r_type(1, 6, 5, f3, 10, 0x33), a, b);
  // Shifts at the extremes, register and immediate forms.
  for (std::uint32_t sh : {0u, 1u, 31u, 32u, 63u}) {
    for (auto a : {0x80000000u, 0x7FFFFFFFu, 0xF0F0F0F0u}) {
      with(r_type(0, 6, 5, 1, 10, 0x33), a, sh);
      with(r_type(0, 6, 5, 5, 10, 0x33), a, sh);
      with(r_type(0x20, 6, 5, 5, 10, 0x33), a, sh);
      with(i_type(static_cast<std::int32_t>(sh & 31), 5, 1, 10, 0x13), a, 0);
      with(i_type(static_cast<std::int32_t>(sh & 31), 5, 5, 10, 0x13), a, 0);
      with(i_type(static_cast<std::int32_t>(0x400 | (sh & 31)), 5, 5, 10, 0x13), a, 0);
    }
  }
  // Comparisons with signed/unsigned disagreement.
  for (auto a : kEdges)
    for (auto b : {0u, 0xFFFFFFFFu, 0x80000000u}) {
      with(r_type(0, 6, 5, 2, 10, 0x33), a, b);
      with(r_type(0, 6, 5, 3, 10, 0x33), a, b);
      for (std::uint32_t f3 : {0u, 1u, 4u, 5u, 6u, 7u}) with(b_type(-8, 6, 5, f3), a, b);
    }
  with(i_type(-1, 5, 3, 10, 0x13), 5, 0);  // sltiu against 0xFFFFFFFF
  with(i_type(-1, 5, 2, 10, 0x13), 5, 0);
  // Loads and stores of each width; memory reads zero, so store first by
  // seeding through a store vector then compare sign extension via lb/lh
  // of a known code word instead.
  for (std::uint32_t f3 : {0u, 1u, 2u, 4u, 5u}) {
    with(i_type(0, 5, f3, 10, 0x03), kBase, 0);       // first prologue word
    with(i_type(2, 5, f3, 10, 0x03), kBase + 4, 0);   // upper half of addi
    with(i_type(1, 5, f3, 10, 0x03), kBase, 0);       // misaligned unless byte
    with(i_type(0, 7, f3, 0, 0x03), 0, 0);            // rd = x0
  }
  for (std::uint32_t f3 : {0u, 1u, 2u}) {
    with(s_type(4, 6, 7, f3), 0, 0xDEADBEEFu);
    with(s_type(-3, 6, 7, f3), 0, 0x12345678u);
  }
  // Jumps: link values and misaligned targets.
  with(0x008000EFu, 0, 0);                           // jal x1, 8
  with(0x0000006Fu | (2u << 21), 0, 0);              // jal x0, 4 (aligned)
  with(i_type(0, 5, 0, 1, 0x67), kBase + 0x40, 0);   // jalr x1, 0(x5)
  with(i_type(3, 5, 0, 1, 0x67), kBase + 0x40, 0);   // bit 0 cleared, then misaligned
  with(i_type(2, 5, 0, 1, 0x67), kBase + 0x40, 0);   // misaligned
  with(i_type(0, 5, 1, 1, 0x67), kBase, 0);          // jalr funct3 != 0
  with(b_type(6, 0, 0, 0), 0, 0);                    // taken beq to a 2-aligned target
  // System.
  with(0x00000073u, 0, 0);                           // ecall, a7 = 93
  {
    Vector v;
    v.word = 0x00000073u;
    v.regs[17] = 64;
    out.push_back(v);                                // unsupported ecall
  }
  with(0x00100073u, 0, 0);                           // ebreak
  with(0x00200073u, 0, 0);                           // uret-like: illegal here
  with(i_type(0xB02, 0, 2, 10, 0x73), 0, 0);         // csrr minstret
  with(i_type(0xC02, 0, 2, 10, 0x73), 0, 0);         // rdinstret
  with(i_type(static_cast<std::int32_t>(0xB82), 0, 2, 10, 0x73), 0, 0);
  with(i_type(0xB02, 5, 1, 10, 0x73), 1, 0);         // csrrw: write
  with(i_type(0xB02, 5, 2, 10, 0x73), 1, 0);         // csrrs with rs1 != 0
  with(i_type(0xB02, 0, 6, 10, 0x73), 0, 0);         // csrrsi zimm 0: read
  with(i_type(0x300, 0, 2, 10, 0x73), 0, 0);         // mstatus: unsupported
  with(i_type(0, 0, 0, 0, 0x0F), 0, 0);              // fence
  with(i_type(0, 0, 1, 0, 0x0F), 0, 0);              // fence.i
  with(0x00000000u, 0, 0);
  with(0xFFFFFFFFu, 0, 0);
  with(r_type(0x02, 6, 5, 0, 10, 0x33), 1, 2);       // unknown funct7
  with(i_type(0, 5, 3, 10, 0x03), kBase, 0);         // ld: not RV32
  with(s_type(0, 6, 7, 3), 0, 0);                    // sd
  with(b_type(8, 6, 5, 2), 0, 0);                    // branch funct3 2
  with(i_type(0x7FF, 0, 0, 10, 0x13), 0, 0);
  with(i_type(-2048, 0, 0, 10, 0x13), 0, 0);
  with((0xFFFFFu << 12) | (10u << 7) | 0x17, 0, 0);  // auipc with negative imm
  return out;
}

std::vector<Vector> random_vectors(std::mt19937& rng, unsigned count) {
  static constexpr std::uint32_t kOps[] = {0x37, 0x17, 0x6F, 0x67, 0x63, 0x03, 0x23, 0x13, 0x33, 0x0F, 0x73};
  std::uniform_int_distribution<std::uint32_t> any;
  std::vector<Vector> out;
  for (unsigned i = 0; i < count; i++) {
    Vector v;
    const std::uint32_t op = kOps[any(rng) % std::size(kOps)];
    std::uint32_t w = (any(rng) & ~0x7Fu) | op;
    // Bias funct7 toward defined values so most vectors are legal.
    const unsigned bias = any(rng) % 4;
    if (op == 0x33 || op == 0x13) w = (w & 0x01FFFFFFu) | ((bias == 0 ? 0x20u : bias == 1 ? 0x01u : 0u) << 25);
    if (op == 0x73 && any(rng) % 2) w = (w & 0x000FFFFFu) | (0xB02u << 20);
    v.word = w;
    for (unsigned r = 1; r < 32; r++) {
      switch (any(rng) % 4) {
        case 0: v.regs[r] = kEdges[any(rng) % std::size(kEdges)]; break;
        case 1: v.regs[r] = kDataPage + (any(rng) % 0x1000); break;
        default: v.regs[r] = any(rng); break;
      }
    }
    if (any(rng) % 2) v.regs[17] = 93;
    out.push_back(v);
  }
  return out;
}

std::string check_vector(const Vector& v) {
  auto words = prologue(v);
  words.push_back(v.word);

  lockstep::MemoryImage image;
  lockstep::Segment code{kBase, {}};
  for (auto w : words)
    for (int i = 0; i < 4; i++) code.bytes.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
  image.segments.push_back(code);
  image.segments.push_back({kDataPage, std::vector<std::uint8_t>(0x1000, 0)});
  image.entry = kBase;

  lockstep::Iss iss;
  iss.load_image(image);
  iss.reset(kBase);

  RefState ref;
  ref.pc = kBase;
  for (std::size_t i = 0; i < words.size(); i++) ref.poke_word(kBase + 4 * static_cast<std::uint32_t>(i), words[i]);
  for (std::uint32_t p = 0; p < 0x1000; p += 4) ref.poke_word(kDataPage + p, 0);

  const std::string tag = "word " + hex(v.word) + ": ";
  for (std::size_t i = 0; i < words.size(); i++) {
    const RefStep expect = ref_step(ref);
    Outcome got = Outcome::Ok;
    lockstep::CommitRecord rec;
    try {
      rec = iss.step(1).at(0);
    } catch (const lockstep::SimError& e) {
      got = outcome_of(e.kind());
    }
    if (got != expect.outcome) {
      return tag + "outcome differs (iss " + std::to_string(int(got)) + ", ref " +
             std::to_string(int(expect.outcome)) + ")";
    }
    if (got != Outcome::Ok) return {};
    const bool reg_same = rec.reg_write.has_value() == expect.reg.has_value() &&
                          (!expect.reg || (rec.reg_write->index == expect.reg->first &&
                                           rec.reg_write->value == expect.reg->second));
    if (!reg_same) {
      return tag + "register write differs (ref " +
             (expect.reg ? "x" + std::to_string(expect.reg->first) + "=" + hex(expect.reg->second) : "none") +
             ", iss " +
             (rec.reg_write ? "x" + std::to_string(rec.reg_write->index) + "=" + hex(rec.reg_write->value) : "none") +
             ")";
    }
    const bool mem_same = rec.mem_write.has_value() == expect.store.has_value() &&
                          (!expect.store || (rec.mem_write->addr == expect.store->addr &&
                                             rec.mem_write->width == expect.store->width &&
                                             rec.mem_write->value == expect.store->value));
    if (!mem_same) return tag + "memory write differs";
    if (rec.halt != expect.halt) return tag + "halt differs";
    if (iss.read_pc() != ref.pc) return tag + "next pc differs (ref " + hex(ref.pc) + ", iss " + hex(iss.read_pc()) + ")";
    if (expect.halt && iss.exit_code() != ref.exit_code) return tag + "exit code differs";
    if (expect.halt) break;
  }
  for (unsigned r = 0; r < 32; r++)
    if (iss.read_reg(r) != ref.x[r]) return tag + "x" + std::to_string(r) + " differs at the end";
  return {};
}

}  // namespace oracle
