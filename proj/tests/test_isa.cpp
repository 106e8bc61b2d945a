#include <ios>
#include <random>

#include "doctest.h"
#include "lockstep/error.hpp"
#include "lockstep/isa.hpp"

using namespace lockstep;
using namespace lockstep::isa;

TEST_CASE("canonical nop decodes as addi x0, x0, 0") {
  const auto d = decode(0x00000013, 0);
  CHECK(d.mnemonic == Mnemonic::Addi);
  CHECK(d.format == Format::I);
  CHECK(d.rd == 0);
  CHECK(d.rs1 == 0);
  CHECK(d.imm == 0);
  CHECK(disassemble(d) == "addi x0, x0, 0");
}

TEST_CASE("add x10, x10, x10") {
  const auto d = decode(0x00A50533, 0);
  CHECK(d.mnemonic == Mnemonic::Add);
  CHECK(d.rd == 10);
  CHECK(d.rs1 == 10);
  CHECK(d.rs2 == 10);
  CHECK(disassemble(d) == "add x10, x10, x10");
}

TEST_CASE("all-zero word is illegal and carries pc and raw") {
  CHECK_FALSE(try_decode(0).has_value());
  try {
    decode(0, 0x80000010);
    FAIL("decode(0) did not throw");
  } catch (const SimError& e) {
    CHECK(e.kind() == SimErrorKind::IllegalInstruction);
    CHECK(e.pc() == 0x80000010);
    CHECK(e.raw() == 0);
  }
}

TEST_CASE("immediates are sign-extended per format") {
  CHECK(decode(0xFFF00093, 0).imm == -1);               // addi x1, x0, -1
  CHECK(decode(0xFE000EE3, 0).imm == -4);               // beq x0, x0, -4
  CHECK(decode(0xFFDFF0EF, 0).imm == -4);               // jal x1, -4
  CHECK(decode(0xFE112E23, 0).imm == -4);               // sw x1, -4(x2)
  CHECK(static_cast<std::uint32_t>(decode(0x800000B7, 0).imm) == 0x80000000u);  // lui x1, 0x80000
}

TEST_CASE("disassembly forms") {
  CHECK(disassemble(decode(0xFFC12283, 0)) == "lw x5, -4(x2)");
  CHECK(disassemble(decode(0xFE112E23, 0)) == "sw x1, -4(x2)");
  CHECK(disassemble(decode(0x00100073, 0)) == "ebreak");
  CHECK(disassemble(decode(0x00000073, 0)) == "ecall");
}

TEST_CASE("M extension edge cases") {
  const SystemView sys{};
  auto run = [&](Mnemonic m, std::uint32_t a, std::uint32_t b) {
    const auto d = decode(encode(m, 10, 5, 6, 0), 0);
    return execute(d, 0, a, b, sys).reg_write->value;
  };
  CHECK(run(Mnemonic::Div, 7, 0) == 0xFFFFFFFFu);
  CHECK(run(Mnemonic::Divu, 7, 0) == 0xFFFFFFFFu);
  CHECK(run(Mnemonic::Rem, 7, 0) == 7);
  CHECK(run(Mnemonic::Remu, 7, 0) == 7);
  CHECK(run(Mnemonic::Div, 0x80000000u, 0xFFFFFFFFu) == 0x80000000u);
  CHECK(run(Mnemonic::Rem, 0x80000000u, 0xFFFFFFFFu) == 0);
  CHECK(run(Mnemonic::Div, static_cast<std::uint32_t>(-7), 2) == static_cast<std::uint32_t>(-3));
  CHECK(run(Mnemonic::Rem, static_cast<std::uint32_t>(-7), 2) == static_cast<std::uint32_t>(-1));
  CHECK(run(Mnemonic::Mulh, 0x80000000u, 0x80000000u) == 0x40000000u);
  CHECK(run(Mnemonic::Mulhu, 0xFFFFFFFFu, 0xFFFFFFFFu) == 0xFFFFFFFEu);
  CHECK(run(Mnemonic::Mulhsu, 0xFFFFFFFFu, 0xFFFFFFFFu) == 0xFFFFFFFFu);
}

TEST_CASE("jal links pc+4 and jumps") {
  const auto d = decode(encode(Mnemonic::Jal, 1, 0, 0, 16), 0x100);
  const auto e = execute(d, 0x100, 0, 0, {});
  CHECK(e.next_pc == 0x110);
  CHECK(e.reg_write->index == 1);
  CHECK(e.reg_write->value == 0x104);
}

TEST_CASE("writes to x0 are dropped") {
  const auto e = execute(decode(encode(Mnemonic::Addi, 0, 0, 0, 5), 0), 0, 0, 0, {});
  CHECK_FALSE(e.reg_write.has_value());
}

TEST_CASE("misaligned accesses and jump targets") {
  CHECK_THROWS_AS(execute(decode(encode(Mnemonic::Lw, 1, 2, 0, 2), 0), 0, 0x100, 0, {}), SimError);
  CHECK_NOTHROW(execute(decode(encode(Mnemonic::Lh, 1, 2, 0, 2), 0), 0, 0x100, 0, {}));
  CHECK_THROWS_AS(execute(decode(encode(Mnemonic::Jalr, 1, 2, 0, 2), 0), 0, 0x100, 0, {}), SimError);
  // A not-taken branch with a misaligned target is fine.
  CHECK_NOTHROW(execute(decode(encode(Mnemonic::Beq, 0, 1, 2, 6), 0), 0, 1, 2, {}));
}

TEST_CASE("ecall conventions") {
  const auto d = decode(0x00000073, 0);
  const auto e = execute(d, 0, 0, 0, SystemView{42, kExitSyscall, 0});
  CHECK(e.halt);
  CHECK(e.exit_code == 42);
  CHECK_THROWS_AS(execute(d, 0, 0, 0, SystemView{0, 64, 0}), SimError);
}

TEST_CASE("store values are masked to the access width") {
  const auto e = execute(decode(encode(Mnemonic::Sb, 0, 1, 2, 3), 0), 0, 0x1000, 0x12345678, {});
  REQUIRE(e.mem_write);
  CHECK(e.mem_write->addr == 0x1003);
  CHECK(e.mem_write->width == 1);
  CHECK(e.mem_write->value == 0x78);
}

TEST_CASE("decode/encode round trip over 100000 legal words") {
  std::mt19937 rng(1234);
  static constexpr std::uint32_t ops[] = {0x37, 0x17, 0x6F, 0x67, 0x63, 0x03, 0x23, 0x13, 0x33, 0x0F, 0x73};
  unsigned legal = 0, attempts = 0;
  while (legal < 100000) {
    ++attempts;
    std::uint32_t w = (rng() & ~0x7Fu) | ops[rng() % 11];
    if ((w & 0x7F) == 0x33 || (w & 0x7F) == 0x13) w = (w & 0x01FFFFFFu) | ((rng() % 3 == 0 ? 0x20u : rng() % 2) << 25);
    const auto d = try_decode(w);
    if (!d) continue;
    ++legal;
    const auto back = encode(*d);
    if (back != w) FAIL("round trip failed for word " << std::hex << w << " -> " << back);
    const auto again = try_decode(back);
    REQUIRE(again);
    CHECK(*again == *d);
  }
  CHECK(attempts > legal);  // some illegal words were seen too
}

TEST_CASE("mnemonic table is complete") {
  for (unsigned i = 0; i < kMnemonicCount; i++) {
    const auto m = static_cast<Mnemonic>(i);
    CHECK(traits(m).mnemonic == m);
    CHECK_FALSE(name(m).empty());
  }
}
