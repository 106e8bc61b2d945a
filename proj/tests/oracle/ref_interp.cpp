#include "oracle/ref_interp.hpp"

namespace oracle {
namespace {

std::int64_t sx(std::uint32_t v) { return static_cast<std::int32_t>(v); }

std::uint32_t bits(std::uint32_t w, int hi, int lo) { return (w >> lo) & ((1u << (hi - lo + 1)) - 1); }

std::int32_t sign_extend(std::uint32_t v, int nbits) {
  const std::uint32_t m = 1u << (nbits - 1);
  return static_cast<std::int32_t>((v ^ m) - m);
}

}  // namespace

std::uint32_t RefState::load(std::uint32_t addr, unsigned width) const {
  std::uint32_t v = 0;
  for (unsigned i = 0; i < width; i++) {
    auto it = mem.find(addr + i);
    v |= std::uint32_t(it == mem.end() ? 0 : it->second) << (8 * i);
  }
  return v;
}

void RefState::store(std::uint32_t addr, unsigned width, std::uint32_t value) {
  for (unsigned i = 0; i < width; i++) {
    mem[addr + i] = static_cast<std::uint8_t>(value >> (8 * i));
    pages.insert((addr + i) >> 12);
  }
}

void RefState::poke_word(std::uint32_t addr, std::uint32_t value) { store(addr, 4, value); }

RefStep ref_step(RefState& s) {
  RefStep r;
  if (!s.pages.count(s.pc >> 12)) {
    r.outcome = Outcome::Unmapped;
    return r;
  }
  const std::uint32_t w = s.load(s.pc, 4);
  const std::uint32_t op = bits(w, 6, 0), rd = bits(w, 11, 7), f3 = bits(w, 14, 12);
  const std::uint32_t rs1 = bits(w, 19, 15), rs2 = bits(w, 24, 20), f7 = bits(w, 31, 25);
  const std::uint32_t a = s.x[rs1], b = s.x[rs2];
  const std::int32_t i_imm = sign_extend(bits(w, 31, 20), 12);
  const std::int32_t s_imm = sign_extend((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12);
  const std::int32_t b_imm =
      sign_extend((bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) | (bits(w, 30, 25) << 5) | (bits(w, 11, 8) << 1), 13);
  const std::int32_t j_imm = sign_extend(
      (bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) | (bits(w, 20, 20) << 11) | (bits(w, 30, 21) << 1), 21);
  const std::uint32_t u_imm = w & 0xFFFFF000u;

  std::optional<std::uint32_t> value;
  std::uint32_t next = s.pc + 4;
  auto fail = [&](Outcome o) {
    r = RefStep{};
    r.outcome = o;
    return r;
  };

  switch (op) {
    case 0x37: value = u_imm; break;
    case 0x17: value = s.pc + u_imm; break;
    case 0x6F:
      next = s.pc + j_imm;
      if (next % 4) return fail(Outcome::Misaligned);
      value = s.pc + 4;
      break;
    case 0x67:
      if (f3) return fail(Outcome::Illegal);
      next = (a + i_imm) & ~1u;
      if (next % 4) return fail(Outcome::Misaligned);
      value = s.pc + 4;
      break;
    case 0x63: {
      bool t;
      if (f3 == 0) t = a == b;
      else if (f3 == 1) t = a != b;
      else if (f3 == 4) t = sx(a) < sx(b);
      else if (f3 == 5) t = sx(a) >= sx(b);
      else if (f3 == 6) t = a < b;
      else if (f3 == 7) t = a >= b;
      else return fail(Outcome::Illegal);
      if (t) {
        next = s.pc + b_imm;
        if (next % 4) return fail(Outcome::Misaligned);
      }
      break;
    }
    case 0x03: {
      const std::uint32_t addr = a + i_imm;
      unsigned width;
      if (f3 == 0 || f3 == 4) width = 1;
      else if (f3 == 1 || f3 == 5) width = 2;
      else if (f3 == 2) width = 4;
      else return fail(Outcome::Illegal);
      if (addr % width) return fail(Outcome::Misaligned);
      const std::uint32_t raw = s.load(addr, width);
      if (f3 == 0) value = static_cast<std::uint32_t>(sign_extend(raw, 8));
      else if (f3 == 1) value = static_cast<std::uint32_t>(sign_extend(raw, 16));
      else value = raw;
      break;
    }
    case 0x23: {
      if (f3 > 2) return fail(Outcome::Illegal);
      const unsigned width = 1u << f3;
      const std::uint32_t addr = a + s_imm;
      if (addr % width) return fail(Outcome::Misaligned);
      const std::uint64_t mask = (std::uint64_t{1} << (8 * width)) - 1;
      r.store = RefStep::Store{addr, width, static_cast<std::uint32_t>(b & mask)};
      break;
    }
    case 0x13: {
      const std::uint32_t sh = rs2;
      switch (f3) {
        case 0: value = a + i_imm; break;
        case 2: value = sx(a) < i_imm; break;
        case 3: value = a < static_cast<std::uint32_t>(i_imm); break;
        case 4: value = a ^ i_imm; break;
        case 6: value = a | i_imm; break;
        case 7: value = a & i_imm; break;
        case 1:
          if (f7) return fail(Outcome::Illegal);
          value = static_cast<std::uint32_t>(std::uint64_t{a} << sh);
          break;
        case 5:
          if (f7 == 0) value = a >> sh;
          else if (f7 == 0x20) value = static_cast<std::uint32_t>(sx(a) >> sh);
          else return fail(Outcome::Illegal);
          break;
      }
      break;
    }
    case 0x33: {
      const std::uint32_t sh = b & 31;
      if (f7 == 1) {
        const std::int64_t sa = sx(a), sb = sx(b);
        const std::uint64_t ua = a, ub = b;
        switch (f3) {
          case 0: value = static_cast<std::uint32_t>(ua * ub); break;
          case 1: value = static_cast<std::uint32_t>(static_cast<std::uint64_t>(sa * sb) >> 32); break;
          case 2: value = static_cast<std::uint32_t>(static_cast<std::uint64_t>(sa * static_cast<std::int64_t>(ub)) >> 32); break;
          case 3: value = static_cast<std::uint32_t>((ua * ub) >> 32); break;
          case 4: value = sb == 0 ? 0xFFFFFFFFu : static_cast<std::uint32_t>(sa / sb); break;
          case 5: value = ub == 0 ? 0xFFFFFFFFu : static_cast<std::uint32_t>(ua / ub); break;
          case 6: value = sb == 0 ? a : static_cast<std::uint32_t>(sa % sb); break;
          case 7: value = ub == 0 ? a : static_cast<std::uint32_t>(ua % ub); break;
        }
      } else if (f7 == 0) {
        switch (f3) {
          case 0: value = a + b; break;
          case 1: value = static_cast<std::uint32_t>(std::uint64_t{a} << sh); break;
          case 2: value = sx(a) < sx(b); break;
          case 3: value = a < b; break;
          case 4: value = a ^ b; break;
          case 5: value = a >> sh; break;
          case 6: value = a | b; break;
          case 7: value = a & b; break;
        }
      } else if (f7 == 0x20 && f3 == 0) {
        value = a - b;
      } else if (f7 == 0x20 && f3 == 5) {
        value = static_cast<std::uint32_t>(sx(a) >> sh);
      } else {
        return fail(Outcome::Illegal);
      }
      break;
    }
    case 0x0F:
      if (f3 > 1) return fail(Outcome::Illegal);
      break;
    case 0x73: {
      if (f3 == 0) {
        if (w == 0x00000073) {
          if (s.x[17] != 93) return fail(Outcome::BadEcall);
          r.halt = true;
          s.exit_code = s.x[10];
        } else if (w == 0x00100073) {
          r.halt = true;
          s.exit_code = 0;
        } else {
          return fail(Outcome::Illegal);
        }
        break;
      }
      if (f3 == 4) return fail(Outcome::Illegal);
      // Only reads of the instret counter are supported.
      const bool write = f3 == 1 || f3 == 5 || rs1 != 0;
      const std::uint32_t csr = bits(w, 31, 20);
      if (write) return fail(Outcome::BadCsr);
      if (csr == 0xB02 || csr == 0xC02) value = static_cast<std::uint32_t>(s.retired);
      else if (csr == 0xB82 || csr == 0xC82) value = static_cast<std::uint32_t>(s.retired >> 32);
      else return fail(Outcome::BadCsr);
      break;
    }
    default:
      return fail(Outcome::Illegal);
  }

  if (value && rd != 0) {
    r.reg = std::make_pair(rd, *value);
    s.x[rd] = *value;
  }
  if (r.store) s.store(r.store->addr, r.store->width, r.store->value);
  s.pc = next;
  s.retired++;
  if (r.halt) s.halted = true;
  return r;
}

RefStep ref_exec_word(std::uint32_t word, RefState& s) {
  s.poke_word(s.pc, word);
  return ref_step(s);
}

}  // namespace oracle
