#include "lockstep/iss.hpp"

#include "lockstep/error.hpp"

namespace lockstep {

void Iss::load_image(const MemoryImage& image) {
  install(image, state_.mem);
  image_ = image;
}

void Iss::reset(std::uint32_t entry_pc) {
  install(image_, state_.mem);
  state_.pc = entry_pc;
  state_.regs.fill(0);
  state_.minstret = 0;
  state_.mcycle = 0;
  next_seq_ = 0;
  halted_ = false;
  faulted_ = false;
  exit_code_ = 0;
}

std::uint64_t Iss::read_csr(Csr id) const {
  if (id == Csr::Minstret) return state_.minstret;
  throw SimError(SimErrorKind::UnsupportedCsr, state_.pc, 0,
                 "csr " + std::to_string(static_cast<unsigned>(id)) + " is not modeled by the ISS");
}

std::vector<CommitRecord> Iss::step(std::uint32_t n) {
  if (faulted_) throw SimError(SimErrorKind::Faulted, state_.pc, 0, "ISS is faulted; reset required");
  if (halted_) throw SimError(SimErrorKind::AlreadyHalted, state_.pc, 0, "program already halted");
  std::vector<CommitRecord> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n && !halted_; ++i) out.push_back(step_one());
  return out;
}

CommitRecord Iss::step_one() {
  const std::uint32_t pc = state_.pc;
  if (!state_.mem.is_mapped(pc)) {
    faulted_ = true;
    throw SimError(SimErrorKind::UnmappedAddress, pc, 0, "instruction fetch from unmapped memory");
  }
  const std::uint32_t raw = state_.mem.read(pc, 4);
  isa::ExecEffect effect;
  try {
    const isa::DecodedInstr d = isa::decode(raw, pc);
    effect = isa::step_semantics(state_, d);
  } catch (const SimError&) {
    faulted_ = true;
    throw;
  }

  CommitRecord rec;
  rec.seq = next_seq_++;
  rec.pc = pc;
  rec.raw = raw;
  rec.reg_write = effect.reg_write;
  rec.mem_write = effect.mem_write;

  if (effect.reg_write) state_.regs[effect.reg_write->index] = effect.reg_write->value;
  if (effect.mem_write) {
    const auto& w = *effect.mem_write;
    state_.mem.write(w.addr, w.width, w.value);
    if (exit_.tohost && w.width == 4 && w.addr == *exit_.tohost) {
      effect.halt = true;
      effect.exit_code = w.value;
    }
  }
  state_.regs[0] = 0;
  state_.pc = effect.next_pc;
  ++state_.minstret;
  if (effect.halt) {
    halted_ = true;
    exit_code_ = effect.exit_code;
    rec.halt = true;
  }
  return rec;
}

}  // namespace lockstep
