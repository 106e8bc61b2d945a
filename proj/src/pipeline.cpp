#include "lockstep/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace lockstep::dut {
namespace {

constexpr struct {
  FaultKind kind;
  std::string_view name;
} kFaultNames[] = {
    {FaultKind::ForwardingDrop, "forwarding-drop"},
    {FaultKind::CommitValueCorrupt, "commit-value-corrupt"},
    {FaultKind::CommitOrderSwap, "commit-order-swap"},
    {FaultKind::PcSkip, "pc-skip"},
    {FaultKind::StaleOperand, "stale-operand"},
};

std::uint64_t parse_number(const std::string& text, const std::string& whole) {
  if (text.empty()) throw std::invalid_argument("missing number in fault spec '" + whole + "'");
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 0);
  if (*end != '\0' || errno == ERANGE || text[0] == '-') {
    throw std::invalid_argument("bad number '" + text + "' in fault spec '" + whole + "'");
  }
  return v;
}

bool is_divide(isa::Mnemonic m) { return m >= isa::Mnemonic::Div && m <= isa::Mnemonic::Remu; }

}  // namespace

std::string_view to_string(FaultKind kind) {
  for (const auto& f : kFaultNames) {
    if (f.kind == kind) return f.name;
  }
  return "unknown";
}

FaultSpec parse_fault_spec(const std::string& text) {
  const auto at = text.find('@');
  if (at == std::string::npos) throw std::invalid_argument("fault spec '" + text + "' lacks '@trigger'");
  FaultSpec spec;
  const std::string kind = text.substr(0, at);
  bool known = false;
  for (const auto& f : kFaultNames) {
    if (f.name == kind) {
      spec.kind = f.kind;
      known = true;
    }
  }
  if (!known) throw std::invalid_argument("unknown fault kind '" + kind + "'");

  std::string rest = text.substr(at + 1);
  std::string payload;
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    payload = rest.substr(colon + 1);
    rest = rest.substr(0, colon);
  }
  const auto eq = rest.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("trigger in '" + text + "' must be cycle=N or seq=N");
  const std::string trig = rest.substr(0, eq);
  if (trig == "cycle") {
    spec.trigger = TriggerKind::Cycle;
  } else if (trig == "seq") {
    spec.trigger = TriggerKind::Seq;
  } else {
    throw std::invalid_argument("unknown trigger '" + trig + "' in '" + text + "'");
  }
  spec.at = parse_number(rest.substr(eq + 1), text);
  if (!payload.empty()) {
    const std::uint64_t p = parse_number(payload, text);
    if (p > 0xFFFFFFFFull) throw std::invalid_argument("payload out of range in '" + text + "'");
    spec.payload = static_cast<std::uint32_t>(p);
  }
  if (spec.kind == FaultKind::CommitValueCorrupt && spec.payload == 0) {
    throw std::invalid_argument("commit-value-corrupt needs a non-zero XOR mask");
  }
  return spec;
}

std::string to_string(const FaultSpec& spec) {
  std::string out(to_string(spec.kind));
  out += spec.trigger == TriggerKind::Cycle ? "@cycle=" : "@seq=";
  out += std::to_string(spec.at);
  if (spec.kind == FaultKind::CommitValueCorrupt) {
    char buf[16];
    std::snprintf(buf, sizeof buf, ":0x%x", spec.payload);
    out += buf;
  }
  return out;
}

Pipeline::Pipeline(PipelineConfig config) : config_(config) {}

void Pipeline::load_image(const MemoryImage& image) {
  install(image, committed_.mem);
  image_ = image;
}

void Pipeline::reset(std::uint32_t entry_pc) {
  install(image_, committed_.mem);
  committed_.pc = entry_pc;
  committed_.regs.fill(0);
  committed_.minstret = 0;
  committed_.mcycle = 0;
  cycle_ = 0;
  next_seq_ = 0;
  fetch_pc_ = entry_pc;
  halted_ = false;
  faulted_ = false;
  exit_code_ = 0;
  idle_cycles_ = 0;
  fetch_buf_.clear();
  rob_.clear();
  iq_.clear();
  in_flight_.clear();
  mem_latch_.clear();
  wb_latch_.clear();
  for (auto& r : rename_) r.reset();
  issue_log_.clear();
  if (fault_) fault_->fired = false;
}

void Pipeline::inject_fault(const FaultSpec& spec) {
  if (fault_) {
    throw SimError(SimErrorKind::FaultAlreadyArmed, committed_.pc, 0, "already armed: " + to_string(fault_->spec));
  }
  fault_ = ArmedFault{spec};
}

void Pipeline::clear_fault() { fault_.reset(); }

bool Pipeline::trigger_reached(std::uint64_t seq) const {
  if (!fault_ || fault_->fired) return false;
  return fault_->spec.trigger == TriggerKind::Cycle ? cycle_ >= fault_->spec.at : seq >= fault_->spec.at;
}

CycleResult Pipeline::tick() {
  if (faulted_) throw SimError(SimErrorKind::Faulted, committed_.pc, 0, "pipeline is faulted; reset required");
  if (halted_) throw SimError(SimErrorKind::AlreadyHalted, committed_.pc, 0, "pipeline already halted");

  ++cycle_;
  committed_.mcycle = cycle_;
  CycleResult result;
  result.cycle = cycle_;
  try {
    // Later stages first, so each stage consumes what the previous cycle
    // left in its input latch.
    do_commit(result);
    if (!halted_) {
      do_writeback();
      do_memory();
      do_execute();
      do_issue();
      do_decode();
      do_fetch();
    }
    if (result.commits.empty() && !rob_.empty()) {
      if (++idle_cycles_ > config_.deadlock_budget) {
        const RobEntry& head = rob_.front();
        throw SimError(SimErrorKind::DeadlockDetected, head.pc, head.raw,
                       "no retirement for " + std::to_string(config_.deadlock_budget) + " cycles");
      }
    } else {
      idle_cycles_ = 0;
    }
  } catch (const SimError&) {
    faulted_ = true;
    throw;
  }
  result.halted = halted_;
  return result;
}

void Pipeline::do_commit(CycleResult& out) {
  auto halting = [&](const RobEntry& e) {
    if (e.effect.halt) return true;
    const auto& w = e.effect.mem_write;
    return config_.exit.tohost && w && w->width == 4 && w->addr == *config_.exit.tohost;
  };

  std::size_t ready = 0;
  while (ready < kCommitWidth && ready < rob_.size() && rob_[ready].done) {
    const RobEntry& e = rob_[ready];
    if (e.fault) {
      if (ready == 0) throw *e.fault;
      break;
    }
    ++ready;
    if (halting(e)) break;
  }
  if (ready == 0) return;

  const bool swap = ready == 2 && fault_ && fault_->spec.kind == FaultKind::CommitOrderSwap &&
                    trigger_reached(rob_[0].seq) && !halting(rob_[0]) && !halting(rob_[1]);
  if (swap) {
    CommitRecord second = retire(rob_[1]);
    CommitRecord first = retire(rob_[0]);
    std::swap(second.seq, first.seq);
    out.commits.push_back(second);
    out.commits.push_back(first);
    fault_->fired = true;
    fault_->victim = rob_[0].seq;
  } else {
    for (std::size_t i = 0; i < ready; ++i) out.commits.push_back(retire(rob_[i]));
  }
  for (std::size_t i = 0; i < ready; ++i) rob_.pop_front();
}

CommitRecord Pipeline::retire(RobEntry& e) {
  CommitRecord rec;
  rec.seq = e.seq;
  rec.pc = e.pc;
  rec.raw = e.raw;
  rec.reg_write = e.effect.reg_write;
  rec.mem_write = e.effect.mem_write;

  if (rec.reg_write && fault_ && fault_->spec.kind == FaultKind::CommitValueCorrupt && trigger_reached(e.seq)) {
    rec.reg_write->value ^= fault_->spec.payload;
    fault_->fired = true;
    fault_->victim = e.seq;
  }

  if (rec.reg_write) committed_.regs[rec.reg_write->index] = rec.reg_write->value;
  committed_.regs[0] = 0;
  bool halt = e.effect.halt;
  std::uint32_t code = e.effect.exit_code;
  if (rec.mem_write) {
    const auto& w = *rec.mem_write;
    committed_.mem.write(w.addr, w.width, w.value);
    if (config_.exit.tohost && w.width == 4 && w.addr == *config_.exit.tohost) {
      halt = true;
      code = w.value;
    }
  }
  committed_.pc = e.effect.next_pc;
  ++committed_.minstret;

  if (e.instr) {
    const unsigned rd = e.instr->rd;
    if (rd != 0 && rename_[rd] == e.seq) rename_[rd].reset();
  }
  if (halt) {
    halted_ = true;
    exit_code_ = code;
    rec.halt = true;
  }
  return rec;
}

void Pipeline::do_writeback() {
  for (std::uint64_t seq : wb_latch_) entry(seq).done = true;
  wb_latch_.clear();
}

void Pipeline::do_memory() {
  for (std::uint64_t seq : mem_latch_) {
    RobEntry& e = entry(seq);
    if (!e.fault && e.effect.mem_read) {
      const auto& r = *e.effect.mem_read;
      isa::complete_load(*e.instr, load_with_forwarding(seq, r.addr, r.width), e.effect);
      e.value_ready = true;
    }
    wb_latch_.push_back(seq);
  }
  mem_latch_.clear();
}

std::uint32_t Pipeline::load_with_forwarding(std::uint64_t load_seq, std::uint32_t addr, unsigned width) const {
  const std::size_t idx = load_seq - rob_.front().seq;
  std::uint32_t value = 0;
  for (unsigned i = 0; i < width; ++i) {
    const std::uint32_t a = addr + i;
    std::uint8_t byte = committed_.mem.read8(a);
    for (std::size_t j = idx; j-- > 0;) {
      const RobEntry& s = rob_[j];
      if (!s.instr || !isa::is_store(s.instr->mnemonic)) continue;
      if (!s.executed) throw std::logic_error("load reached MEM ahead of an older store's address");
      if (s.fault || !s.effect.mem_write) continue;
      const auto& w = *s.effect.mem_write;
      if (a - w.addr < w.width) {
        byte = static_cast<std::uint8_t>(w.value >> (8 * (a - w.addr)));
        break;
      }
    }
    value |= std::uint32_t{byte} << (8 * i);
  }
  return value;
}

void Pipeline::do_execute() {
  std::vector<InFlight> still;
  still.reserve(in_flight_.size());
  const isa::SystemView sys{committed_.regs[isa::kRegA0], committed_.regs[isa::kRegA7], committed_.minstret};
  for (std::size_t i = 0; i < in_flight_.size(); ++i) {
    InFlight f = in_flight_[i];
    if (--f.remaining > 0) {
      still.push_back(f);
      continue;
    }
    RobEntry& e = entry(f.seq);
    try {
      e.effect = isa::execute(*e.instr, e.pc, f.a, f.b, sys);
    } catch (const SimError& err) {
      e.fault = err;
    }
    e.executed = true;
    if (e.fault || !e.effect.mem_read) e.value_ready = true;
    mem_latch_.push_back(f.seq);
    if (!e.fault && e.effect.next_pc != e.predicted_next) {
      // Everything after i in issue order is younger and gets squashed.
      flush_after(f.seq, e.effect.next_pc);
      break;
    }
  }
  in_flight_ = std::move(still);
}

void Pipeline::do_issue() {
  unsigned issued = 0;
  unsigned alus = 0;
  bool muldiv_used = false;
  bool lsu_used = false;
  bool div_busy = false;
  for (const auto& f : in_flight_) {
    if (f.lane == Lane::MulDiv && is_divide(entry(f.seq).instr->mnemonic)) div_busy = true;
  }

  for (std::size_t pos = 0; issued < kIssueWidth && pos < iq_.size(); ++pos) {
    const std::uint64_t seq = iq_[pos];
    RobEntry& e = entry(seq);
    const isa::DecodedInstr& d = *e.instr;
    const isa::OpTraits& t = isa::traits(d);

    if (t.serializing && seq != rob_.front().seq) break;

    std::uint32_t operand[2] = {0, 0};
    const unsigned srcs[2] = {d.rs1, d.rs2};
    const bool reads[2] = {t.reads_rs1, t.reads_rs2};
    bool ready = true;
    std::optional<std::size_t> stale_used;
    std::optional<std::size_t> drop_used;
    for (std::size_t k = 0; k < 2 && ready; ++k) {
      if (!reads[k]) continue;
      const unsigned r = srcs[k];
      const std::uint32_t committed = committed_.regs[r];
      operand[k] = committed;
      if (!e.producer[k] || !in_rob(*e.producer[k])) continue;
      const RobEntry& p = entry(*e.producer[k]);
      if (!p.value_ready) {
        if (fault_ && fault_->spec.kind == FaultKind::StaleOperand && trigger_reached(seq)) {
          stale_used = k;
          continue;
        }
        ready = false;
        break;
      }
      const std::uint32_t bypass = p.effect.reg_write ? p.effect.reg_write->value : 0;
      operand[k] = bypass;
      if (fault_ && fault_->spec.kind == FaultKind::ForwardingDrop && trigger_reached(seq) && committed != bypass) {
        operand[k] = committed;
        drop_used = k;
      }
    }
    if (!ready) break;

    std::optional<Lane> lane;
    unsigned latency = 1;
    switch (t.unit) {
      case isa::Unit::Alu:
        if (alus < kAluUnits) lane = alus++ == 0 ? Lane::Alu0 : Lane::Alu1;
        break;
      case isa::Unit::MulDiv:
        if (!muldiv_used && !div_busy) {
          lane = Lane::MulDiv;
          muldiv_used = true;
          latency = is_divide(d.mnemonic) ? kDivLatency : kMulLatency;
        }
        break;
      case isa::Unit::Lsu:
        if (!lsu_used) {
          lane = Lane::Lsu;
          lsu_used = true;
        }
        break;
    }
    if (!lane) break;

    if (stale_used || drop_used) {
      fault_->fired = true;
      fault_->victim = seq;
    }
    in_flight_.push_back(InFlight{seq, *lane, latency, operand[0], operand[1]});
    e.issued = true;
    if (config_.record_issue_log) issue_log_.push_back(IssueEvent{seq, cycle_, e.pc});
    iq_.erase(iq_.begin() + static_cast<std::ptrdiff_t>(pos));
    --pos;
    ++issued;
  }
}

void Pipeline::do_decode() {
  unsigned dispatched = 0;
  while (dispatched < kFetchWidth && !fetch_buf_.empty()) {
    if (rob_.size() >= kRobSize) break;
    const FetchedWord w = fetch_buf_.front();

    RobEntry e;
    e.seq = next_seq_;
    e.pc = w.pc;
    e.raw = w.raw;
    if (!w.mapped) {
      e.fault = SimError(SimErrorKind::UnmappedAddress, w.pc, w.raw, "instruction fetch from unmapped memory");
    } else if (auto d = isa::try_decode(w.raw)) {
      e.instr = *d;
    } else {
      e.fault = SimError(SimErrorKind::IllegalInstruction, w.pc, w.raw, "not an RV32IM instruction");
    }
    if (e.instr && iq_.size() >= kIqSize) break;

    if (fault_ && fault_->spec.kind == FaultKind::PcSkip && trigger_reached(next_seq_)) {
      fault_->fired = true;
      fault_->victim = next_seq_;
      fetch_buf_.pop_front();
      continue;
    }

    fetch_buf_.pop_front();
    if (!e.instr) {
      e.executed = e.value_ready = e.done = true;
      rob_.push_back(std::move(e));
      ++next_seq_;
      ++dispatched;
      continue;
    }

    const isa::DecodedInstr& d = *e.instr;
    const isa::OpTraits& t = isa::traits(d);
    if (t.reads_rs1 && d.rs1 != 0) e.producer[0] = rename_[d.rs1];
    if (t.reads_rs2 && d.rs2 != 0) e.producer[1] = rename_[d.rs2];
    if (t.writes_rd && d.rd != 0) rename_[d.rd] = e.seq;
    const bool is_jal = d.mnemonic == isa::Mnemonic::Jal;
    e.predicted_next = is_jal ? w.pc + static_cast<std::uint32_t>(d.imm) : w.pc + 4;

    iq_.push_back(e.seq);
    rob_.push_back(std::move(e));
    ++next_seq_;
    ++dispatched;

    if (is_jal) {
      fetch_pc_ = rob_.back().predicted_next;
      fetch_buf_.clear();
      break;
    }
  }
}

void Pipeline::do_fetch() {
  if (!fetch_buf_.empty()) return;
  for (unsigned i = 0; i < kFetchWidth; ++i) {
    fetch_buf_.push_back(FetchedWord{fetch_pc_, committed_.mem.read(fetch_pc_, 4), committed_.mem.is_mapped(fetch_pc_)});
    fetch_pc_ += 4;
  }
}

void Pipeline::flush_after(std::uint64_t seq, std::uint32_t redirect) {
  while (!rob_.empty() && rob_.back().seq > seq) rob_.pop_back();
  auto younger = [seq](std::uint64_t s) { return s > seq; };
  iq_.erase(std::remove_if(iq_.begin(), iq_.end(), younger), iq_.end());
  std::erase_if(in_flight_, [seq](const InFlight& f) { return f.seq > seq; });
  std::erase_if(mem_latch_, younger);
  std::erase_if(wb_latch_, younger);
  fetch_buf_.clear();
  fetch_pc_ = redirect;
  next_seq_ = seq + 1;
  rebuild_rename();

  if (fault_ && fault_->fired && fault_->victim > seq) {
    const auto k = fault_->spec.kind;
    if (k == FaultKind::ForwardingDrop || k == FaultKind::StaleOperand || k == FaultKind::PcSkip) {
      fault_->fired = false;
    }
  }
}

void Pipeline::rebuild_rename() {
  for (auto& r : rename_) r.reset();
  for (const RobEntry& e : rob_) {
    if (!e.instr) continue;
    if (isa::traits(*e.instr).writes_rd && e.instr->rd != 0) rename_[e.instr->rd] = e.seq;
  }
}

std::vector<std::string> Pipeline::check_invariants() const {
  std::vector<std::string> bad;
  if (rob_.size() > kRobSize) bad.push_back("ROB occupancy " + std::to_string(rob_.size()) + " > 64");
  if (iq_.size() > kIqSize) bad.push_back("issue queue occupancy " + std::to_string(iq_.size()) + " > 16");
  if (committed_.regs[0] != 0) bad.push_back("x0 is non-zero");
  for (std::size_t i = 1; i < rob_.size(); ++i) {
    if (rob_[i].seq != rob_[i - 1].seq + 1) {
      bad.push_back("ROB sequence numbers not contiguous");
      break;
    }
  }
  if (!rob_.empty() && rob_.back().seq + 1 != next_seq_) bad.push_back("ROB tail does not match next sequence");
  if (!rob_.empty() && rob_.front().seq != committed_.minstret) {
    bad.push_back("ROB head sequence differs from retired count");
  }
  for (std::size_t i = 0; i < iq_.size(); ++i) {
    if (!in_rob(iq_[i]) || entry(iq_[i]).issued) bad.push_back("issue queue holds a stale entry");
    if (i > 0 && iq_[i] <= iq_[i - 1]) bad.push_back("issue queue out of program order");
  }
  unsigned divs = 0;
  for (const auto& f : in_flight_) {
    if (!in_rob(f.seq)) bad.push_back("in-flight op missing from ROB");
    else if (f.lane == Lane::MulDiv && is_divide(entry(f.seq).instr->mnemonic)) ++divs;
  }
  if (divs > 1) bad.push_back("more than one divide in flight");
  return bad;
}

}  // namespace lockstep::dut
