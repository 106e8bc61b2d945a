#include "lockstep/harness.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <system_error>

#include "lockstep/error.hpp"
#include "lockstep/isa.hpp"

namespace lockstep::harness {
namespace {

std::string disasm_of(std::uint32_t raw) {
  if (auto d = isa::try_decode(raw)) return isa::disassemble(*d);
  char buf[32];
  std::snprintf(buf, sizeof buf, ".word 0x%08x", raw);
  return buf;
}

std::string hex32(std::uint64_t v) {
  if (v == kNoWrite) return "none";
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%08llx", static_cast<unsigned long long>(v));
  return buf;
}

MismatchReport base_report(const CommitRecord& dut, const CommitRecord& iss, std::uint64_t cycle) {
  MismatchReport m;
  m.cycle = cycle;
  m.pc_dut = dut.pc;
  m.pc_iss = iss.pc;
  m.seq = iss.seq;
  m.disassembly = disasm_of(iss.raw);
  return m;
}

std::map<std::uint32_t, std::uint8_t> bytes_of(const std::optional<isa::MemWrite>& w) {
  std::map<std::uint32_t, std::uint8_t> out;
  if (!w) return out;
  for (unsigned i = 0; i < w->width; ++i) out[w->addr + i] = static_cast<std::uint8_t>(w->value >> (8 * i));
  return out;
}

std::string env_detail(const char* side, const std::exception& e) { return std::string(side) + ": " + e.what(); }

}  // namespace

std::string to_string(const Location& loc) {
  switch (loc.kind) {
    case Location::Kind::Pc: return "pc";
    case Location::Kind::Instr: return "instr";
    case Location::Kind::Reg: return "reg(x" + std::to_string(loc.index) + ")";
    case Location::Kind::Mem: return "mem(" + hex32(loc.index) + ")";
    case Location::Kind::RetirementCount: return "retirement-count";
  }
  return "?";
}

int exit_code(const Verdict& v) { return static_cast<int>(v.index()); }

std::optional<MismatchReport> compare_commit(const CommitRecord& dut, const CommitRecord& iss, std::uint64_t cycle) {
  if (dut.pc != iss.pc) {
    MismatchReport m = base_report(dut, iss, cycle);
    m.location = {Location::Kind::Pc, 0};
    m.expected = iss.pc;
    m.actual = dut.pc;
    return m;
  }
  if (dut.raw != iss.raw) {
    MismatchReport m = base_report(dut, iss, cycle);
    m.location = {Location::Kind::Instr, 0};
    m.expected = iss.raw;
    m.actual = dut.raw;
    return m;
  }
  if (dut.reg_write != iss.reg_write) {
    MismatchReport m = base_report(dut, iss, cycle);
    const unsigned index = iss.reg_write ? iss.reg_write->index : dut.reg_write->index;
    m.location = {Location::Kind::Reg, index};
    m.expected = iss.reg_write && iss.reg_write->index == index ? iss.reg_write->value : kNoWrite;
    m.actual = dut.reg_write && dut.reg_write->index == index ? dut.reg_write->value : kNoWrite;
    return m;
  }
  if (dut.mem_write != iss.mem_write) {
    MismatchReport m = base_report(dut, iss, cycle);
    const auto& d = dut.mem_write;
    const auto& i = iss.mem_write;
    if (d && i && d->addr == i->addr && d->width == i->width) {
      m.location = {Location::Kind::Mem, i->addr};
      m.expected = i->value;
      m.actual = d->value;
      return m;
    }
    const auto eb = bytes_of(i);
    const auto ab = bytes_of(d);
    std::map<std::uint32_t, std::pair<std::uint64_t, std::uint64_t>> all;
    for (const auto& [a, v] : eb) all[a] = {v, kNoWrite};
    for (const auto& [a, v] : ab) {
      auto [it, inserted] = all.try_emplace(a, kNoWrite, v);
      if (!inserted) it->second.second = v;
    }
    for (const auto& [a, ev] : all) {
      if (ev.first != ev.second) {
        m.location = {Location::Kind::Mem, a};
        m.expected = ev.first;
        m.actual = ev.second;
        return m;
      }
    }
    // Same bytes written: the writes are equivalent.
  }
  return std::nullopt;
}

void mark_dirty(DirtySet& dirty, const CommitRecord& rec) {
  if (!rec.mem_write) return;
  for (unsigned i = 0; i < rec.mem_write->width; ++i) dirty.insert(rec.mem_write->addr + i);
}

std::optional<MismatchReport> compare_state(const dut::Pipeline& dut, IssPort& iss, const DirtySet& dirty,
                                            std::uint64_t cycle) {
  const std::uint32_t pc_iss = iss.get_pc();
  auto report = [&](Location loc, std::uint64_t expected, std::uint64_t actual) {
    MismatchReport m;
    m.cycle = cycle;
    m.pc_dut = dut.read_pc();
    m.pc_iss = pc_iss;
    m.location = loc;
    m.expected = expected;
    m.actual = actual;
    m.seq = dut.retired() == 0 ? 0 : dut.retired() - 1;
    return m;
  };
  if (pc_iss != dut.read_pc()) return report({Location::Kind::Pc, 0}, pc_iss, dut.read_pc());
  for (unsigned r = 1; r < 32; ++r) {
    const std::uint32_t expected = iss.get_reg(r);
    if (expected != dut.read_reg(r)) return report({Location::Kind::Reg, r}, expected, dut.read_reg(r));
  }
  const std::uint64_t iss_retired = iss.get_retired();
  if (iss_retired != dut.retired()) {
    return report({Location::Kind::RetirementCount, 0}, iss_retired, dut.retired());
  }
  // Coalesce dirty bytes into runs so each run is a single request.
  for (auto it = dirty.begin(); it != dirty.end();) {
    const std::uint32_t start = *it;
    std::uint32_t len = 1;
    auto next = std::next(it);
    while (next != dirty.end() && *next == start + len && len < (1u << 20)) {
      ++len;
      ++next;
    }
    const auto expected = iss.get_mem(start, len);
    const auto actual = dut.read_mem(start, len);
    for (std::uint32_t i = 0; i < len; ++i) {
      if (expected[i] != actual[i]) return report({Location::Kind::Mem, start + i}, expected[i], actual[i]);
    }
    it = next;
  }
  return std::nullopt;
}

Verdict run(const MemoryImage& image, dut::Pipeline& dut, net::IssClient& client, const RunConfig& config) {
  ClientPort port(client);
  return run(image, dut, port, config);
}

Verdict run(const MemoryImage& image, dut::Pipeline& dut, IssPort& iss, const RunConfig& config) {
  stats::Scoreboard scoreboard(config.program_name);
  DirtySet dirty;
  std::uint64_t iss_retired = 0;

  try {
    iss.load_image(image);
    iss.reset(image.entry);
  } catch (const std::exception& e) {
    return EnvError{env_detail("ISS setup", e)};
  }
  try {
    dut.load_image(image);
    dut.reset(image.entry);
  } catch (const std::exception& e) {
    return EnvError{env_detail("DUT setup", e)};
  }

  // Retires more DUT instructions after the ISS halted, to report how far
  // the DUT ran on. Bounded by the watchdog.
  auto dut_keeps_going = [&]() -> std::uint64_t {
    try {
      while (!dut.halted() && dut.cycle() < config.max_cycles) {
        if (!dut.tick().commits.empty()) break;
      }
    } catch (const SimError&) {
    }
    return dut.retired();
  };

  try {
    for (;;) {
      if (dut.cycle() >= config.max_cycles) {
        return EnvError{"watchdog: no halt within " + std::to_string(config.max_cycles) + " cycles"};
      }
      dut::CycleResult res;
      try {
        res = dut.tick();
      } catch (const SimError& e) {
        if (e.kind() == SimErrorKind::DeadlockDetected || e.kind() == SimErrorKind::AlreadyHalted) {
          return EnvError{env_detail("DUT", e)};
        }
        // The DUT trapped at its ROB head. If the ISS retires that
        // instruction normally, the trap itself is the divergence.
        std::vector<CommitRecord> probe;
        try {
          probe = iss.step(1);
        } catch (const SimError&) {
          return EnvError{env_detail("DUT", e)};
        }
        if (probe.empty()) return EnvError{env_detail("DUT", e)};
        MismatchReport m;
        m.cycle = dut.cycle();
        m.pc_dut = e.pc();
        m.pc_iss = probe.front().pc;
        m.seq = iss_retired;
        m.disassembly = disasm_of(probe.front().raw);
        if (e.pc() != probe.front().pc) {
          m.location = {Location::Kind::Pc, 0};
          m.expected = probe.front().pc;
          m.actual = e.pc();
        } else {
          m.location = {Location::Kind::RetirementCount, 0};
          m.expected = iss_retired + 1;
          m.actual = dut.retired();
        }
        return Mismatch{m};
      }
      scoreboard.record_cycle(res.commits);
      if (config.on_cycle) {
        auto problems = config.on_cycle(dut, res);
        if (!problems.empty()) return EnvError{"invariant violated at cycle " + std::to_string(res.cycle) + ": " +
                                               problems.front()};
      }
      if (res.commits.empty()) continue;
      if (config.on_commit) {
        for (const auto& c : res.commits) config.on_commit(res.cycle, c);
      }

      const auto count = static_cast<std::uint32_t>(res.commits.size());
      std::vector<CommitRecord> expected;
      try {
        expected = iss.step(count);
      } catch (const SimError& e) {
        return EnvError{env_detail("ISS fault", e)};
      }
      for (std::size_t i = 0; i < expected.size() && i < res.commits.size(); ++i) {
        mark_dirty(dirty, res.commits[i]);
        mark_dirty(dirty, expected[i]);
        if (auto m = compare_commit(res.commits[i], expected[i], res.cycle)) return Mismatch{*m};
      }
      iss_retired += expected.size();

      const bool iss_halted = !expected.empty() && expected.back().halt;
      if (expected.size() < res.commits.size() || (iss_halted && !res.halted)) {
        // ISS finished while the DUT keeps retiring.
        MismatchReport m;
        m.cycle = res.cycle;
        m.pc_iss = iss.get_pc();
        m.location = {Location::Kind::RetirementCount, 0};
        m.expected = iss_retired;
        m.seq = iss_retired;
        m.actual = expected.size() < res.commits.size() ? dut.retired() : dut_keeps_going();
        m.pc_dut = dut.read_pc();
        if (m.actual == m.expected) m.actual = m.expected + 1;
        m.disassembly = expected.size() < res.commits.size() ? disasm_of(res.commits[expected.size()].raw) : "";
        return Mismatch{m};
      }
      if (res.halted && !iss_halted) {
        // DUT finished early; confirm the ISS can still retire.
        MismatchReport m;
        m.cycle = res.cycle;
        m.pc_dut = dut.read_pc();
        m.pc_iss = iss.get_pc();
        m.location = {Location::Kind::RetirementCount, 0};
        m.actual = dut.retired();
        m.seq = dut.retired();
        std::vector<CommitRecord> more;
        try {
          more = iss.step(1);
        } catch (const SimError&) {
        }
        m.expected = iss_retired + more.size();
        if (m.expected == m.actual) m.expected = m.actual + 1;
        if (!more.empty()) m.disassembly = disasm_of(more.front().raw);
        return Mismatch{m};
      }

      const std::uint32_t pc_iss = iss.get_pc();
      if (pc_iss != dut.read_pc()) {
        MismatchReport m;
        m.cycle = res.cycle;
        m.pc_dut = dut.read_pc();
        m.pc_iss = pc_iss;
        m.location = {Location::Kind::Pc, 0};
        m.expected = pc_iss;
        m.actual = dut.read_pc();
        m.seq = res.commits.back().seq;
        m.disassembly = disasm_of(res.commits.back().raw);
        return Mismatch{m};
      }
      if (dut.retired() != iss_retired) {
        MismatchReport m;
        m.cycle = res.cycle;
        m.pc_dut = dut.read_pc();
        m.pc_iss = pc_iss;
        m.location = {Location::Kind::RetirementCount, 0};
        m.expected = iss_retired;
        m.actual = dut.retired();
        m.seq = res.commits.back().seq;
        return Mismatch{m};
      }
      if (res.halted) break;
    }

    if (auto m = compare_state(dut, iss, dirty, dut.cycle())) return Mismatch{*m};
  } catch (const wire::ConnectionLost& e) {
    return EnvError{env_detail("connection lost", e)};
  } catch (const SimError& e) {
    return EnvError{env_detail("ISS", e)};
  } catch (const std::system_error& e) {
    return EnvError{env_detail("transport", e)};
  }

  try {
    return Ok{scoreboard.finalize(config.clock_mhz)};
  } catch (const stats::ZeroInstructions& e) {
    return EnvError{e.what()};
  }
}

std::string render_verdict(const Verdict& v) {
  std::ostringstream out;
  if (const auto* ok = std::get_if<Ok>(&v)) {
    out << "verdict: OK\n\n" << stats::render_text(ok->stats, "OK");
  } else if (const auto* mm = std::get_if<Mismatch>(&v)) {
    const auto& m = mm->report;
    out << "verdict: MISMATCH\n";
    out << "  cycle     " << m.cycle << '\n';
    out << "  seq       " << m.seq << '\n';
    out << "  pc_dut    " << hex32(m.pc_dut) << '\n';
    out << "  pc_iss    " << hex32(m.pc_iss) << '\n';
    out << "  location  " << to_string(m.location) << '\n';
    if (m.location.kind == Location::Kind::RetirementCount) {
      out << "  expected  " << m.expected << " (ISS)\n";
      out << "  actual    " << m.actual << " (DUT)\n";
    } else {
      out << "  expected  " << hex32(m.expected) << " (ISS)\n";
      out << "  actual    " << hex32(m.actual) << " (DUT)\n";
    }
    if (!m.disassembly.empty()) out << "  instr     " << m.disassembly << '\n';
  } else {
    out << "verdict: ENVIRONMENT ERROR\n  " << std::get<EnvError>(v).detail << '\n';
  }
  return out.str();
}

std::string render_mismatch_kv(const MismatchReport& m) {
  std::ostringstream out;
  out << "lockstep-mismatch-version=1\n";
  out << "cycle=" << m.cycle << '\n';
  out << "seq=" << m.seq << '\n';
  out << "pc_dut=" << hex32(m.pc_dut) << '\n';
  out << "pc_iss=" << hex32(m.pc_iss) << '\n';
  out << "location=" << to_string(m.location) << '\n';
  out << "expected=" << (m.expected == kNoWrite ? "none" : std::to_string(m.expected)) << '\n';
  out << "actual=" << (m.actual == kNoWrite ? "none" : std::to_string(m.actual)) << '\n';
  out << "disassembly=" << m.disassembly << '\n';
  return out.str();
}

std::string format_trace_line(std::uint64_t cycle, const CommitRecord& rec) {
  char head[64];
  std::snprintf(head, sizeof head, "%8llu %8llu 0x%08x  ", static_cast<unsigned long long>(cycle),
                static_cast<unsigned long long>(rec.seq), rec.pc);
  std::string line = head;
  std::string text = disasm_of(rec.raw);
  text.resize(std::max<std::size_t>(text.size(), 28), ' ');
  line += text;
  char eff[64];
  if (rec.reg_write) {
    std::snprintf(eff, sizeof eff, " x%u=0x%08x", rec.reg_write->index, rec.reg_write->value);
    line += eff;
  }
  if (rec.mem_write) {
    std::snprintf(eff, sizeof eff, " mem[0x%08x]/%u=0x%x", rec.mem_write->addr, rec.mem_write->width,
                  rec.mem_write->value);
    line += eff;
  }
  if (rec.halt) line += " halt";
  return line;
}

}  // namespace lockstep::harness
