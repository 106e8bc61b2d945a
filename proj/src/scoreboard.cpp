#include "lockstep/scoreboard.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "lockstep/isa.hpp"

namespace lockstep::stats {

void Scoreboard::record_cycle(std::span<const CommitRecord> commits) {
  ++cycles_;
  per_cycle_.push_back(static_cast<std::uint8_t>(commits.size()));
  if (commits.size() == 1) ++single_;
  if (commits.size() == 2) ++double_;
  for (const auto& c : commits) {
    const auto d = isa::try_decode(c.raw);
    ++coverage_[d ? std::string(isa::name(d->mnemonic)) : std::string("illegal")];
  }
}

StatsReport Scoreboard::finalize(double clock_mhz) const {
  const std::uint64_t instructions = single_ + 2 * double_;
  if (instructions == 0) throw ZeroInstructions();
  StatsReport r;
  r.program = program_;
  r.instructions = instructions;
  r.cycles = cycles_;
  r.cpi = static_cast<double>(cycles_) / static_cast<double>(instructions);
  r.clock_mhz = clock_mhz;
  r.exec_time_us = static_cast<double>(cycles_) / clock_mhz;
  r.single_commits = single_;
  r.double_commits = double_;
  r.double_fraction = static_cast<double>(double_) / static_cast<double>(single_ + double_);
  r.coverage = coverage_;
  return r;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string render_text(const StatsReport& r, const std::string& correctness) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %12s %12s %12s %12s\n", "Application", "Instructions", "Cycles", "us",
                "Correctness");
  out << line;
  std::snprintf(line, sizeof line, "%-16s %12llu %12llu %12.2f %12s\n", r.program.empty() ? "-" : r.program.c_str(),
                static_cast<unsigned long long>(r.instructions), static_cast<unsigned long long>(r.cycles),
                r.exec_time_us, correctness.c_str());
  out << line << '\n';
  std::snprintf(line, sizeof line, "CPI %.4f at %.2f MHz\n", r.cpi, r.clock_mhz);
  out << line;
  std::snprintf(line, sizeof line, "commits: %llu double, %llu single (%.1f%% double)\n",
                static_cast<unsigned long long>(r.double_commits), static_cast<unsigned long long>(r.single_commits),
                100.0 * r.double_fraction);
  out << line << "\ncoverage:\n";
  for (const auto& [mnemonic, count] : r.coverage) {
    std::snprintf(line, sizeof line, "  %-8s %llu\n", mnemonic.c_str(), static_cast<unsigned long long>(count));
    out << line;
  }
  return out.str();
}

std::string render_kv(const StatsReport& r) {
  std::ostringstream out;
  out << "lockstep-stats-version=" << kReportVersion << '\n';
  out << "program=" << r.program << '\n';
  out << "instructions=" << r.instructions << '\n';
  out << "cycles=" << r.cycles << '\n';
  out << "cpi=" << format_double(r.cpi) << '\n';
  out << "clock_mhz=" << format_double(r.clock_mhz) << '\n';
  out << "exec_time_us=" << format_double(r.exec_time_us) << '\n';
  out << "single_commits=" << r.single_commits << '\n';
  out << "double_commits=" << r.double_commits << '\n';
  out << "double_fraction=" << format_double(r.double_fraction) << '\n';
  for (const auto& [mnemonic, count] : r.coverage) out << "coverage." << mnemonic << '=' << count << '\n';
  return out.str();
}

namespace {

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("bad integer for " + key);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("bad number for " + key);
  return out;
}

}  // namespace

StatsReport parse_kv(const std::string& text) {
  StatsReport r;
  std::istringstream in(text);
  std::string line;
  unsigned seen = 0;
  bool version = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line without '=': " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "lockstep-stats-version") {
      if (to_u64(key, value) != kReportVersion) throw std::invalid_argument("unsupported report version " + value);
      version = true;
    } else if (key == "program") {
      r.program = value;
      seen |= 1u << 0;
    } else if (key == "instructions") {
      r.instructions = to_u64(key, value);
      seen |= 1u << 1;
    } else if (key == "cycles") {
      r.cycles = to_u64(key, value);
      seen |= 1u << 2;
    } else if (key == "cpi") {
      r.cpi = to_double(key, value);
      seen |= 1u << 3;
    } else if (key == "clock_mhz") {
      r.clock_mhz = to_double(key, value);
      seen |= 1u << 4;
    } else if (key == "exec_time_us") {
      r.exec_time_us = to_double(key, value);
      seen |= 1u << 5;
    } else if (key == "single_commits") {
      r.single_commits = to_u64(key, value);
      seen |= 1u << 6;
    } else if (key == "double_commits") {
      r.double_commits = to_u64(key, value);
      seen |= 1u << 7;
    } else if (key == "double_fraction") {
      r.double_fraction = to_double(key, value);
      seen |= 1u << 8;
    } else if (key.rfind("coverage.", 0) == 0) {
      r.coverage[key.substr(9)] = to_u64(key, value);
    } else {
      throw std::invalid_argument("unknown key " + key);
    }
  }
  if (!version) throw std::invalid_argument("missing lockstep-stats-version");
  if (seen != 0x1FF) throw std::invalid_argument("report is missing required fields");
  return r;
}

std::string render_commit_csv(std::span<const std::uint8_t> per_cycle) {
  std::string out = "cycle,commits\n";
  for (std::size_t i = 0; i < per_cycle.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += std::to_string(per_cycle[i]);
    out += '\n';
  }
  return out;
}

}  // namespace lockstep::stats
