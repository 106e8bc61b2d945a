// lockstep: ISS server and lockstep verifier.
//
//   lockstep iss-serve [--endpoint E] [--tohost ADDR]
//   lockstep verify PROGRAM [--endpoint E | --spawn-iss] [options]
//
// Exit codes for verify: 0 Ok, 1 Mismatch, 2 environment error.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lockstep/harness.hpp"
#include "lockstep/loader.hpp"
#include "lockstep/net.hpp"
#include "lockstep/pipeline.hpp"

using namespace lockstep;

namespace {

constexpr int kExitEnv = 2;

std::optional<std::uint32_t> parse_addr(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return static_cast<std::uint32_t>(std::stoul(s, nullptr, 0));
}

int cmd_iss_serve(const std::string& endpoint, const std::string& tohost) {
  net::Listener listener;
  try {
    listener = net::Listener::bind(net::Endpoint::parse(endpoint));
  } catch (const std::exception& e) {
    std::cerr << "iss-serve: cannot bind " << endpoint << ": " << e.what() << '\n';
    return 1;
  }
  Iss iss(ExitConfig{parse_addr(tohost)});
  try {
    switch (net::serve(iss, listener)) {
      case net::ServeOutcome::Quit: return 0;
      case net::ServeOutcome::Disconnected:
        std::cerr << "iss-serve: client disconnected without Quit\n";
        return 0;
      case net::ServeOutcome::MalformedStorm:
        std::cerr << "iss-serve: too many malformed frames, giving up\n";
        return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "iss-serve: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

struct VerifyOptions {
  std::string program;
  std::string endpoint;
  bool spawn = false;
  double clock_mhz = stats::kDefaultClockMhz;
  std::uint64_t max_cycles = 10'000'000;
  std::string fault;
  bool trace = false;
  std::string report;
  std::string format = "text";
  std::string csv;
  std::string flat_base = "0";
  std::string flat_entry;
  std::string tohost;
};

int cmd_verify(const VerifyOptions& o) {
  MemoryImage image;
  try {
    const std::uint32_t base = *parse_addr(o.flat_base);
    image = loader::load_program(o.program, base, o.flat_entry.empty() ? base : *parse_addr(o.flat_entry));
  } catch (const std::exception& e) {
    std::cerr << "verify: " << o.program << ": " << e.what() << '\n';
    return kExitEnv;
  }

  const ExitConfig exit_cfg{parse_addr(o.tohost)};
  dut::Pipeline pipe(dut::PipelineConfig{exit_cfg});
  if (!o.fault.empty()) {
    try {
      pipe.inject_fault(dut::parse_fault_spec(o.fault));
    } catch (const std::exception& e) {
      std::cerr << "verify: bad --fault: " << e.what() << '\n';
      return kExitEnv;
    }
  }

  pid_t child = -1;
  std::optional<net::IssClient> client;
  try {
    if (o.spawn) {
      net::Endpoint ep = net::Endpoint::parse("tcp:127.0.0.1:0");
      net::Listener listener = net::Listener::bind(ep);
      ep.port = listener.port();
      std::cout.flush();
      child = ::fork();
      if (child < 0) throw std::system_error(errno, std::generic_category(), "fork");
      if (child == 0) {
        Iss iss(exit_cfg);
        const auto outcome = net::serve(iss, listener);
        ::_exit(outcome == net::ServeOutcome::MalformedStorm ? 3 : 0);
      }
      client.emplace(net::IssClient::connect(ep));
    } else {
      client.emplace(net::IssClient::connect(net::Endpoint::parse(o.endpoint)));
    }
  } catch (const std::exception& e) {
    std::cerr << "verify: cannot reach ISS: " << e.what() << '\n';
    if (child > 0) ::waitpid(child, nullptr, 0);
    return kExitEnv;
  }

  harness::RunConfig cfg;
  cfg.program_name = std::filesystem::path(o.program).stem().string();
  cfg.clock_mhz = o.clock_mhz;
  cfg.max_cycles = o.max_cycles;
  if (o.trace) {
    cfg.on_commit = [](std::uint64_t cycle, const CommitRecord& rec) {
      std::cout << harness::format_trace_line(cycle, rec) << '\n';
    };
  }
  std::vector<std::uint8_t> per_cycle;
  if (!o.csv.empty()) {
    cfg.on_cycle = [&per_cycle](const dut::Pipeline&, const dut::CycleResult& r) {
      per_cycle.push_back(static_cast<std::uint8_t>(r.commits.size()));
      return std::vector<std::string>{};
    };
  }

  harness::Verdict verdict = harness::run(image, pipe, *client, cfg);
  try {
    client->quit();
  } catch (const std::exception&) {
  }
  if (child > 0) ::waitpid(child, nullptr, 0);

  const bool kv = o.format == "kv";
  if (kv) {
    if (const auto* ok = std::get_if<harness::Ok>(&verdict)) std::cout << stats::render_kv(ok->stats);
    else if (const auto* mm = std::get_if<harness::Mismatch>(&verdict)) std::cout << harness::render_mismatch_kv(mm->report);
    else std::cout << "error=" << std::get<harness::EnvError>(verdict).detail << '\n';
  } else {
    std::cout << harness::render_verdict(verdict);
  }

  if (!o.report.empty()) {
    std::ofstream out(o.report);
    if (const auto* ok = std::get_if<harness::Ok>(&verdict)) out << stats::render_kv(ok->stats);
    else if (const auto* mm = std::get_if<harness::Mismatch>(&verdict)) out << harness::render_mismatch_kv(mm->report);
    else out << "error=" << std::get<harness::EnvError>(verdict).detail << '\n';
    if (!out) {
      std::cerr << "verify: cannot write report " << o.report << '\n';
      return kExitEnv;
    }
  }
  if (!o.csv.empty()) {
    std::ofstream out(o.csv);
    out << stats::render_commit_csv(per_cycle);
  }
  return harness::exit_code(verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lockstep co-simulation of a dual-issue RV32IM pipeline against a golden ISS"};
  app.require_subcommand(1);

  std::string serve_endpoint = net::default_endpoint();
  std::string serve_tohost;
  auto* serve = app.add_subcommand("iss-serve", "Serve the golden ISS on a socket until Quit");
  serve->add_option("--endpoint", serve_endpoint, "tcp:HOST:PORT, HOST:PORT or unix:PATH")->capture_default_str();
  serve->add_option("--tohost", serve_tohost, "Halt on a 4-byte store to this address");

  VerifyOptions v;
  v.endpoint = net::default_endpoint();
  auto* verify = app.add_subcommand("verify", "Run a program on the pipeline in lockstep with the ISS");
  verify->add_option("program", v.program, "ELF or flat binary")->required();
  auto* ep = verify->add_option("--endpoint", v.endpoint, "Connect to a running iss-serve")->capture_default_str();
  verify->add_flag("--spawn-iss", v.spawn, "Host the ISS in a child process")->excludes(ep);
  verify->add_option("--clock-mhz", v.clock_mhz, "Clock for execution-time figures")->capture_default_str();
  verify->add_option("--max-cycles", v.max_cycles, "Watchdog")->capture_default_str();
  verify->add_option("--fault", v.fault, "kind@(cycle|seq)=N[:payload]");
  verify->add_flag("--trace", v.trace, "Print one line per retired instruction");
  verify->add_option("--report", v.report, "Write a key=value report here");
  verify->add_option("--format", v.format, "Console output format")
      ->check(CLI::IsMember({"text", "kv"}))
      ->capture_default_str();
  verify->add_option("--csv", v.csv, "Write per-cycle commit counts here");
  verify->add_option("--flat-base", v.flat_base, "Load address for flat binaries")->capture_default_str();
  verify->add_option("--entry", v.flat_entry, "Entry point for flat binaries (default: base)");
  verify->add_option("--tohost", v.tohost, "Halt on a 4-byte store to this address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitEnv;
  }

  try {
    if (*serve) return cmd_iss_serve(serve_endpoint, serve_tohost);
    return cmd_verify(v);
  } catch (const std::exception& e) {
    std::cerr << "lockstep: " << e.what() << '\n';
    return kExitEnv;
  }
}
