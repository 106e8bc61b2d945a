#include <random>
#include <thread>

#include "doctest.h"
#include "lockstep/error.hpp"
#include "lockstep/isa.hpp"
#include "lockstep/net.hpp"
#include "lockstep/wire.hpp"
#include "oracle/wiregen.hpp"

using namespace lockstep;
namespace w = lockstep::wire;

namespace {

MemoryImage tiny(std::initializer_list<std::uint32_t> words) {
  Segment s{0x1000, {}};
  for (auto x : words)
    for (int i = 0; i < 4; i++) s.bytes.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
  return MemoryImage{{s}, 0x1000};
}

// Serves one connection on an ephemeral loopback port in a thread.
struct TestServer {
  Iss iss;
  net::Listener listener = net::Listener::bind(net::Endpoint::parse("tcp:127.0.0.1:0"));
  net::ServeOutcome outcome = net::ServeOutcome::Disconnected;
  std::thread thread{[this] { outcome = net::serve(iss, listener); }};

  net::Endpoint endpoint() const {
    auto ep = net::Endpoint::parse("tcp:127.0.0.1:0");
    ep.port = listener.port();
    return ep;
  }
  ~TestServer() {
    if (thread.joinable()) thread.join();
  }
};

}  // namespace

TEST_CASE("GetPc frame is five bytes") {
  CHECK(w::encode(w::GetPc{}) == std::vector<std::uint8_t>{1, 0, 0, 0, 0x05});
}

TEST_CASE("Step{2} frame") {
  CHECK(w::encode(w::Step{2}) == std::vector<std::uint8_t>{5, 0, 0, 0, 0x03, 2, 0, 0, 0});
}

TEST_CASE("Ack round trips") { CHECK(w::decode(w::encode(w::Ack{})) == w::Message{w::Ack{}}); }

TEST_CASE("unknown tag and truncated Commits are malformed") {
  CHECK_THROWS_AS(w::decode(std::vector<std::uint8_t>{1, 0, 0, 0, 0xFF}), w::MalformedFrame);
  w::Commits c;
  c.records.push_back(CommitRecord{1, 0x1000, 0x13, isa::RegWrite{5, 9}, std::nullopt, false});
  auto frame = w::encode(c);
  frame.pop_back();
  frame[0] = static_cast<std::uint8_t>(frame.size() - 4);
  CHECK_THROWS_AS(w::decode(frame), w::MalformedFrame);
}

TEST_CASE("commit record layout") {
  w::Commits c;
  c.records.push_back(CommitRecord{0x0102, 0x80000000u, 0x00A50533, isa::RegWrite{10, 0xAABBCCDD},
                                   isa::MemWrite{0x10, 2, 0xBEEF}, true});
  const auto f = w::encode(c);
  const std::vector<std::uint8_t> expect = {
      36, 0, 0, 0, 0x81, 1, 0, 0, 0,                  // header, count
      0x02, 0x01, 0, 0, 0, 0, 0, 0,                   // seq
      0, 0, 0, 0x80, 0x33, 0x05, 0xA5, 0x00,          // pc, raw
      0x07,                                           // reg | mem | halt
      10, 0xDD, 0xCC, 0xBB, 0xAA,                     // reg write
      0x10, 0, 0, 0, 2, 0xEF, 0xBE, 0, 0};            // mem write
  CHECK(f == expect);
  CHECK(w::decode(f) == w::Message{c});
}

TEST_CASE("10000 random messages round trip") {
  std::mt19937 rng(2024);
  for (int i = 0; i < 10000; i++) {
    const auto m = wiregen::random_message(rng);
    const auto bytes = w::encode(m);
    const auto back = w::decode(bytes);
    if (!(back == m)) FAIL("message " << i << " with tag " << int(w::tag_of(m)) << " did not round trip");
  }
}

TEST_CASE("malformed corpus never decodes into a request the ISS accepts") {
  Iss iss;
  for (const auto& bad : wiregen::malformed_corpus()) {
    CAPTURE(bad.name);
    try {
      const auto m = w::decode(bad.bytes);
      const auto resp = w::dispatch(iss, m);
      REQUIRE(std::holds_alternative<w::Fault>(resp));
      CHECK(std::get<w::Fault>(resp).kind == static_cast<std::uint8_t>(SimErrorKind::MalformedRequest));
    } catch (const w::MalformedFrame&) {
    }
  }
  CHECK_THROWS_AS(w::decode(wiregen::oversize_frame()), w::MalformedFrame);
}

TEST_CASE("random byte mutations only ever raise MalformedFrame") {
  std::mt19937 rng(7);
  for (int i = 0; i < 10000; i++) {
    auto bytes = w::encode(wiregen::random_message(rng));
    const int flips = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < flips; k++) bytes[4 + rng() % (bytes.size() - 4)] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
    try {
      (void)w::decode(bytes);
    } catch (const w::MalformedFrame&) {
    }
  }
}

TEST_CASE("endpoint parsing") {
  auto a = net::Endpoint::parse("tcp:127.0.0.1:9824");
  CHECK(a.kind == net::Endpoint::Kind::Tcp);
  CHECK(a.port == 9824);
  auto b = net::Endpoint::parse("localhost:80");
  CHECK(b.host == "localhost");
  auto c = net::Endpoint::parse("unix:/tmp/x.sock");
  CHECK(c.kind == net::Endpoint::Kind::Unix);
  CHECK(c.path == "/tmp/x.sock");
  CHECK_THROWS(net::Endpoint::parse("tcp:host:notaport"));
}

TEST_CASE("client and server over loopback") {
  TestServer server;
  auto client = net::IssClient::connect(server.endpoint());
  const auto img = tiny({isa::encode(isa::Mnemonic::Addi, 10, 0, 0, 5), isa::encode(isa::Mnemonic::Addi, 17, 0, 0, 93),
                         0x00000073});
  client.load_image(img);
  client.reset(0x1000);
  CHECK(client.get_pc() == 0x1000);
  const auto recs = client.step(10);
  REQUIRE(recs.size() == 3);
  CHECK(recs.back().halt);
  CHECK(client.get_reg(10) == 5);
  CHECK(client.get_csr(Csr::Minstret) == 3);
  CHECK(client.get_mem(0x1000, 2) == std::vector<std::uint8_t>{img.segments[0].bytes[0], img.segments[0].bytes[1]});
  CHECK_THROWS_AS(client.step(1), SimError);  // already halted
  client.quit();
  server.thread.join();
  CHECK(server.outcome == net::ServeOutcome::Quit);
}

TEST_CASE("illegal instruction comes back as a fault with pc and raw") {
  TestServer server;
  auto client = net::IssClient::connect(server.endpoint());
  client.load_image(tiny({0x00000013, 0xFFFFFFFF}));
  client.reset(0x1000);
  try {
    client.step(2);
    FAIL("no fault");
  } catch (const SimError& e) {
    CHECK(e.kind() == SimErrorKind::IllegalInstruction);
    CHECK(e.pc() == 0x1004);
    CHECK(e.raw() == 0xFFFFFFFF);
  }
  client.quit();
}

TEST_CASE("server survives the malformed corpus and keeps serving") {
  TestServer server;
  net::Socket s = net::connect(server.endpoint());
  for (const auto& bad : wiregen::malformed_corpus()) {
    CAPTURE(bad.name);
    s.send_all(bad.bytes);
    const auto resp = net::read_frame(s);
    REQUIRE(resp);
    const auto m = w::decode(*resp);
    REQUIRE(std::holds_alternative<w::Fault>(m));
    // A valid request in between resets the malformed streak.
    net::write_frame(s, w::encode(w::GetPc{}));
    const auto ok = net::read_frame(s);
    REQUIRE(ok);
    CHECK(std::holds_alternative<w::PcVal>(w::decode(*ok)));
  }
  s.send_all(wiregen::oversize_frame());
  server.thread.join();
  CHECK(server.outcome == net::ServeOutcome::MalformedStorm);
}

TEST_CASE("binding an occupied port fails") {
  auto first = net::Listener::bind(net::Endpoint::parse("tcp:127.0.0.1:0"));
  auto ep = net::Endpoint::parse("tcp:127.0.0.1:0");
  ep.port = first.port();
  CHECK_THROWS_AS(net::Listener::bind(ep), std::system_error);
}
