#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lockstep/iss.hpp"
#include "lockstep/wire.hpp"

namespace lockstep::net {

// "tcp:HOST:PORT", "HOST:PORT" or "unix:PATH".
struct Endpoint {
  enum class Kind { Tcp, Unix };
  Kind kind = Kind::Tcp;
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::string path;

  static Endpoint parse(const std::string& text);
  std::string to_string() const;
};

inline constexpr const char* kDefaultEndpoint = "tcp:127.0.0.1:9824";
inline constexpr const char* kEndpointEnvVar = "LOCKSTEP_ENDPOINT";

// kDefaultEndpoint unless the environment variable overrides it.
std::string default_endpoint();

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close();

  // Both throw wire::ConnectionLost on error or premature EOF.
  void send_all(std::span<const std::uint8_t> bytes);
  void recv_exact(std::span<std::uint8_t> out);
  // False on clean EOF before the first byte.
  bool recv_exact_or_eof(std::span<std::uint8_t> out);

 private:
  int fd_ = -1;
};

class Listener {
 public:
  // Throws std::system_error when the endpoint cannot be bound. Port 0 picks
  // an ephemeral port; see port().
  static Listener bind(const Endpoint& ep);

  Socket accept();
  std::uint16_t port() const { return port_; }
  const Endpoint& endpoint() const { return ep_; }
  int fd() const { return sock_.fd(); }

 private:
  Socket sock_;
  Endpoint ep_;
  std::uint16_t port_ = 0;
};

// Retries until the deadline while the server is not yet listening.
Socket connect(const Endpoint& ep, std::chrono::milliseconds timeout = std::chrono::seconds(5));

void write_frame(Socket& s, std::span<const std::uint8_t> frame);
// Returns the whole frame (header included), or nullopt on clean EOF.
// Oversized length fields throw wire::MalformedFrame without reading the body.
std::optional<std::vector<std::uint8_t>> read_frame(Socket& s);

enum class ServeOutcome { Quit, Disconnected, MalformedStorm };

struct ServeOptions {
  // Consecutive undecodable frames tolerated before the server gives up.
  unsigned malformed_limit = 16;
};

// Serves one connection until Quit, disconnect, or a malformed-frame storm.
ServeOutcome serve_connection(Iss& iss, Socket& conn, const ServeOptions& opts = {});
// Accepts one connection on the listener and serves it.
ServeOutcome serve(Iss& iss, Listener& listener, const ServeOptions& opts = {});

// Blocking client mirroring the ISS operations. Fault responses are rethrown
// as SimError; transport failures as wire::ConnectionLost.
class IssClient {
 public:
  explicit IssClient(Socket sock) : sock_(std::move(sock)) {}
  static IssClient connect(const Endpoint& ep, std::chrono::milliseconds timeout = std::chrono::seconds(5));

  void reset(std::uint32_t entry_pc);
  void load_image(const MemoryImage& image);
  std::vector<CommitRecord> step(std::uint32_t n);
  std::uint32_t get_reg(unsigned index);
  std::uint32_t get_pc();
  std::vector<std::uint8_t> get_mem(std::uint32_t addr, std::uint32_t len);
  std::uint64_t get_csr(Csr id);
  void quit();

  // Raw request/response; exposed for protocol tests.
  wire::Message call(const wire::Message& request);

 private:
  template <class T>
  T expect(const wire::Message& request);

  Socket sock_;
};

}  // namespace lockstep::net
