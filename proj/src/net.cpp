#include "lockstep/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <system_error>
#include <thread>

#include "lockstep/error.hpp"

namespace lockstep::net {
namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::system_error(errno, std::generic_category(), what);
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

sockaddr_un unix_address(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof addr.sun_path) throw std::invalid_argument("unix socket path too long: " + path);
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  return addr;
}

sockaddr_in tcp_address(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw std::invalid_argument("cannot resolve host " + ep.host);
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  ::freeaddrinfo(res);
  return addr;
}

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
  Endpoint ep;
  std::string rest = text;
  if (rest.rfind("unix:", 0) == 0) {
    ep.kind = Kind::Unix;
    ep.path = rest.substr(5);
    if (ep.path.empty()) throw std::invalid_argument("empty unix socket path in endpoint '" + text + "'");
    return ep;
  }
  if (rest.rfind("tcp:", 0) == 0) rest = rest.substr(4);
  const auto colon = rest.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("endpoint '" + text + "' lacks a port");
  ep.host = colon == 0 ? "127.0.0.1" : rest.substr(0, colon);
  const std::string port = rest.substr(colon + 1);
  char* end = nullptr;
  const unsigned long value = std::strtoul(port.c_str(), &end, 10);
  if (port.empty() || *end != '\0' || value > 65535) {
    throw std::invalid_argument("bad port in endpoint '" + text + "'");
  }
  ep.port = static_cast<std::uint16_t>(value);
  return ep;
}

std::string Endpoint::to_string() const {
  if (kind == Kind::Unix) return "unix:" + path;
  return "tcp:" + host + ":" + std::to_string(port);
}

std::string default_endpoint() {
  const char* env = std::getenv(kEndpointEnvVar);
  return (env && *env) ? env : kDefaultEndpoint;
}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

Socket::~Socket() { close(); }

void Socket::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void Socket::send_all(std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw wire::ConnectionLost(std::string("send failed: ") + std::strerror(errno));
    sent += static_cast<std::size_t>(n);
  }
}

bool Socket::recv_exact_or_eof(std::span<std::uint8_t> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    const ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) throw wire::ConnectionLost(std::string("recv failed: ") + std::strerror(errno));
    if (n == 0) {
      if (got == 0) return false;
      throw wire::ConnectionLost("peer closed mid-frame");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

void Socket::recv_exact(std::span<std::uint8_t> out) {
  if (!recv_exact_or_eof(out)) throw wire::ConnectionLost("peer closed the connection");
}

Listener Listener::bind(const Endpoint& ep) {
  Listener l;
  l.ep_ = ep;
  if (ep.kind == Endpoint::Kind::Unix) {
    l.sock_ = Socket(::socket(AF_UNIX, SOCK_STREAM, 0));
    if (!l.sock_.valid()) throw_errno("socket");
    const sockaddr_un addr = unix_address(ep.path);
    ::unlink(ep.path.c_str());
    if (::bind(l.sock_.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
      throw_errno("bind " + ep.to_string());
    }
  } else {
    l.sock_ = Socket(::socket(AF_INET, SOCK_STREAM, 0));
    if (!l.sock_.valid()) throw_errno("socket");
    int one = 1;
    ::setsockopt(l.sock_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    const sockaddr_in addr = tcp_address(ep);
    if (::bind(l.sock_.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
      throw_errno("bind " + ep.to_string());
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(l.sock_.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
    l.port_ = ntohs(bound.sin_port);
    l.ep_.port = l.port_;
  }
  if (::listen(l.sock_.fd(), 1) != 0) throw_errno("listen " + ep.to_string());
  return l;
}

Socket Listener::accept() {
  for (;;) {
    const int fd = ::accept(sock_.fd(), nullptr, nullptr);
    if (fd >= 0) {
      if (ep_.kind == Endpoint::Kind::Tcp) set_nodelay(fd);
      return Socket(fd);
    }
    if (errno != EINTR) throw_errno("accept");
  }
}

Socket connect(const Endpoint& ep, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    int rc = -1;
    Socket s;
    if (ep.kind == Endpoint::Kind::Unix) {
      s = Socket(::socket(AF_UNIX, SOCK_STREAM, 0));
      const sockaddr_un addr = unix_address(ep.path);
      rc = ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
    } else {
      s = Socket(::socket(AF_INET, SOCK_STREAM, 0));
      const sockaddr_in addr = tcp_address(ep);
      rc = ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
      if (rc == 0) set_nodelay(s.fd());
    }
    if (rc == 0) return s;
    const bool retryable = errno == ECONNREFUSED || errno == ENOENT || errno == EAGAIN;
    if (!retryable || std::chrono::steady_clock::now() >= deadline) {
      throw wire::ConnectionLost("cannot connect to " + ep.to_string() + ": " + std::strerror(errno));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
}

void write_frame(Socket& s, std::span<const std::uint8_t> frame) { s.send_all(frame); }

std::optional<std::vector<std::uint8_t>> read_frame(Socket& s) {
  std::vector<std::uint8_t> frame(4);
  if (!s.recv_exact_or_eof(frame)) return std::nullopt;
  const std::uint32_t len = std::uint32_t{frame[0]} | (std::uint32_t{frame[1]} << 8) |
                            (std::uint32_t{frame[2]} << 16) | (std::uint32_t{frame[3]} << 24);
  if (len > wire::kMaxFrame) throw wire::MalformedFrame("frame length exceeds limit");
  frame.resize(4 + std::size_t{len});
  s.recv_exact(std::span(frame).subspan(4));
  return frame;
}

ServeOutcome serve_connection(Iss& iss, Socket& conn, const ServeOptions& opts) {
  unsigned malformed = 0;
  for (;;) {
    std::optional<std::vector<std::uint8_t>> frame;
    wire::Message response;
    bool quit = false;
    try {
      frame = read_frame(conn);
      if (!frame) return ServeOutcome::Disconnected;
      const wire::Message request = wire::decode(*frame);
      malformed = 0;
      response = wire::dispatch(iss, request);
      quit = std::holds_alternative<wire::Quit>(request);
    } catch (const wire::MalformedFrame& e) {
      // An oversized length leaves the stream unsynchronized; every other
      // malformed frame was consumed whole and the stream stays usable.
      const bool resync = frame.has_value();
      if (++malformed >= opts.malformed_limit || !resync) {
        try {
          const auto out = wire::encode(wire::Fault{static_cast<std::uint8_t>(SimErrorKind::MalformedRequest), 0, 0,
                                                    e.what()});
          write_frame(conn, out);
        } catch (const wire::ConnectionLost&) {
        }
        return ServeOutcome::MalformedStorm;
      }
      response = wire::Fault{static_cast<std::uint8_t>(SimErrorKind::MalformedRequest), 0, 0, e.what()};
    } catch (const wire::ConnectionLost&) {
      return ServeOutcome::Disconnected;
    }
    try {
      write_frame(conn, wire::encode(response));
    } catch (const wire::ConnectionLost&) {
      return ServeOutcome::Disconnected;
    }
    if (quit) return ServeOutcome::Quit;
  }
}

ServeOutcome serve(Iss& iss, Listener& listener, const ServeOptions& opts) {
  Socket conn = listener.accept();
  return serve_connection(iss, conn, opts);
}

IssClient IssClient::connect(const Endpoint& ep, std::chrono::milliseconds timeout) {
  return IssClient(net::connect(ep, timeout));
}

wire::Message IssClient::call(const wire::Message& request) {
  if (!sock_.valid()) throw wire::ConnectionLost("client is not connected");
  write_frame(sock_, wire::encode(request));
  auto frame = read_frame(sock_);
  if (!frame) throw wire::ConnectionLost("server closed the connection");
  try {
    return wire::decode(*frame);
  } catch (const wire::MalformedFrame& e) {
    throw wire::ConnectionLost(std::string("undecodable response: ") + e.what());
  }
}

template <class T>
T IssClient::expect(const wire::Message& request) {
  wire::Message response = call(request);
  if (auto* f = std::get_if<wire::Fault>(&response)) {
    throw SimError(static_cast<SimErrorKind>(f->kind), f->pc, f->raw, f->detail);
  }
  if (auto* v = std::get_if<T>(&response)) return std::move(*v);
  throw wire::ConnectionLost("unexpected response tag " +
                             std::to_string(static_cast<unsigned>(wire::tag_of(response))));
}

void IssClient::reset(std::uint32_t entry_pc) { expect<wire::Ack>(wire::Reset{entry_pc}); }

void IssClient::load_image(const MemoryImage& image) { expect<wire::Ack>(wire::LoadImage{image.segments}); }

std::vector<CommitRecord> IssClient::step(std::uint32_t n) { return expect<wire::Commits>(wire::Step{n}).records; }

std::uint32_t IssClient::get_reg(unsigned index) {
  return expect<wire::RegVal>(wire::GetReg{static_cast<std::uint8_t>(index)}).value;
}

std::uint32_t IssClient::get_pc() { return expect<wire::PcVal>(wire::GetPc{}).value; }

std::vector<std::uint8_t> IssClient::get_mem(std::uint32_t addr, std::uint32_t len) {
  return expect<wire::MemBytes>(wire::GetMem{addr, len}).bytes;
}

std::uint64_t IssClient::get_csr(Csr id) {
  return expect<wire::CsrVal>(wire::GetCsr{static_cast<std::uint16_t>(id)}).value;
}

void IssClient::quit() {
  expect<wire::Ack>(wire::Quit{});
  sock_.close();
}

}  // namespace lockstep::net
