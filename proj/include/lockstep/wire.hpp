#pragma once

// Lockstep protocol between the verification harness (client) and the golden
// ISS (server). Strict request/response alternation over a byte stream.
//
// Frame:   len:u32le | tag:u8 | payload[len - 1]
//          len counts the tag byte plus the payload.
// All integers are little-endian. Variable-length fields are a u32 count
// followed by the elements.
//
//   tag   message     payload
//   0x01  Reset       entry_pc:u32
//   0x02  LoadImage   count:u32 { base:u32 len:u32 bytes[len] } * count
//   0x03  Step        n:u32
//   0x04  GetReg      index:u8                  (0..31)
//   0x05  GetPc       -
//   0x06  GetMem      addr:u32 len:u32
//   0x07  Quit        -
//   0x08  GetCsr      csr:u16
//   0x81  Commits     count:u32 record * count
//   0x82  RegVal      value:u32
//   0x83  PcVal       value:u32
//   0x84  MemBytes    len:u32 bytes[len]
//   0x85  Ack         -
//   0x86  Fault       kind:u8 pc:u32 raw:u32 len:u32 detail[len] (UTF-8)
//   0x87  CsrVal      value:u64
//
// record:  seq:u64 pc:u32 raw:u32 flags:u8
//          [idx:u8 val:u32]            if flags & 0x01 (register write, idx 1..31)
//          [addr:u32 width:u8 val:u32] if flags & 0x02 (memory write, width 1/2/4)
//          flags & 0x04 marks the halting record; other bits must be zero.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lockstep/image.hpp"
#include "lockstep/iss.hpp"

namespace lockstep::wire {

enum class Tag : std::uint8_t {
  Reset = 0x01,
  LoadImage = 0x02,
  Step = 0x03,
  GetReg = 0x04,
  GetPc = 0x05,
  GetMem = 0x06,
  Quit = 0x07,
  GetCsr = 0x08,
  Commits = 0x81,
  RegVal = 0x82,
  PcVal = 0x83,
  MemBytes = 0x84,
  Ack = 0x85,
  Fault = 0x86,
  CsrVal = 0x87,
};

inline constexpr std::uint8_t kFlagReg = 0x01;
inline constexpr std::uint8_t kFlagMem = 0x02;
inline constexpr std::uint8_t kFlagHalt = 0x04;

// Upper bound on len; larger frames are rejected before allocation.
inline constexpr std::uint32_t kMaxFrame = 64u << 20;

struct Reset {
  std::uint32_t entry_pc = 0;
  bool operator==(const Reset&) const = default;
};
struct LoadImage {
  std::vector<Segment> segments;
  bool operator==(const LoadImage&) const = default;
};
struct Step {
  std::uint32_t n = 0;
  bool operator==(const Step&) const = default;
};
struct GetReg {
  std::uint8_t index = 0;
  bool operator==(const GetReg&) const = default;
};
struct GetPc {
  bool operator==(const GetPc&) const = default;
};
struct GetMem {
  std::uint32_t addr = 0;
  std::uint32_t len = 0;
  bool operator==(const GetMem&) const = default;
};
struct Quit {
  bool operator==(const Quit&) const = default;
};
struct GetCsr {
  std::uint16_t csr = 0;
  bool operator==(const GetCsr&) const = default;
};
struct Commits {
  std::vector<CommitRecord> records;
  bool operator==(const Commits&) const = default;
};
struct RegVal {
  std::uint32_t value = 0;
  bool operator==(const RegVal&) const = default;
};
struct PcVal {
  std::uint32_t value = 0;
  bool operator==(const PcVal&) const = default;
};
struct MemBytes {
  std::vector<std::uint8_t> bytes;
  bool operator==(const MemBytes&) const = default;
};
struct Ack {
  bool operator==(const Ack&) const = default;
};
struct Fault {
  std::uint8_t kind = 0;  // SimErrorKind value
  std::uint32_t pc = 0;
  std::uint32_t raw = 0;
  std::string detail;
  bool operator==(const Fault&) const = default;
};
struct CsrVal {
  std::uint64_t value = 0;
  bool operator==(const CsrVal&) const = default;
};

using Message = std::variant<Reset, LoadImage, Step, GetReg, GetPc, GetMem, Quit, GetCsr, Commits, RegVal, PcVal,
                             MemBytes, Ack, Fault, CsrVal>;

Tag tag_of(const Message& m);
bool is_request(const Message& m);

class MalformedFrame : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConnectionLost : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode(const Message& m);
// frame must be exactly one complete frame, header included.
Message decode(std::span<const std::uint8_t> frame);

// Executes one request against the ISS. SimErrors become Fault responses;
// a response-typed message yields Fault(MalformedRequest).
Message dispatch(Iss& iss, const Message& request);

}  // namespace lockstep::wire
