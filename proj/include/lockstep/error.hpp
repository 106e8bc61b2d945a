#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lockstep {

// Simulator-side failures. The numeric values travel in wire Fault frames,
// so they are part of the protocol and must not be renumbered.
enum class SimErrorKind : std::uint8_t {
  IllegalInstruction = 1,
  MisalignedAccess = 2,
  UnmappedAddress = 3,
  UnsupportedCsr = 4,
  UnsupportedEcall = 5,
  OverlappingSegments = 6,
  AlreadyHalted = 7,
  Faulted = 8,
  DeadlockDetected = 9,
  FaultAlreadyArmed = 10,
  MalformedRequest = 11,
};

std::string_view to_string(SimErrorKind kind);

class SimError : public std::runtime_error {
 public:
  SimError(SimErrorKind kind, std::uint32_t pc, std::uint32_t raw, const std::string& detail);

  SimErrorKind kind() const noexcept { return kind_; }
  std::uint32_t pc() const noexcept { return pc_; }
  std::uint32_t raw() const noexcept { return raw_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  SimErrorKind kind_;
  std::uint32_t pc_;
  std::uint32_t raw_;
  std::string detail_;
};

}  // namespace lockstep
