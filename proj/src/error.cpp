#include "lockstep/error.hpp"

#include <cstdio>

namespace lockstep {

std::string_view to_string(SimErrorKind kind) {
  switch (kind) {
    case SimErrorKind::IllegalInstruction: return "IllegalInstruction";
    case SimErrorKind::MisalignedAccess: return "MisalignedAccess";
    case SimErrorKind::UnmappedAddress: return "UnmappedAddress";
    case SimErrorKind::UnsupportedCsr: return "UnsupportedCsr";
    case SimErrorKind::UnsupportedEcall: return "UnsupportedEcall";
    case SimErrorKind::OverlappingSegments: return "OverlappingSegments";
    case SimErrorKind::AlreadyHalted: return "AlreadyHalted";
    case SimErrorKind::Faulted: return "Faulted";
    case SimErrorKind::DeadlockDetected: return "DeadlockDetected";
    case SimErrorKind::FaultAlreadyArmed: return "FaultAlreadyArmed";
    case SimErrorKind::MalformedRequest: return "MalformedRequest";
  }
  return "Unknown";
}

namespace {

std::string compose(SimErrorKind kind, std::uint32_t pc, std::uint32_t raw, const std::string& detail) {
  char head[64];
  std::snprintf(head, sizeof head, " at pc=0x%08x raw=0x%08x", pc, raw);
  std::string msg(to_string(kind));
  msg += head;
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  return msg;
}

}  // namespace

SimError::SimError(SimErrorKind kind, std::uint32_t pc, std::uint32_t raw, const std::string& detail)
    : std::runtime_error(compose(kind, pc, raw, detail)), kind_(kind), pc_(pc), raw_(raw), detail_(detail) {}

}  // namespace lockstep
