#pragma once

#include <cstdint>
#include <vector>

#include "lockstep/memory.hpp"

namespace lockstep {

struct Segment {
  std::uint32_t base = 0;
  std::vector<std::uint8_t> bytes;

  bool operator==(const Segment&) const = default;
};

// A loadable program: pairwise-disjoint segments plus an entry point.
struct MemoryImage {
  std::vector<Segment> segments;
  std::uint32_t entry = 0;

  bool operator==(const MemoryImage&) const = default;
};

// Throws SimError(OverlappingSegments) if two non-empty segments share a byte
// or a segment runs past the top of the address space.
void check_disjoint(const MemoryImage& image);

// Clears mem and copies every segment into it. Empty segments still map the
// page at their base so a fetch there is not reported as unmapped.
void install(const MemoryImage& image, Memory& mem);

}  // namespace lockstep
