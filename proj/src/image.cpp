#include "lockstep/image.hpp"

#include <algorithm>
#include <cstdio>

#include "lockstep/error.hpp"

namespace lockstep {

void check_disjoint(const MemoryImage& image) {
  struct Range {
    std::uint64_t lo, hi;
  };
  std::vector<Range> ranges;
  for (const auto& seg : image.segments) {
    const std::uint64_t lo = seg.base;
    const std::uint64_t hi = lo + seg.bytes.size();
    if (hi > (std::uint64_t{1} << 32)) {
      throw SimError(SimErrorKind::OverlappingSegments, 0, 0, "segment wraps past the 32-bit address space");
    }
    if (hi > lo) ranges.push_back({lo, hi});
  }
  std::sort(ranges.begin(), ranges.end(), [](const Range& a, const Range& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].lo < ranges[i - 1].hi) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "segment at 0x%08llx overlaps segment at 0x%08llx",
                    static_cast<unsigned long long>(ranges[i].lo), static_cast<unsigned long long>(ranges[i - 1].lo));
      throw SimError(SimErrorKind::OverlappingSegments, 0, 0, buf);
    }
  }
}

void install(const MemoryImage& image, Memory& mem) {
  check_disjoint(image);
  mem.clear();
  for (const auto& seg : image.segments) {
    if (seg.bytes.empty()) {
      // Map the page without changing its (zero) contents.
      mem.write8(seg.base, 0);
      continue;
    }
    mem.write_bytes(seg.base, seg.bytes);
  }
}

}  // namespace lockstep
