#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace lockstep {

// Sparse little-endian byte-addressable 32-bit address space. Pages come into
// existence when written; reads of absent pages return zero.
class Memory {
 public:
  static constexpr unsigned kPageBits = 12;
  static constexpr std::uint32_t kPageSize = 1u << kPageBits;

  std::uint8_t read8(std::uint32_t addr) const;
  void write8(std::uint32_t addr, std::uint8_t value);

  // width in {1, 2, 4}; no alignment requirement at this level.
  std::uint32_t read(std::uint32_t addr, unsigned width) const;
  void write(std::uint32_t addr, unsigned width, std::uint32_t value);

  std::vector<std::uint8_t> read_bytes(std::uint32_t addr, std::uint32_t len) const;
  void write_bytes(std::uint32_t addr, std::span<const std::uint8_t> bytes);

  // True if the page holding addr was ever loaded or written.
  bool is_mapped(std::uint32_t addr) const;

  void clear() { pages_.clear(); }
  std::size_t page_count() const { return pages_.size(); }

  // Calls fn(page_base, span<const uint8_t, kPageSize>) for every present page.
  template <typename Fn>
  void for_each_page(Fn&& fn) const {
    for (const auto& [index, page] : pages_) fn(index << kPageBits, std::span<const std::uint8_t>(page));
  }

 private:
  using Page = std::array<std::uint8_t, kPageSize>;

  const Page* find(std::uint32_t addr) const;
  Page& touch(std::uint32_t addr);

  std::unordered_map<std::uint32_t, Page> pages_;
};

}  // namespace lockstep
