#include "lockstep/memory.hpp"

namespace lockstep {

const Memory::Page* Memory::find(std::uint32_t addr) const {
  auto it = pages_.find(addr >> kPageBits);
  return it == pages_.end() ? nullptr : &it->second;
}

Memory::Page& Memory::touch(std::uint32_t addr) {
  auto [it, inserted] = pages_.try_emplace(addr >> kPageBits);
  if (inserted) it->second.fill(0);
  return it->second;
}

std::uint8_t Memory::read8(std::uint32_t addr) const {
  const Page* page = find(addr);
  return page ? (*page)[addr & (kPageSize - 1)] : 0;
}

void Memory::write8(std::uint32_t addr, std::uint8_t value) { touch(addr)[addr & (kPageSize - 1)] = value; }

std::uint32_t Memory::read(std::uint32_t addr, unsigned width) const {
  std::uint32_t value = 0;
  for (unsigned i = 0; i < width; ++i) value |= std::uint32_t{read8(addr + i)} << (8 * i);
  return value;
}

void Memory::write(std::uint32_t addr, unsigned width, std::uint32_t value) {
  for (unsigned i = 0; i < width; ++i) write8(addr + i, static_cast<std::uint8_t>(value >> (8 * i)));
}

std::vector<std::uint8_t> Memory::read_bytes(std::uint32_t addr, std::uint32_t len) const {
  std::vector<std::uint8_t> out(len);
  for (std::uint32_t i = 0; i < len; ++i) out[i] = read8(addr + i);
  return out;
}

void Memory::write_bytes(std::uint32_t addr, std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < bytes.size(); ++i) write8(addr + static_cast<std::uint32_t>(i), bytes[i]);
}

bool Memory::is_mapped(std::uint32_t addr) const { return find(addr) != nullptr; }

}  // namespace lockstep
