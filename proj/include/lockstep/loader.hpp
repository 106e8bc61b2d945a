#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lockstep/image.hpp"

namespace lockstep::loader {

enum class LoadErrorKind {
  NotElf,
  UnsupportedClass,
  UnsupportedMachine,
  UnsupportedFlags,
  MalformedHeader,
  Io,
};

std::string_view to_string(LoadErrorKind kind);

class LoadError : public std::runtime_error {
 public:
  LoadError(LoadErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}
  LoadErrorKind kind() const noexcept { return kind_; }

 private:
  LoadErrorKind kind_;
};

// ELF constants the loader relies on.
inline constexpr std::uint16_t kMachineRiscV = 243;
inline constexpr std::uint32_t kFlagRvc = 0x0001;
inline constexpr std::uint32_t kFlagFloatAbiMask = 0x0006;
inline constexpr std::uint32_t kFlagRve = 0x0008;
inline constexpr std::uint32_t kPtLoad = 1;
// Larger segments are rejected rather than allocated.
inline constexpr std::uint32_t kMaxSegmentSize = 256u << 20;

// Static little-endian ELF32 RISC-V executables. PT_LOAD segments are copied
// with memsz > filesz zero-filled; everything else is ignored.
MemoryImage parse_elf(std::span<const std::uint8_t> bytes);

MemoryImage parse_flat(std::span<const std::uint8_t> bytes, std::uint32_t base, std::uint32_t entry);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// ELF if the file starts with the ELF magic, flat binary otherwise.
MemoryImage load_program(const std::filesystem::path& path, std::uint32_t flat_base = 0, std::uint32_t flat_entry = 0);

}  // namespace lockstep::loader
