#include "lockstep/loader.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "lockstep/error.hpp"

namespace lockstep::loader {

std::string_view to_string(LoadErrorKind kind) {
  switch (kind) {
    case LoadErrorKind::NotElf: return "NotElf";
    case LoadErrorKind::UnsupportedClass: return "UnsupportedClass";
    case LoadErrorKind::UnsupportedMachine: return "UnsupportedMachine";
    case LoadErrorKind::UnsupportedFlags: return "UnsupportedFlags";
    case LoadErrorKind::MalformedHeader: return "MalformedHeader";
    case LoadErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {

constexpr std::size_t kEhdrSize = 52;
constexpr std::size_t kPhdrSize = 32;

std::uint16_t le16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

std::uint32_t le32(std::span<const std::uint8_t> b, std::size_t off) {
  return std::uint32_t{b[off]} | (std::uint32_t{b[off + 1]} << 8) | (std::uint32_t{b[off + 2]} << 16) |
         (std::uint32_t{b[off + 3]} << 24);
}

[[noreturn]] void fail(LoadErrorKind kind, const std::string& detail) { throw LoadError(kind, detail); }

}  // namespace

MemoryImage parse_elf(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "\x7f" "ELF", 4) != 0) fail(LoadErrorKind::NotElf, "bad magic");
  if (bytes.size() < 16) fail(LoadErrorKind::MalformedHeader, "truncated identification");
  if (bytes[4] != 1) fail(LoadErrorKind::UnsupportedClass, "only ELFCLASS32 is supported");
  if (bytes[5] != 1) fail(LoadErrorKind::UnsupportedClass, "only little-endian ELF is supported");
  if (bytes.size() < kEhdrSize) fail(LoadErrorKind::MalformedHeader, "truncated ELF header");

  const std::uint16_t machine = le16(bytes, 18);
  if (machine != kMachineRiscV) fail(LoadErrorKind::UnsupportedMachine, "e_machine=" + std::to_string(machine));

  const std::uint32_t flags = le32(bytes, 36);
  if (flags & kFlagRvc) fail(LoadErrorKind::UnsupportedFlags, "compressed (C) code is not supported");
  if (flags & kFlagFloatAbiMask) fail(LoadErrorKind::UnsupportedFlags, "floating-point ABI is not supported");
  if (flags & kFlagRve) fail(LoadErrorKind::UnsupportedFlags, "RV32E is not supported");

  const std::uint32_t entry = le32(bytes, 24);
  const std::uint32_t phoff = le32(bytes, 28);
  const std::uint16_t phentsize = le16(bytes, 42);
  const std::uint16_t phnum = le16(bytes, 44);
  if (entry & 3) fail(LoadErrorKind::MalformedHeader, "entry point is not 4-byte aligned");
  if (phnum != 0 && phentsize < kPhdrSize) fail(LoadErrorKind::MalformedHeader, "program header entries too small");
  if (std::uint64_t{phoff} + std::uint64_t{phnum} * phentsize > bytes.size()) {
    fail(LoadErrorKind::MalformedHeader, "program header table runs past end of file");
  }

  MemoryImage image;
  image.entry = entry;
  for (std::uint16_t i = 0; i < phnum; ++i) {
    const std::size_t ph = phoff + std::size_t{i} * phentsize;
    if (le32(bytes, ph) != kPtLoad) continue;
    const std::uint32_t offset = le32(bytes, ph + 4);
    const std::uint32_t vaddr = le32(bytes, ph + 8);
    const std::uint32_t filesz = le32(bytes, ph + 16);
    const std::uint32_t memsz = le32(bytes, ph + 20);
    if (memsz > kMaxSegmentSize) fail(LoadErrorKind::MalformedHeader, "segment larger than 256 MiB");
    if (filesz > memsz) fail(LoadErrorKind::MalformedHeader, "segment filesz exceeds memsz");
    if (std::uint64_t{offset} + filesz > bytes.size()) {
      fail(LoadErrorKind::MalformedHeader, "segment data runs past end of file");
    }
    if (std::uint64_t{vaddr} + memsz > (std::uint64_t{1} << 32)) {
      fail(LoadErrorKind::MalformedHeader, "segment wraps past the 32-bit address space");
    }
    if (memsz == 0) continue;
    Segment seg;
    seg.base = vaddr;
    seg.bytes.assign(bytes.begin() + offset, bytes.begin() + offset + filesz);
    seg.bytes.resize(memsz, 0);
    image.segments.push_back(std::move(seg));
  }
  try {
    check_disjoint(image);
  } catch (const SimError& e) {
    fail(LoadErrorKind::MalformedHeader, e.detail());
  }
  return image;
}

MemoryImage parse_flat(std::span<const std::uint8_t> bytes, std::uint32_t base, std::uint32_t entry) {
  MemoryImage image;
  image.entry = entry;
  image.segments.push_back(Segment{base, std::vector<std::uint8_t>(bytes.begin(), bytes.end())});
  return image;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(LoadErrorKind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

MemoryImage load_program(const std::filesystem::path& path, std::uint32_t flat_base, std::uint32_t flat_entry) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "\x7f" "ELF", 4) == 0) return parse_elf(bytes);
  return parse_flat(bytes, flat_base, flat_entry);
}

}  // namespace lockstep::loader
