#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lockstep/wire.hpp"

namespace wiregen {

lockstep::wire::Message random_message(std::mt19937& rng);

struct BadFrame {
  std::string name;
  std::vector<std::uint8_t> bytes;
};

// Frames that must be refused. All are length-consistent so a server can
// skip them and keep going; see oversize_frame() for the one it cannot.
std::vector<BadFrame> malformed_corpus();
// Header announcing more than kMaxFrame bytes.
std::vector<std::uint8_t> oversize_frame();

}  // namespace wiregen
