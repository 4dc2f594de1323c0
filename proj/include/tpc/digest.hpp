#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "tpc/bytes.hpp"

namespace tpc {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(ByteView data);
inline Sha256Digest sha256(std::string_view text) {
  return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace tpc
