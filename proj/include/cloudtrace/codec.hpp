#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cloudtrace::codec {

/// Strict RFC 4648 decode; ASCII whitespace is ignored, anything else invalid yields nullopt.
std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);
std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Content hash used for cross-device matching.
inline constexpr std::string_view kHashAlgorithm = "sha256";
std::string sha256_hex(std::span<const std::uint8_t> bytes);

}  // namespace cloudtrace::codec
