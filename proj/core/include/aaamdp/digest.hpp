#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace aaamdp {

// FNV-1a over the byte sequence.
std::uint64_t fnv1a64(std::string_view bytes);

// "fnv1a64:" followed by 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

// Digest of a file's raw content. Throws std::runtime_error if unreadable.
std::string digest_file(const std::filesystem::path& path);

}  // namespace aaamdp
