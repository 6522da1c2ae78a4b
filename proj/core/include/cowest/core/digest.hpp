#pragma once

#include <string>
#include <string_view>

namespace cowest {

// Lowercase hex SHA-256 (64 chars).
std::string sha256_hex(std::string_view bytes);

}  // namespace cowest
