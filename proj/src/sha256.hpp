#pragma once

#include <cstdint>
#include <string>

namespace rankhc {

// SHA-256 of a byte string, hex-encoded. Used for null-table checksums.
std::string sha256_hex(const std::string& data);

}  // namespace rankhc
