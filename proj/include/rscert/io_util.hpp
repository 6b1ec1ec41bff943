#pragma once

#include <string>

namespace rscert {

// Write-then-rename; the destination is never left half-written.
void atomic_write_text(const std::string& path, const std::string& content);

// FNV-1a 64-bit digest as lowercase hex.
std::string fnv1a_hex(const std::string& text);

}  // namespace rscert
