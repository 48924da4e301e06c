#pragma once

#include <cstdint>
#include <string>

#include "cbvf/grid.hpp"

namespace cbvf {

// Value-field file layout (all integers little-endian):
//   magic "CBVF" | version u32 | dynamics u8 | kind u8 | axis count u8 |
//   per axis { n u32, lo f64, hi f64, periodic u8 } |
//   metadata block (u32 length + payload) |
//   values f64 row-major | crc32 of the value bytes (u32)
inline constexpr std::uint32_t kFieldFormatVersion = 1;

void save_field(const ValueField& field, const std::string& path);
ValueField load_field(const std::string& path);

std::uint32_t crc32(const void* data, std::size_t len);

}  // namespace cbvf
