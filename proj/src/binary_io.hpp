#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>

#include "starsketch/common.hpp"

// Little-endian fixed-width integers, independent of host byte order.
namespace starsketch::detail {

template <typename T>
void write_le(std::ostream& out, T value) {
    std::array<char, sizeof(T)> bytes;
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T read_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes;
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw FormatError("unexpected end of file");
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
    return value;
}

inline void write_u32(std::ostream& out, std::uint32_t v) { write_le(out, v); }
inline void write_u64(std::ostream& out, std::uint64_t v) { write_le(out, v); }
inline std::uint32_t read_u32(std::istream& in) { return read_le<std::uint32_t>(in); }
inline std::uint64_t read_u64(std::istream& in) { return read_le<std::uint64_t>(in); }

}  // namespace starsketch::detail
