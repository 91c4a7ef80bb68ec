#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nicbench::io {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swaps");

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
inline void write_pod(std::ostream& os, T v) {
    write_bytes(os, &v, sizeof(T));
}

inline void write_string(std::ostream& os, const std::string& s) {
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    write_bytes(os, s.data(), s.size());
}

inline void read_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw std::runtime_error("unexpected end of file");
}

template <typename T>
inline T read_pod(std::istream& is) {
    T v;
    read_bytes(is, &v, sizeof(T));
    return v;
}

inline std::string read_string(std::istream& is) {
    const auto n = read_pod<std::uint32_t>(is);
    if (n > (1u << 24)) throw std::runtime_error("string length implausibly large");
    std::string s(n, '\0');
    read_bytes(is, s.data(), n);
    return s;
}

// FNV-1a, used for model-spec hashes in checkpoint headers.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace nicbench::io
