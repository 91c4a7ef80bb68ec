#pragma once

// Minimal reader for MATLAB Level-5 MAT files, enough to pull numeric 2-D
// arrays (USC-HAD sensor_readings) out of plain or zlib-compressed elements.
// Little-endian files only.

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "nicbench/errors.hpp"

namespace nicbench::mat5 {

enum : std::uint32_t {
    miINT8 = 1,
    miUINT8 = 2,
    miINT16 = 3,
    miUINT16 = 4,
    miINT32 = 5,
    miUINT32 = 6,
    miSINGLE = 7,
    miDOUBLE = 9,
    miINT64 = 12,
    miUINT64 = 13,
    miMATRIX = 14,
    miCOMPRESSED = 15,
};

// Numeric matrix in MATLAB's column-major layout.
struct Matrix {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // column-major

    double at(std::size_t r, std::size_t c) const { return values[c * rows + r]; }
};

namespace detail {

struct Cursor {
    const std::uint8_t* p;
    std::size_t n;
    std::size_t off = 0;

    std::size_t remaining() const { return n - off; }
    const std::uint8_t* here() const { return p + off; }
    void advance(std::size_t k, const std::string& ctx) {
        if (k > remaining()) throw ingest_error("mat5: truncated element in " + ctx);
        off += k;
    }
};

inline std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return v;
}

struct Element {
    std::uint32_t type;
    const std::uint8_t* data;
    std::size_t size;
};

// Reads one tagged element, handling the packed small-element format and
// 8-byte padding. Compressed elements are stored unpadded.
inline Element next_element(Cursor& c, const std::string& ctx) {
    if (c.remaining() < 8) throw ingest_error("mat5: truncated tag in " + ctx);
    const std::uint32_t first = get_u32(c.here());
    if ((first >> 16) != 0) {  // small element: size in the upper half-word
        if ((first >> 16) > 4) throw ingest_error("mat5: bad small element in " + ctx);
        Element e{first & 0xFFFFu, c.here() + 4, first >> 16};
        c.advance(8, ctx);
        return e;
    }
    const std::uint32_t size = get_u32(c.here() + 4);
    Element e{first, c.here() + 8, size};
    c.advance(8, ctx);
    c.advance(size, ctx);
    if (first != miCOMPRESSED) {
        const std::size_t pad = (8 - (size & 7)) & 7;
        c.advance(std::min(pad, c.remaining()), ctx);
    }
    return e;
}

inline std::size_t type_size(std::uint32_t type) {
    switch (type) {
        case miINT8:
        case miUINT8: return 1;
        case miINT16:
        case miUINT16: return 2;
        case miINT32:
        case miUINT32:
        case miSINGLE: return 4;
        case miDOUBLE:
        case miINT64:
        case miUINT64: return 8;
    }
    return 0;
}

inline bool decode_numeric(const Element& e, std::vector<double>& out) {
    const std::size_t w = type_size(e.type);
    if (w == 0) return false;
    const std::size_t count = e.size / w;
    out.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint8_t* p = e.data + i * w;
        switch (e.type) {
            case miINT8: out[i] = static_cast<double>(static_cast<std::int8_t>(p[0])); break;
            case miUINT8: out[i] = static_cast<double>(p[0]); break;
            case miINT16: {
                std::int16_t v;
                std::memcpy(&v, p, 2);
                out[i] = v;
                break;
            }
            case miUINT16: {
                std::uint16_t v;
                std::memcpy(&v, p, 2);
                out[i] = v;
                break;
            }
            case miINT32: {
                std::int32_t v;
                std::memcpy(&v, p, 4);
                out[i] = v;
                break;
            }
            case miUINT32: {
                std::uint32_t v;
                std::memcpy(&v, p, 4);
                out[i] = v;
                break;
            }
            case miSINGLE: {
                float v;
                std::memcpy(&v, p, 4);
                out[i] = v;
                break;
            }
            case miDOUBLE: {
                double v;
                std::memcpy(&v, p, 8);
                out[i] = v;
                break;
            }
            case miINT64: {
                std::int64_t v;
                std::memcpy(&v, p, 8);
                out[i] = static_cast<double>(v);
                break;
            }
            case miUINT64: {
                std::uint64_t v;
                std::memcpy(&v, p, 8);
                out[i] = static_cast<double>(v);
                break;
            }
        }
    }
    return true;
}

// Parses a miMATRIX payload; returns nothing for non-numeric or >2-D arrays.
inline std::optional<Matrix> parse_matrix(const std::uint8_t* data, std::size_t size,
                                          const std::string& ctx) {
    Cursor c{data, size};
    const Element flags = next_element(c, ctx);
    if (flags.type != miUINT32 || flags.size < 8) throw ingest_error("mat5: bad array flags in " + ctx);
    const std::uint32_t cls = get_u32(flags.data) & 0xFF;
    // Numeric classes mxDOUBLE..mxUINT32 are 6..13.
    if (cls < 6 || cls > 13) return std::nullopt;

    const Element dims = next_element(c, ctx);
    std::vector<double> dim_values;
    if (!decode_numeric(dims, dim_values) || dim_values.size() != 2) return std::nullopt;

    const Element name_el = next_element(c, ctx);
    std::string name(reinterpret_cast<const char*>(name_el.data), name_el.size);

    const Element pr = next_element(c, ctx);
    Matrix m;
    m.name = name;
    m.rows = static_cast<std::size_t>(dim_values[0]);
    m.cols = static_cast<std::size_t>(dim_values[1]);
    if (!decode_numeric(pr, m.values)) return std::nullopt;
    if (m.values.size() != m.rows * m.cols)
        throw ingest_error("mat5: data size does not match dimensions in " + ctx);
    return m;
}

inline std::vector<std::uint8_t> inflate_element(const std::uint8_t* data, std::size_t size,
                                                 const std::string& ctx) {
    std::vector<std::uint8_t> out;
    out.resize(std::max<std::size_t>(size * 4, 1 << 16));
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) throw ingest_error("mat5: zlib init failed for " + ctx);
    zs.next_in = const_cast<Bytef*>(data);
    zs.avail_in = static_cast<uInt>(size);
    std::size_t written = 0;
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        if (written == out.size()) out.resize(out.size() * 2);
        zs.next_out = out.data() + written;
        zs.avail_out = static_cast<uInt>(out.size() - written);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw ingest_error("mat5: corrupt compressed element in " + ctx);
        }
        written = out.size() - zs.avail_out;
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out > 0) {
            inflateEnd(&zs);
            throw ingest_error("mat5: truncated compressed element in " + ctx);
        }
    }
    inflateEnd(&zs);
    out.resize(written);
    return out;
}

}  // namespace detail

// All numeric 2-D matrices in the file, in on-disk order.
inline std::vector<Matrix> read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ingest_error("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                    std::istreambuf_iterator<char>());
    if (bytes.size() < 128) throw ingest_error("mat5: file too short: " + path);
    const std::uint16_t version = static_cast<std::uint16_t>(bytes[124] | (bytes[125] << 8));
    if (version != 0x0100) throw ingest_error("mat5: not a Level-5 MAT file: " + path);
    if (!(bytes[126] == 'I' && bytes[127] == 'M'))
        throw ingest_error("mat5: big-endian MAT files are not supported: " + path);

    std::vector<Matrix> out;
    detail::Cursor c{bytes.data() + 128, bytes.size() - 128};
    while (c.remaining() >= 8) {
        const auto e = detail::next_element(c, path);
        if (e.type == miCOMPRESSED) {
            const auto inflated = detail::inflate_element(e.data, e.size, path);
            detail::Cursor inner{inflated.data(), inflated.size()};
            const auto ie = detail::next_element(inner, path);
            if (ie.type == miMATRIX) {
                if (auto m = detail::parse_matrix(ie.data, ie.size, path)) out.push_back(std::move(*m));
            }
        } else if (e.type == miMATRIX) {
            if (auto m = detail::parse_matrix(e.data, e.size, path)) out.push_back(std::move(*m));
        }
    }
    return out;
}

inline Matrix read_named(const std::string& path, const std::string& name) {
    for (auto& m : read_file(path))
        if (m.name == name) return std::move(m);
    throw ingest_error("mat5: variable '" + name + "' not found in " + path);
}

}  // namespace nicbench::mat5
