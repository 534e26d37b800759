#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "nlem/errors.hpp"
#include "nlem/image.hpp"

namespace nlem {

// Quantization used on PGM export: clamp to [0,255], round half away from zero.
inline std::uint8_t quantize_u8(double v) {
    const double clamped = std::clamp(v, 0.0, 255.0);
    return static_cast<std::uint8_t>(std::lround(clamped));
}

namespace detail {

inline bool is_pgm_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Skips whitespace and '#' comments (which run to end of line).
inline void skip_pgm_space(const std::string& bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        if (is_pgm_space(bytes[pos])) {
            ++pos;
        } else if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n')
                ++pos;
        } else {
            return;
        }
    }
}

inline long parse_pgm_int(const std::string& bytes, std::size_t& pos, const char* what) {
    skip_pgm_space(bytes, pos);
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos])))
        throw format_error(std::string("pgm: expected ") + what, pos);
    long value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
        value = value * 10 + (bytes[pos] - '0');
        if (value > 1000000)
            throw format_error(std::string("pgm: ") + what + " out of range", pos);
        ++pos;
    }
    return value;
}

} // namespace detail

// Reads a binary (P5) or ASCII (P2) PGM file with maxval <= 255.
// Samples map to intensities 0..255 exactly; no maxval rescaling is applied.
inline Image read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open for reading: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw io_error("read failure: " + path);

    std::size_t pos = 0;
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
        throw format_error("pgm: bad magic, expected P2 or P5", 0);
    const bool binary = bytes[1] == '5';
    pos = 2;

    const long width = detail::parse_pgm_int(bytes, pos, "width");
    const long height = detail::parse_pgm_int(bytes, pos, "height");
    if (width < 1 || height < 1)
        throw format_error("pgm: dimensions must be positive", pos);
    detail::skip_pgm_space(bytes, pos);
    const std::size_t maxval_at = pos;
    const long maxval = detail::parse_pgm_int(bytes, pos, "maxval");
    if (maxval < 1)
        throw format_error("pgm: maxval must be positive", maxval_at);
    if (maxval > 255)
        throw format_error("pgm: maxval above 255 is unsupported", maxval_at);

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<double> data(count);

    if (binary) {
        if (pos >= bytes.size() || !detail::is_pgm_space(bytes[pos]))
            throw format_error("pgm: expected single whitespace before pixel data", pos);
        ++pos;
        if (bytes.size() - pos < count)
            throw format_error("pgm: truncated pixel data", bytes.size());
        for (std::size_t n = 0; n < count; ++n)
            data[n] = static_cast<double>(static_cast<std::uint8_t>(bytes[pos + n]));
    } else {
        for (std::size_t n = 0; n < count; ++n) {
            const std::size_t sample_at = pos;
            const long v = detail::parse_pgm_int(bytes, pos, "pixel sample");
            if (v > 255)
                throw format_error("pgm: sample above 255", sample_at);
            data[n] = static_cast<double>(v);
        }
    }
    return Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

// Writes img as binary P5 with maxval 255, quantizing via quantize_u8.
inline void write_pgm(const Image& img, const std::string& path) {
    if (img.empty())
        throw invalid_input("cannot write an empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open for writing: " + path);
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<char> row_bytes(img.pixel_count());
    const std::vector<double>& data = img.data();
    for (std::size_t n = 0; n < data.size(); ++n)
        row_bytes[n] = static_cast<char>(quantize_u8(data[n]));
    out.write(row_bytes.data(), static_cast<std::streamsize>(row_bytes.size()));
    if (!out)
        throw io_error("write failure: " + path);
}

} // namespace nlem
