#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "platoonid/errors.hpp"

namespace platoonid {

inline std::string to_hex(const uint8_t* data, size_t n) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * n);
    for (size_t i = 0; i < n; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0x0f]);
    }
    return out;
}

template <typename Container>
std::string to_hex(const Container& bytes) {
    return to_hex(bytes.data(), bytes.size());
}

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline std::vector<uint8_t> from_hex(std::string_view text) {
    if (text.size() % 2 != 0) {
        throw EncodingError("hex string has odd length");
    }
    std::vector<uint8_t> out(text.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        int hi = hex_nibble(text[2 * i]);
        int lo = hex_nibble(text[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            throw EncodingError("invalid hex character");
        }
        out[i] = static_cast<uint8_t>(hi << 4 | lo);
    }
    return out;
}

}  // namespace platoonid
