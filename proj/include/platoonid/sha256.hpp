#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace platoonid {

using Digest32 = std::array<uint8_t, 32>;

inline Digest32 sha256(std::span<const uint8_t> data) {
    Digest32 out{};
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr ||
        EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != 32) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    return out;
}

inline Digest32 sha256(std::string_view text) {
    return sha256(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

// Digest of the concatenation of several byte spans.
inline Digest32 sha256_concat(std::initializer_list<std::span<const uint8_t>> parts) {
    std::vector<uint8_t> buf;
    for (const auto& part : parts) {
        buf.insert(buf.end(), part.begin(), part.end());
    }
    return sha256(std::span<const uint8_t>(buf.data(), buf.size()));
}

}  // namespace platoonid
