#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "platoonid/sha256.hpp"

namespace platoonid {

struct RandomSource {
    virtual ~RandomSource() = default;
    virtual void fill(uint8_t* out, size_t n) = 0;

    std::vector<uint8_t> bytes(size_t n) {
        std::vector<uint8_t> out(n);
        fill(out.data(), out.size());
        return out;
    }

    uint64_t next_u64() {
        uint8_t buf[8];
        fill(buf, 8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | buf[i];
        return v;
    }

    // [lo, hi] inclusive. Modulo mapping; the residual bias over a 64-bit
    // draw is irrelevant for simulation sampling and keeps draws cheap.
    uint64_t uniform(uint64_t lo, uint64_t hi) {
        if (hi <= lo) return lo;
        return lo + next_u64() % (hi - lo + 1);
    }

    // True with probability p, consuming exactly one 64-bit draw.
    bool bernoulli(double p) {
        if (p <= 0.0) {
            next_u64();
            return false;
        }
        if (p >= 1.0) {
            next_u64();
            return true;
        }
        constexpr double kScale = 9007199254740992.0;  // 2^53
        double u = static_cast<double>(next_u64() >> 11) / kScale;
        return u < p;
    }
};

// Deterministic SHA-256 counter-mode stream:
//   key   = SHA256("platoonid-drbg-v1" || seed)
//   block = SHA256(key || big-endian-64(counter))
// Mirrored bit-for-bit by the Python reference implementation.
class Sha256Drbg final : public RandomSource {
public:
    explicit Sha256Drbg(std::span<const uint8_t> seed) {
        constexpr std::string_view tag = "platoonid-drbg-v1";
        std::vector<uint8_t> pre(tag.begin(), tag.end());
        pre.insert(pre.end(), seed.begin(), seed.end());
        key_ = sha256(std::span<const uint8_t>(pre.data(), pre.size()));
    }

    explicit Sha256Drbg(uint64_t seed) : Sha256Drbg(be64(seed)) {}

    Sha256Drbg(uint64_t seed, std::string_view stream_label)
        : Sha256Drbg(labeled(seed, stream_label)) {}

    void fill(uint8_t* out, size_t n) override {
        while (n > 0) {
            if (avail_ == 0) {
                uint8_t block[40];
                std::memcpy(block, key_.data(), 32);
                uint64_t c = counter_++;
                for (int i = 0; i < 8; ++i) {
                    block[32 + i] = static_cast<uint8_t>(c >> (56 - 8 * i));
                }
                buf_ = sha256(std::span<const uint8_t>(block, 40));
                avail_ = 32;
            }
            size_t take = std::min(n, avail_);
            std::memcpy(out, buf_.data() + (32 - avail_), take);
            out += take;
            n -= take;
            avail_ -= take;
        }
    }

private:
    static std::vector<uint8_t> be64(uint64_t seed) {
        std::vector<uint8_t> b(8);
        for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(seed >> (56 - 8 * i));
        return b;
    }

    static std::vector<uint8_t> labeled(uint64_t seed, std::string_view label) {
        std::vector<uint8_t> s = be64(seed);
        s.insert(s.end(), label.begin(), label.end());
        return s;
    }

    explicit Sha256Drbg(const std::vector<uint8_t>& seed)
        : Sha256Drbg(std::span<const uint8_t>(seed.data(), seed.size())) {}

    Digest32 key_{};
    Digest32 buf_{};
    size_t avail_ = 0;
    uint64_t counter_ = 0;
};

class SystemRandomSource final : public RandomSource {
public:
    void fill(uint8_t* out, size_t n) override {
        for (size_t i = 0; i < n; ++i) {
            out[i] = static_cast<uint8_t>(dev_());
        }
    }

private:
    std::random_device dev_;
};

}  // namespace platoonid
