#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>

namespace platoonid::bls {

// BLS12-381 base field, p = 0x1a0111ea...ffffaaab (381 bits).
struct FpParams {
    static constexpr size_t kLimbs = 6;
    static constexpr uint64_t kModulus[6] = {
        0xb9feffffffffaaabull, 0x1eabfffeb153ffffull, 0x6730d2a0f6b0f624ull,
        0x64774b84f38512bfull, 0x4b1ba7b6434bacd7ull, 0x1a0111ea397fe69aull};
    // R = 2^384 mod p, R2 = R^2 mod p, kMontInv = -p^(-1) mod 2^64.
    static constexpr uint64_t kR[6] = {
        0x760900000002fffdull, 0xebf4000bc40c0002ull, 0x5f48985753c758baull,
        0x77ce585370525745ull, 0x5c071a97a256ec6dull, 0x15f65ec3fa80e493ull};
    static constexpr uint64_t kR2[6] = {
        0xf4df1f341c341746ull, 0x0a76e6a609d104f1ull, 0x8de5476c4c95b6d5ull,
        0x67eb88a9939d83c0ull, 0x9a793e85b519952dull, 0x11988fe592cae3aaull};
    static constexpr uint64_t kMontInv = 0x89f3fffcfffcfffdull;
    static constexpr uint64_t kModulusMinus2[6] = {
        0xb9feffffffffaaa9ull, 0x1eabfffeb153ffffull, 0x6730d2a0f6b0f624ull,
        0x64774b84f38512bfull, 0x4b1ba7b6434bacd7ull, 0x1a0111ea397fe69aull};
};

// Scalar field, r = 0x73eda753...00000001 (255 bits), the order of G1/G2/GT.
struct FrParams {
    static constexpr size_t kLimbs = 4;
    static constexpr uint64_t kModulus[4] = {
        0xffffffff00000001ull, 0x53bda402fffe5bfeull,
        0x3339d80809a1d805ull, 0x73eda753299d7d48ull};
    static constexpr uint64_t kR[4] = {
        0x00000001fffffffeull, 0x5884b7fa00034802ull,
        0x998c4fefecbc4ff5ull, 0x1824b159acc5056full};
    static constexpr uint64_t kR2[4] = {
        0xc999e990f3f29c6dull, 0x2b6cedcb87925c23ull,
        0x05d314967254398full, 0x0748d9d99f59ff11ull};
    static constexpr uint64_t kMontInv = 0xfffffffeffffffffull;
    static constexpr uint64_t kModulusMinus2[4] = {
        0xfffffffeffffffffull, 0x53bda402fffe5bfeull,
        0x3339d80809a1d805ull, 0x73eda753299d7d48ull};
};

// Prime field element in Montgomery form. All stored values are reduced;
// every constructor and operation preserves that invariant.
template <typename Params>
class MontField {
public:
    static constexpr size_t N = Params::kLimbs;

    constexpr MontField() : w_{} {}

    static MontField zero() { return MontField(); }

    static MontField one() {
        MontField r;
        std::memcpy(r.w_, Params::kR, sizeof r.w_);
        return r;
    }

    static MontField from_u64(uint64_t v) {
        MontField raw;
        raw.w_[0] = v;
        return to_mont(raw);
    }

    // Little-endian limbs of a canonical (already reduced) integer.
    static MontField from_canonical_limbs(const uint64_t* limbs) {
        MontField raw;
        std::memcpy(raw.w_, limbs, sizeof raw.w_);
        return to_mont(raw);
    }

    // Big-endian bytes; fails unless the value is canonical (< modulus).
    static std::optional<MontField> from_bytes_be(std::span<const uint8_t> bytes) {
        if (bytes.size() != 8 * N) return std::nullopt;
        MontField raw;
        for (size_t i = 0; i < N; ++i) {
            uint64_t limb = 0;
            for (size_t j = 0; j < 8; ++j) {
                limb = limb << 8 | bytes[8 * (N - 1 - i) + j];
            }
            raw.w_[i] = limb;
        }
        if (!limbs_less_than_modulus(raw.w_)) return std::nullopt;
        return to_mont(raw);
    }

    std::array<uint64_t, N> canonical_limbs() const {
        MontField plain = from_mont(*this);
        std::array<uint64_t, N> out;
        std::memcpy(out.data(), plain.w_, sizeof plain.w_);
        return out;
    }

    std::array<uint8_t, 8 * N> to_bytes_be() const {
        auto limbs = canonical_limbs();
        std::array<uint8_t, 8 * N> out;
        for (size_t i = 0; i < N; ++i) {
            for (size_t j = 0; j < 8; ++j) {
                out[8 * (N - 1 - i) + j] =
                    static_cast<uint8_t>(limbs[i] >> (56 - 8 * j));
            }
        }
        return out;
    }

    bool is_zero() const {
        uint64_t acc = 0;
        for (size_t i = 0; i < N; ++i) acc |= w_[i];
        return acc == 0;
    }

    friend bool operator==(const MontField& a, const MontField& b) {
        return std::memcmp(a.w_, b.w_, sizeof a.w_) == 0;
    }
    friend bool operator!=(const MontField& a, const MontField& b) {
        return !(a == b);
    }

    friend MontField operator+(const MontField& a, const MontField& b) {
        MontField r;
        uint64_t carry = 0;
        for (size_t i = 0; i < N; ++i) {
            unsigned __int128 s =
                static_cast<unsigned __int128>(a.w_[i]) + b.w_[i] + carry;
            r.w_[i] = static_cast<uint64_t>(s);
            carry = static_cast<uint64_t>(s >> 64);
        }
        r.reduce_once(carry);
        return r;
    }

    friend MontField operator-(const MontField& a, const MontField& b) {
        MontField r;
        uint64_t borrow = 0;
        for (size_t i = 0; i < N; ++i) {
            unsigned __int128 d = static_cast<unsigned __int128>(a.w_[i]) -
                                  b.w_[i] - borrow;
            r.w_[i] = static_cast<uint64_t>(d);
            borrow = static_cast<uint64_t>(d >> 64) & 1;
        }
        if (borrow) {
            uint64_t carry = 0;
            for (size_t i = 0; i < N; ++i) {
                unsigned __int128 s = static_cast<unsigned __int128>(r.w_[i]) +
                                      Params::kModulus[i] + carry;
                r.w_[i] = static_cast<uint64_t>(s);
                carry = static_cast<uint64_t>(s >> 64);
            }
        }
        return r;
    }

    MontField operator-() const { return zero() - *this; }

    friend MontField operator*(const MontField& a, const MontField& b) {
        MontField r;
        mont_mul(r.w_, a.w_, b.w_);
        return r;
    }

    MontField square() const { return *this * *this; }

    MontField dbl() const { return *this + *this; }

    // Square-and-multiply over little-endian exponent limbs.
    MontField pow_limbs(const uint64_t* exp, size_t n_limbs) const {
        MontField acc = one();
        bool seen = false;
        for (size_t i = n_limbs; i-- > 0;) {
            for (int bit = 63; bit >= 0; --bit) {
                if (seen) acc = acc.square();
                if ((exp[i] >> bit) & 1) {
                    acc = acc * *this;
                    seen = true;
                }
            }
        }
        return acc;
    }

    // Fermat inversion; maps zero to zero.
    MontField inv() const {
        return pow_limbs(Params::kModulusMinus2, N);
    }

    // Canonical-integer comparison: -1, 0, or 1.
    static int cmp(const MontField& a, const MontField& b) {
        auto la = a.canonical_limbs();
        auto lb = b.canonical_limbs();
        for (size_t i = N; i-- > 0;) {
            if (la[i] != lb[i]) return la[i] < lb[i] ? -1 : 1;
        }
        return 0;
    }

    // True when the canonical value exceeds (modulus - 1) / 2, i.e. the
    // element is the lexicographically larger of {x, -x}.
    bool is_lex_largest() const {
        if (is_zero()) return false;
        return cmp(*this, -*this) > 0;
    }

private:
    uint64_t w_[N];

    static bool limbs_less_than_modulus(const uint64_t* v) {
        for (size_t i = N; i-- > 0;) {
            if (v[i] != Params::kModulus[i]) return v[i] < Params::kModulus[i];
        }
        return false;
    }

    // Conditional subtraction restoring the reduced invariant after add.
    void reduce_once(uint64_t carry) {
        if (carry == 0 && limbs_less_than_modulus(w_)) return;
        uint64_t borrow = 0;
        for (size_t i = 0; i < N; ++i) {
            unsigned __int128 d = static_cast<unsigned __int128>(w_[i]) -
                                  Params::kModulus[i] - borrow;
            w_[i] = static_cast<uint64_t>(d);
            borrow = static_cast<uint64_t>(d >> 64) & 1;
        }
    }

    // CIOS Montgomery multiplication: out = a * b * 2^(-64N) mod modulus.
    static void mont_mul(uint64_t* out, const uint64_t* a, const uint64_t* b) {
        uint64_t t[N + 2] = {};
        for (size_t i = 0; i < N; ++i) {
            uint64_t carry = 0;
            for (size_t j = 0; j < N; ++j) {
                unsigned __int128 cur =
                    static_cast<unsigned __int128>(a[i]) * b[j] + t[j] + carry;
                t[j] = static_cast<uint64_t>(cur);
                carry = static_cast<uint64_t>(cur >> 64);
            }
            unsigned __int128 sum =
                static_cast<unsigned __int128>(t[N]) + carry;
            t[N] = static_cast<uint64_t>(sum);
            t[N + 1] = static_cast<uint64_t>(sum >> 64);

            uint64_t m = t[0] * Params::kMontInv;
            unsigned __int128 cur =
                static_cast<unsigned __int128>(m) * Params::kModulus[0] + t[0];
            carry = static_cast<uint64_t>(cur >> 64);
            for (size_t j = 1; j < N; ++j) {
                cur = static_cast<unsigned __int128>(m) * Params::kModulus[j] +
                      t[j] + carry;
                t[j - 1] = static_cast<uint64_t>(cur);
                carry = static_cast<uint64_t>(cur >> 64);
            }
            sum = static_cast<unsigned __int128>(t[N]) + carry;
            t[N - 1] = static_cast<uint64_t>(sum);
            t[N] = t[N + 1] + static_cast<uint64_t>(sum >> 64);
            t[N + 1] = 0;
        }
        if (t[N] != 0 || !limbs_less_than_modulus(t)) {
            uint64_t borrow = 0;
            for (size_t i = 0; i < N; ++i) {
                unsigned __int128 d = static_cast<unsigned __int128>(t[i]) -
                                      Params::kModulus[i] - borrow;
                t[i] = static_cast<uint64_t>(d);
                borrow = static_cast<uint64_t>(d >> 64) & 1;
            }
        }
        std::memcpy(out, t, N * sizeof(uint64_t));
    }

    static MontField to_mont(const MontField& raw) {
        MontField r2;
        std::memcpy(r2.w_, Params::kR2, sizeof r2.w_);
        MontField r;
        mont_mul(r.w_, raw.w_, r2.w_);
        return r;
    }

    static MontField from_mont(const MontField& m) {
        uint64_t one_raw[N] = {1};
        MontField r;
        mont_mul(r.w_, m.w_, one_raw);
        return r;
    }
};

using Fp = MontField<FpParams>;
using Fr = MontField<FrParams>;

// Square root in Fp via the (p + 1) / 4 exponent (p = 3 mod 4); empty when
// the input is a non-residue.
inline std::optional<Fp> fp_sqrt(const Fp& a) {
    static constexpr uint64_t kExp[6] = {
        0xee7fbfffffffeaabull, 0x07aaffffac54ffffull, 0xd9cc34a83dac3d89ull,
        0xd91dd2e13ce144afull, 0x92c6e9ed90d2eb35ull, 0x0680447a8e5ff9a6ull};
    Fp s = a.pow_limbs(kExp, 6);
    if (s.square() != a) return std::nullopt;
    return s;
}

}  // namespace platoonid::bls
