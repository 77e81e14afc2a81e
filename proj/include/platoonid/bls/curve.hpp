#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "platoonid/bls/tower.hpp"
#include "platoonid/errors.hpp"
#include "platoonid/hex.hpp"

namespace platoonid::bls {

// Both groups live on y^2 = x^3 + b: b = 4 on E(Fp), b = 4(1+u) on the
// M-twist E'(Fp2).
template <typename F>
struct CurveB;

template <>
struct CurveB<Fp> {
    static const Fp& value() {
        static const Fp b = Fp::from_u64(4);
        return b;
    }
};

template <>
struct CurveB<Fp2> {
    static const Fp2& value() {
        static const Fp2 b = Fp2::from_u64(4, 4);
        return b;
    }
};

template <typename F>
struct Affine {
    F x{};
    F y{};
    bool infinity = true;

    static Affine identity() { return Affine{}; }

    static Affine from_xy(const F& x, const F& y) {
        Affine p;
        p.x = x;
        p.y = y;
        p.infinity = false;
        return p;
    }

    bool on_curve() const {
        if (infinity) return true;
        return y.square() == x.square() * x + CurveB<F>::value();
    }

    Affine negate() const {
        if (infinity) return *this;
        return from_xy(x, -y);
    }

    friend bool operator==(const Affine& a, const Affine& b) {
        if (a.infinity || b.infinity) return a.infinity == b.infinity;
        return a.x == b.x && a.y == b.y;
    }
    friend bool operator!=(const Affine& a, const Affine& b) {
        return !(a == b);
    }
};

template <typename F>
struct Jacobian {
    F x{};
    F y{};
    F z{};  // z == 0 encodes the identity

    static Jacobian identity() {
        Jacobian p;
        p.x = F::one();
        p.y = F::one();
        return p;
    }

    static Jacobian from_affine(const Affine<F>& a) {
        if (a.infinity) return identity();
        Jacobian p;
        p.x = a.x;
        p.y = a.y;
        p.z = F::one();
        return p;
    }

    bool is_identity() const { return z.is_zero(); }

    Affine<F> to_affine() const {
        if (is_identity()) return Affine<F>::identity();
        F zi = z.inv();
        F zi2 = zi.square();
        return Affine<F>::from_xy(x * zi2, y * zi2 * zi);
    }

    Jacobian dbl() const {
        if (is_identity()) return *this;
        F a = x.square();
        F b = y.square();
        F c = b.square();
        F d = ((x + b).square() - a - c).dbl();
        F e = a.dbl() + a;
        Jacobian r;
        r.x = e.square() - d.dbl();
        r.y = e * (d - r.x) - c.dbl().dbl().dbl();
        r.z = (y * z).dbl();
        return r;
    }

    // Mixed addition with an affine point.
    Jacobian add(const Affine<F>& q) const {
        if (q.infinity) return *this;
        if (is_identity()) return from_affine(q);
        F z1z1 = z.square();
        F u2 = q.x * z1z1;
        F s2 = q.y * z * z1z1;
        F h = u2 - x;
        F r = s2 - y;
        if (h.is_zero()) {
            if (r.is_zero()) return dbl();
            return identity();
        }
        F h2 = h.square();
        F h3 = h2 * h;
        F xh2 = x * h2;
        Jacobian out;
        out.x = r.square() - h3 - xh2.dbl();
        out.y = r * (xh2 - out.x) - y * h3;
        out.z = z * h;
        return out;
    }
};

// Variable-time double-and-add over little-endian exponent limbs.
template <typename F>
Affine<F> scalar_mul(const Affine<F>& base, const uint64_t* exp, size_t n_limbs) {
    Jacobian<F> acc = Jacobian<F>::identity();
    bool seen = false;
    for (size_t i = n_limbs; i-- > 0;) {
        for (int bit = 63; bit >= 0; --bit) {
            if (seen) acc = acc.dbl();
            if ((exp[i] >> bit) & 1) {
                acc = acc.add(base);
                seen = true;
            }
        }
    }
    return acc.to_affine();
}

template <typename F>
Affine<F> scalar_mul(const Affine<F>& base, const Fr& k) {
    auto limbs = k.canonical_limbs();
    return scalar_mul(base, limbs.data(), limbs.size());
}

template <typename F>
Affine<F> add(const Affine<F>& a, const Affine<F>& b) {
    return Jacobian<F>::from_affine(a).add(b).to_affine();
}

using G1Affine = Affine<Fp>;
using G2Affine = Affine<Fp2>;

namespace detail {

inline Fp fp_from_hex_unchecked(const char* hex) {
    auto bytes = from_hex(hex);
    return *Fp::from_bytes_be(std::span<const uint8_t>(bytes.data(), bytes.size()));
}

}  // namespace detail

inline const G1Affine& g1_generator() {
    static const G1Affine g = G1Affine::from_xy(
        detail::fp_from_hex_unchecked(
            "17f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac58"
            "6c55e83ff97a1aeffb3af00adb22c6bb"),
        detail::fp_from_hex_unchecked(
            "08b3f481e3aaa0f1a09e30ed741d8ae4fcf5e095d5d00af600db18cb2c04b3ed"
            "d03cc744a2888ae40caa232946c5e7e1"));
    return g;
}

inline const G2Affine& g2_generator() {
    static const G2Affine g = G2Affine::from_xy(
        Fp2(detail::fp_from_hex_unchecked(
                "024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647ae3"
                "d1770bac0326a805bbefd48056c8c121bdb8"),
            detail::fp_from_hex_unchecked(
                "13e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f"
                "5049334cf11213945d57e5ac7d055d042b7e")),
        Fp2(detail::fp_from_hex_unchecked(
                "0ce5d527727d6e118cc9cdc6da2e351aadfd9baa8cbdd3a76d429a695160"
                "d12c923ac9cc3baca289e193548608b82801"),
            detail::fp_from_hex_unchecked(
                "0606c4a02ea734cc32acd2b02bc28b99cb3e287e85a763af267492ab572e"
                "99ab3f370d275cec1da1aaa9075ff05f79be")));
    return g;
}

// Scalar-field order as limbs, for subgroup membership checks.
inline bool in_prime_subgroup(const G1Affine& p) {
    return scalar_mul(p, FrParams::kModulus, 4).infinity;
}
inline bool in_prime_subgroup(const G2Affine& p) {
    return scalar_mul(p, FrParams::kModulus, 4).infinity;
}

// Compressed encodings, 48 bytes for G1 and 96 for G2. Flag bits in the
// top byte: 0x80 always set, 0x40 marks the identity, 0x20 marks the
// lexicographically larger y.
inline std::array<uint8_t, 48> g1_compress(const G1Affine& p) {
    std::array<uint8_t, 48> out{};
    if (p.infinity) {
        out[0] = 0xc0;
        return out;
    }
    auto xb = p.x.to_bytes_be();
    std::copy(xb.begin(), xb.end(), out.begin());
    out[0] |= 0x80;
    if (p.y.is_lex_largest()) out[0] |= 0x20;
    return out;
}

inline std::array<uint8_t, 96> g2_compress(const G2Affine& p) {
    std::array<uint8_t, 96> out{};
    if (p.infinity) {
        out[0] = 0xc0;
        return out;
    }
    auto x1 = p.x.c1.to_bytes_be();
    auto x0 = p.x.c0.to_bytes_be();
    std::copy(x1.begin(), x1.end(), out.begin());
    std::copy(x0.begin(), x0.end(), out.begin() + 48);
    out[0] |= 0x80;
    if (p.y.is_lex_largest()) out[0] |= 0x20;
    return out;
}

namespace detail {

struct Flags {
    bool infinity;
    bool lex_largest;
};

inline Flags strip_flags(std::span<uint8_t> bytes) {
    uint8_t top = bytes[0];
    if ((top & 0x80) == 0) {
        throw MalformedPointError("missing compression flag");
    }
    Flags f{(top & 0x40) != 0, (top & 0x20) != 0};
    bytes[0] = top & 0x1f;
    if (f.infinity) {
        if (f.lex_largest) {
            throw MalformedPointError("conflicting flags on identity encoding");
        }
        for (uint8_t b : bytes) {
            if (b != 0) throw MalformedPointError("nonzero identity encoding");
        }
    }
    return f;
}

template <typename F>
Affine<F> decompress(const F& x, bool lex_largest) {
    auto y2 = x.square() * x + CurveB<F>::value();
    auto y = [&] {
        if constexpr (std::is_same_v<F, Fp>) {
            return fp_sqrt(y2);
        } else {
            return fp2_sqrt(y2);
        }
    }();
    if (!y) throw MalformedPointError("x coordinate is not on the curve");
    F chosen = (y->is_lex_largest() == lex_largest) ? *y : -*y;
    return Affine<F>::from_xy(x, chosen);
}

}  // namespace detail

inline G1Affine g1_decompress(std::span<const uint8_t> in) {
    if (in.size() != 48) throw MalformedPointError("bad G1 encoding length");
    std::array<uint8_t, 48> buf;
    std::copy(in.begin(), in.end(), buf.begin());
    auto flags = detail::strip_flags(std::span<uint8_t>(buf.data(), buf.size()));
    if (flags.infinity) return G1Affine::identity();
    auto x = Fp::from_bytes_be(std::span<const uint8_t>(buf.data(), 48));
    if (!x) throw MalformedPointError("non-canonical x coordinate");
    auto p = detail::decompress(*x, flags.lex_largest);
    if (!in_prime_subgroup(p)) {
        throw MalformedPointError("point outside the prime-order subgroup");
    }
    return p;
}

inline G2Affine g2_decompress(std::span<const uint8_t> in) {
    if (in.size() != 96) throw MalformedPointError("bad G2 encoding length");
    std::array<uint8_t, 96> buf;
    std::copy(in.begin(), in.end(), buf.begin());
    auto flags = detail::strip_flags(std::span<uint8_t>(buf.data(), buf.size()));
    if (flags.infinity) return G2Affine::identity();
    auto xc1 = Fp::from_bytes_be(std::span<const uint8_t>(buf.data(), 48));
    auto xc0 = Fp::from_bytes_be(std::span<const uint8_t>(buf.data() + 48, 48));
    if (!xc0 || !xc1) throw MalformedPointError("non-canonical x coordinate");
    auto p = detail::decompress(Fp2(*xc0, *xc1), flags.lex_largest);
    if (!in_prime_subgroup(p)) {
        throw MalformedPointError("point outside the prime-order subgroup");
    }
    return p;
}

}  // namespace platoonid::bls
