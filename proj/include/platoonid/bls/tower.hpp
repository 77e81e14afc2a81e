#pragma once

#include <optional>

#include "platoonid/bls/fp.hpp"

namespace platoonid::bls {

// Fp2 = Fp[u] / (u^2 + 1).
struct Fp2 {
    Fp c0, c1;

    constexpr Fp2() = default;
    Fp2(const Fp& a, const Fp& b) : c0(a), c1(b) {}

    static Fp2 zero() { return Fp2(); }
    static Fp2 one() { return Fp2(Fp::one(), Fp::zero()); }
    static Fp2 from_u64(uint64_t a, uint64_t b) {
        return Fp2(Fp::from_u64(a), Fp::from_u64(b));
    }

    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }

    friend bool operator==(const Fp2& a, const Fp2& b) {
        return a.c0 == b.c0 && a.c1 == b.c1;
    }
    friend bool operator!=(const Fp2& a, const Fp2& b) { return !(a == b); }

    friend Fp2 operator+(const Fp2& a, const Fp2& b) {
        return Fp2(a.c0 + b.c0, a.c1 + b.c1);
    }
    friend Fp2 operator-(const Fp2& a, const Fp2& b) {
        return Fp2(a.c0 - b.c0, a.c1 - b.c1);
    }
    Fp2 operator-() const { return Fp2(-c0, -c1); }

    friend Fp2 operator*(const Fp2& a, const Fp2& b) {
        // Karatsuba over the quadratic extension.
        Fp t0 = a.c0 * b.c0;
        Fp t1 = a.c1 * b.c1;
        Fp mixed = (a.c0 + a.c1) * (b.c0 + b.c1);
        return Fp2(t0 - t1, mixed - t0 - t1);
    }

    Fp2 square() const {
        Fp t0 = (c0 + c1) * (c0 - c1);
        Fp t1 = c0 * c1;
        return Fp2(t0, t1.dbl());
    }

    Fp2 dbl() const { return Fp2(c0.dbl(), c1.dbl()); }

    Fp2 scale(const Fp& k) const { return Fp2(c0 * k, c1 * k); }

    Fp2 conjugate() const { return Fp2(c0, -c1); }

    // Multiplication by the sextic nonresidue xi = 1 + u.
    Fp2 mul_by_xi() const { return Fp2(c0 - c1, c0 + c1); }

    Fp2 inv() const {
        Fp norm_inv = (c0.square() + c1.square()).inv();
        return Fp2(c0 * norm_inv, -(c1 * norm_inv));
    }

    // Lexicographic sort key for compression: compare (c1, c0) against the
    // negation's key.
    bool is_lex_largest() const {
        if (!c1.is_zero()) return c1.is_lex_largest();
        return c0.is_lex_largest();
    }
};

// Square root in Fp2 via the norm map; empty for non-residues.
inline std::optional<Fp2> fp2_sqrt(const Fp2& a) {
    if (a.is_zero()) return Fp2::zero();
    if (a.c1.is_zero()) {
        if (auto s = fp_sqrt(a.c0)) return Fp2(*s, Fp::zero());
        auto s = fp_sqrt(-a.c0);
        if (!s) return std::nullopt;  // unreachable: -1 is a QR in Fp2 split
        return Fp2(Fp::zero(), *s);
    }
    Fp norm = a.c0.square() + a.c1.square();
    auto lambda = fp_sqrt(norm);
    if (!lambda) return std::nullopt;
    Fp half = Fp::from_u64(2).inv();
    auto x0 = fp_sqrt((a.c0 + *lambda) * half);
    if (!x0) {
        x0 = fp_sqrt((a.c0 - *lambda) * half);
        if (!x0) return std::nullopt;
    }
    Fp x1 = a.c1 * (x0->dbl()).inv();
    Fp2 cand(*x0, x1);
    if (cand.square() != a) return std::nullopt;
    return cand;
}

// Fp6 = Fp2[v] / (v^3 - xi).
struct Fp6 {
    Fp2 c0, c1, c2;

    constexpr Fp6() = default;
    Fp6(const Fp2& a, const Fp2& b, const Fp2& c) : c0(a), c1(b), c2(c) {}

    static Fp6 zero() { return Fp6(); }
    static Fp6 one() { return Fp6(Fp2::one(), Fp2::zero(), Fp2::zero()); }

    bool is_zero() const {
        return c0.is_zero() && c1.is_zero() && c2.is_zero();
    }

    friend bool operator==(const Fp6& a, const Fp6& b) {
        return a.c0 == b.c0 && a.c1 == b.c1 && a.c2 == b.c2;
    }
    friend bool operator!=(const Fp6& a, const Fp6& b) { return !(a == b); }

    friend Fp6 operator+(const Fp6& a, const Fp6& b) {
        return Fp6(a.c0 + b.c0, a.c1 + b.c1, a.c2 + b.c2);
    }
    friend Fp6 operator-(const Fp6& a, const Fp6& b) {
        return Fp6(a.c0 - b.c0, a.c1 - b.c1, a.c2 - b.c2);
    }
    Fp6 operator-() const { return Fp6(-c0, -c1, -c2); }

    friend Fp6 operator*(const Fp6& a, const Fp6& b) {
        Fp2 d0 = a.c0 * b.c0 + (a.c1 * b.c2 + a.c2 * b.c1).mul_by_xi();
        Fp2 d1 = a.c0 * b.c1 + a.c1 * b.c0 + (a.c2 * b.c2).mul_by_xi();
        Fp2 d2 = a.c0 * b.c2 + a.c1 * b.c1 + a.c2 * b.c0;
        return Fp6(d0, d1, d2);
    }

    Fp6 square() const { return *this * *this; }

    // Multiplication by v (the cubic generator).
    Fp6 mul_by_v() const { return Fp6(c2.mul_by_xi(), c0, c1); }

    Fp6 inv() const {
        Fp2 t0 = c0.square() - (c1 * c2).mul_by_xi();
        Fp2 t1 = c2.square().mul_by_xi() - c0 * c1;
        Fp2 t2 = c1.square() - c0 * c2;
        Fp2 d = (c0 * t0 + (c2 * t1 + c1 * t2).mul_by_xi()).inv();
        return Fp6(t0 * d, t1 * d, t2 * d);
    }
};

// Fp12 = Fp6[w] / (w^2 - v). Basis slots by power of w:
//   w^0 = c0.c0, w^2 = c0.c1, w^4 = c0.c2,
//   w^1 = c1.c0, w^3 = c1.c1, w^5 = c1.c2.
struct Fp12 {
    Fp6 c0, c1;

    constexpr Fp12() = default;
    Fp12(const Fp6& a, const Fp6& b) : c0(a), c1(b) {}

    static Fp12 zero() { return Fp12(); }
    static Fp12 one() { return Fp12(Fp6::one(), Fp6::zero()); }

    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    bool is_one() const { return *this == one(); }

    friend bool operator==(const Fp12& a, const Fp12& b) {
        return a.c0 == b.c0 && a.c1 == b.c1;
    }
    friend bool operator!=(const Fp12& a, const Fp12& b) { return !(a == b); }

    friend Fp12 operator*(const Fp12& a, const Fp12& b) {
        Fp6 t0 = a.c0 * b.c0;
        Fp6 t1 = a.c1 * b.c1;
        Fp6 mixed = (a.c0 + a.c1) * (b.c0 + b.c1);
        return Fp12(t0 + t1.mul_by_v(), mixed - t0 - t1);
    }

    Fp12 square() const { return *this * *this; }

    // Conjugation over Fp6, which equals the p^6 Frobenius here.
    Fp12 conjugate() const { return Fp12(c0, -c1); }

    Fp12 inv() const {
        Fp6 d = (c0.square() - c1.square().mul_by_v()).inv();
        return Fp12(c0 * d, -(c1 * d));
    }

    Fp12 pow_limbs(const uint64_t* exp, size_t n_limbs) const {
        Fp12 acc = one();
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

    // p^2 Frobenius: fixes Fp2 coefficients and scales the w^i slot by
    // eps^i, eps = xi^((p^2 - 1) / 6) which lies in Fp.
    Fp12 frobenius_square() const {
        static const Fp eps = [] {
            static constexpr uint64_t kEps[6] = {
                0x2e01fffffffeffffull, 0xde17d813620a0002ull,
                0xddb3a93be6f89688ull, 0xba69c6076a0f77eaull,
                0x5f19672fdf76ce51ull, 0x0000000000000000ull};
            return Fp::from_canonical_limbs(kEps);
        }();
        Fp e2 = eps * eps;
        Fp e3 = e2 * eps;
        Fp e4 = e2 * e2;
        Fp e5 = e4 * eps;
        return Fp12(Fp6(c0.c0, c0.c1.scale(e2), c0.c2.scale(e4)),
                    Fp6(c1.c0.scale(eps), c1.c1.scale(e3), c1.c2.scale(e5)));
    }
};

}  // namespace platoonid::bls
