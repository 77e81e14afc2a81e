#pragma once

#include "platoonid/bls/curve.hpp"
#include "platoonid/bls/tower.hpp"

namespace platoonid::bls {

namespace detail {

// |x| for the BLS12-381 curve parameter x = -0xd201000000010000.
inline constexpr uint64_t kMillerLoopParam = 0xd201000000010000ull;

// (p^4 - p^2 + 1) / r, the hard part of the final exponentiation.
inline constexpr uint64_t kHardExp[20] = {
    0xe516c3f438e3ba79ull, 0xfa9912aae208ccf1ull, 0x905ce937335d5b68ull,
    0xc71a2629b0dea236ull, 0x83774940996754c8ull, 0x21d160aeb6a1e799ull,
    0x2ed0b283ed237db4ull, 0x915c97f36c6f1821ull, 0x67f17fcbde783765ull,
    0x2378b9039096d1b7ull, 0x7988f8761bdc51dcull, 0x2076995003fc77a1ull,
    0x827eca0ba621315bull, 0xe5a72bce8d63cb9full, 0xf68f7764c28b6f8aull,
    0x2f230063cf081517ull, 0x94506632528d6a9aull, 0xd3cde88eeb996ca3ull,
    0xc0bd38c3195c899eull, 0x000f686b3d807d01ull};

// Line through the twist point T (slope lambda) evaluated at P, mapped
// through the untwist and scaled by v^2 in Fp6*, which the final
// exponentiation annihilates. Only three Fp12 basis slots are populated:
//   yp * v^2  +  (lambda x_t - y_t) * w  +  (-lambda x_p) * v w.
inline Fp12 line_eval(const Fp2& lambda, const Fp2& xt, const Fp2& yt,
                      const Fp& xp, const Fp& yp) {
    Fp12 l;
    l.c0.c2 = Fp2(yp, Fp::zero());
    l.c1.c0 = lambda * xt - yt;
    l.c1.c1 = -lambda.scale(xp);
    return l;
}

}  // namespace detail

// Target-group element; a coset representative produced by the final
// exponentiation, with order dividing r.
struct Gt {
    Fp12 value;

    static Gt one() { return Gt{Fp12::one()}; }

    bool is_one() const { return value.is_one(); }

    friend bool operator==(const Gt& a, const Gt& b) {
        return a.value == b.value;
    }
    friend bool operator!=(const Gt& a, const Gt& b) { return !(a == b); }

    friend Gt operator*(const Gt& a, const Gt& b) {
        return Gt{a.value * b.value};
    }

    Gt pow(const Fr& k) const {
        auto limbs = k.canonical_limbs();
        return Gt{value.pow_limbs(limbs.data(), limbs.size())};
    }
};

// f_{|x|,Q}(P) with affine twist-point updates; the conjugation at the end
// accounts for the negative loop parameter.
inline Fp12 miller_loop(const G1Affine& p, const G2Affine& q) {
    Fp2 xt = q.x;
    Fp2 yt = q.y;
    Fp12 f = Fp12::one();
    for (int bit = 62; bit >= 0; --bit) {
        Fp2 xt_sq = xt.square();
        Fp2 lambda = (xt_sq.dbl() + xt_sq) * yt.dbl().inv();
        f = f.square() * detail::line_eval(lambda, xt, yt, p.x, p.y);
        Fp2 x_next = lambda.square() - xt.dbl();
        yt = lambda * (xt - x_next) - yt;
        xt = x_next;
        if ((detail::kMillerLoopParam >> bit) & 1) {
            lambda = (q.y - yt) * (q.x - xt).inv();
            f = f * detail::line_eval(lambda, xt, yt, p.x, p.y);
            x_next = lambda.square() - xt - q.x;
            yt = lambda * (xt - x_next) - yt;
            xt = x_next;
        }
    }
    return f.conjugate();
}

inline Gt final_exponentiation(const Fp12& f) {
    // Easy part: f^((p^6 - 1)(p^2 + 1)). Conjugation is the p^6 Frobenius.
    Fp12 t = f.conjugate() * f.inv();
    t = t.frobenius_square() * t;
    // Hard part: plain exponentiation by (p^4 - p^2 + 1) / r.
    return Gt{t.pow_limbs(detail::kHardExp, 20)};
}

inline Gt pairing(const G1Affine& p, const G2Affine& q) {
    if (p.infinity || q.infinity) return Gt::one();
    return final_exponentiation(miller_loop(p, q));
}

}  // namespace platoonid::bls
