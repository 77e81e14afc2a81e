#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "platoonid/bls/pairing.hpp"
#include "platoonid/errors.hpp"
#include "platoonid/hex.hpp"
#include "platoonid/rng.hpp"
#include "platoonid/sha256.hpp"

namespace platoonid {

// Fixed pairing setup: verifier keys live in G2 (the "key group"), proofs
// in G1, so proofs stay at 48 bytes on the wire. The pairing is
// e: G1 x G2 -> GT over BLS12-381.
struct GroupParams {
    std::string curve_id;
    bls::G2Affine g;

    // Deterministic text form, used to pin parameter stability in tests.
    std::string to_text() const {
        std::string out = "curve=" + curve_id + "\n";
        out += "g=" + to_hex(bls::g2_compress(g)) + "\n";
        out += "order=73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001\n";
        return out;
    }
};

inline GroupParams setup_params() {
    return GroupParams{"bls12-381", bls::g2_generator()};
}

struct ProverKey {
    bls::Fr a;  // nonzero scalar
};

struct VerifierKey {
    bls::G2Affine v;  // g^a, never the identity
};

struct IdentityDigest {
    Digest32 bytes{};

    friend bool operator==(const IdentityDigest& l, const IdentityDigest& r) {
        return l.bytes == r.bytes;
    }
    friend bool operator!=(const IdentityDigest& l, const IdentityDigest& r) {
        return !(l == r);
    }
};

using Nonce16 = std::array<uint8_t, 16>;

struct ProofBundle {
    bls::G1Affine delta;
    IdentityDigest digest;
    std::optional<Nonce16> nonce;
};

// Uniform nonzero scalar by rejection sampling on 32-byte draws.
inline bls::Fr sample_scalar(RandomSource& rng) {
    for (;;) {
        uint8_t buf[32];
        rng.fill(buf, 32);
        auto v = bls::Fr::from_bytes_be(std::span<const uint8_t>(buf, 32));
        if (v && !v->is_zero()) return *v;
    }
}

inline std::pair<ProverKey, VerifierKey> keygen(RandomSource& rng) {
    bls::Fr a = sample_scalar(rng);
    return {ProverKey{a}, VerifierKey{bls::scalar_mul(bls::g2_generator(), a)}};
}

inline VerifierKey derive_verifier_key(const ProverKey& key) {
    return VerifierKey{bls::scalar_mul(bls::g2_generator(), key.a)};
}

inline IdentityDigest hash_identity(std::string_view identifier) {
    if (identifier.empty()) {
        throw InvalidIdentifierError("identity string must be non-empty");
    }
    return IdentityDigest{sha256(identifier)};
}

// Deterministic try-and-increment map into the prime-order subgroup of G1.
// For counter = 0, 1, ...:
//   pre  = "platoonid-h2c-v1" || counter || digest || nonce
//   wide = SHA256(0x00 || pre) || SHA256(0x01 || pre)      (64 bytes)
//   x    = wide mod p; if x^3 + 4 is a square, take the smaller root y,
//          clear the cofactor, and return unless that lands on infinity.
// Counters are public, so the variable-time search leaks nothing useful.
inline bls::G1Affine hash_to_group(const IdentityDigest& digest,
                                   std::span<const uint8_t> nonce) {
    static const bls::Fp shift_256 = [] {
        uint64_t e = 256;
        return bls::Fp::from_u64(2).pow_limbs(&e, 1);
    }();
    static constexpr uint64_t kCofactor[2] = {0x8c00aaab0000aaabull,
                                              0x396c8c005555e156ull};
    std::vector<uint8_t> pre;
    constexpr std::string_view tag = "platoonid-h2c-v1";
    pre.push_back(0);
    pre.insert(pre.end(), tag.begin(), tag.end());
    pre.push_back(0);  // counter slot
    pre.insert(pre.end(), digest.bytes.begin(), digest.bytes.end());
    pre.insert(pre.end(), nonce.begin(), nonce.end());
    const size_t counter_at = 1 + tag.size();

    for (int counter = 0; counter < 256; ++counter) {
        pre[counter_at] = static_cast<uint8_t>(counter);
        pre[0] = 0x00;
        Digest32 lo_half = sha256(std::span<const uint8_t>(pre.data(), pre.size()));
        pre[0] = 0x01;
        Digest32 hi_half = sha256(std::span<const uint8_t>(pre.data(), pre.size()));

        // 64-byte big-endian value reduced mod p: hi * 2^256 + lo, where
        // hi is the first half of the stream.
        auto embed = [](const Digest32& d) {
            std::array<uint8_t, 48> padded{};
            std::copy(d.begin(), d.end(), padded.begin() + 16);
            return *bls::Fp::from_bytes_be(
                std::span<const uint8_t>(padded.data(), padded.size()));
        };
        bls::Fp x = embed(lo_half) * shift_256 + embed(hi_half);

        auto y = fp_sqrt(x.square() * x + bls::CurveB<bls::Fp>::value());
        if (!y) continue;
        bls::Fp y_small = y->is_lex_largest() ? -*y : *y;
        auto point = bls::scalar_mul(bls::G1Affine::from_xy(x, y_small),
                                     kCofactor, 2);
        if (point.infinity) continue;
        return point;
    }
    throw Error("hash_to_group exhausted its counter space");
}

inline std::span<const uint8_t> nonce_span(const std::optional<Nonce16>& nonce) {
    if (!nonce) return {};
    return std::span<const uint8_t>(nonce->data(), nonce->size());
}

inline ProofBundle generate_proof(const ProverKey& key,
                                  const IdentityDigest& digest,
                                  const std::optional<Nonce16>& nonce = {}) {
    auto h = hash_to_group(digest, nonce_span(nonce));
    return ProofBundle{bls::scalar_mul(h, key.a), digest, nonce};
}

// The verification equation e(delta, g) == e(h, v). Group membership of
// deserialized inputs is enforced by the decoders; identity elements are
// rejected here as malformed rather than scored as false.
inline bool verify_proof(const ProofBundle& proof, const VerifierKey& vkey,
                         const GroupParams& params) {
    if (proof.delta.infinity) {
        throw MalformedPointError("proof point is the identity");
    }
    if (vkey.v.infinity) {
        throw MalformedPointError("verifier key is the identity");
    }
    auto h = hash_to_group(proof.digest, nonce_span(proof.nonce));
    return bls::pairing(proof.delta, params.g) == bls::pairing(h, vkey.v);
}

// --- hex text encodings (lowercase, fixed length per type) ---

inline std::string prover_key_to_hex(const ProverKey& key) {
    return to_hex(key.a.to_bytes_be());
}

inline ProverKey prover_key_from_hex(std::string_view text) {
    auto bytes = from_hex(text);
    if (bytes.size() != 32) {
        throw EncodingError("prover key must be 32 bytes");
    }
    auto a = bls::Fr::from_bytes_be(std::span<const uint8_t>(bytes.data(), 32));
    if (!a || a->is_zero()) {
        throw EncodingError("prover key scalar out of range");
    }
    return ProverKey{*a};
}

inline std::string verifier_key_to_hex(const VerifierKey& key) {
    return to_hex(bls::g2_compress(key.v));
}

inline VerifierKey verifier_key_from_hex(std::string_view text) {
    auto bytes = from_hex(text);
    if (bytes.size() != 96) {
        throw EncodingError("verifier key must be 96 bytes");
    }
    auto v = bls::g2_decompress(std::span<const uint8_t>(bytes.data(), 96));
    if (v.infinity) {
        throw MalformedPointError("verifier key is the identity");
    }
    return VerifierKey{v};
}

// Proof wire form: delta (48 bytes) || digest (32 bytes) || optional
// nonce (16 bytes), so 160 or 192 hex characters.
inline std::string proof_to_hex(const ProofBundle& proof) {
    std::string out = to_hex(bls::g1_compress(proof.delta));
    out += to_hex(proof.digest.bytes);
    if (proof.nonce) out += to_hex(*proof.nonce);
    return out;
}

inline ProofBundle proof_from_hex(std::string_view text) {
    auto bytes = from_hex(text);
    if (bytes.size() != 80 && bytes.size() != 96) {
        throw EncodingError("proof must be 80 or 96 bytes");
    }
    ProofBundle proof;
    proof.delta = bls::g1_decompress(std::span<const uint8_t>(bytes.data(), 48));
    if (proof.delta.infinity) {
        throw MalformedPointError("proof point is the identity");
    }
    std::copy(bytes.begin() + 48, bytes.begin() + 80, proof.digest.bytes.begin());
    if (bytes.size() == 96) {
        Nonce16 nonce;
        std::copy(bytes.begin() + 80, bytes.end(), nonce.begin());
        proof.nonce = nonce;
    }
    return proof;
}

}  // namespace platoonid
