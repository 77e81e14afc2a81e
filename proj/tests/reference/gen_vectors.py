"""Regenerates tests/vectors/bls_vectors.hpp from the Python reference.

The emitted header is committed so the C++ suite never needs Python at
build or test time. Rerun after any change to bls_ref.py:

    python3 tests/reference/gen_vectors.py
"""

import os

import bls_ref as B


def fp_hex(v: int) -> str:
    return B.fp_to_bytes(v % B.P_MOD).hex()


def fr_hex(v: int) -> str:
    return B.fr_to_bytes(v % B.R_ORDER).hex()


def g1_affine_hex(pt):
    return fp_hex(pt[0].v), fp_hex(pt[1].v)


def g2_affine_hex(pt):
    x, y = pt
    return fp_hex(x.c0), fp_hex(x.c1), fp_hex(y.c0), fp_hex(y.c1)


def gt_hex(e) -> str:
    return "".join(fp_hex(c) for c in e.coeffs())


def cxx_str(s: str) -> str:
    return '"' + s + '"'


def main():
    rng = B.Drbg(b"vector-gen")

    def rand_fp():
        return int.from_bytes(rng.fill(48), "big") % B.P_MOD

    lines = []
    out = lines.append
    out("// Generated by tests/reference/gen_vectors.py. Do not edit by hand.")
    out("#pragma once")
    out("")
    out("namespace vectors {")
    out("")

    # Fp multiplication, including boundary operands.
    out("struct FpMulVec { const char* a; const char* b; const char* product; };")
    out("inline constexpr FpMulVec kFpMul[] = {")
    pairs = [
        (0, 0),
        (0, 1),
        (1, 1),
        (B.P_MOD - 1, B.P_MOD - 1),
        (B.P_MOD - 1, 2),
        (2, (B.P_MOD + 1) // 2),
    ]
    pairs += [(rand_fp(), rand_fp()) for _ in range(6)]
    for a, b in pairs:
        out(f"    {{{cxx_str(fp_hex(a))}, {cxx_str(fp_hex(b))}, {cxx_str(fp_hex(a * b))}}},")
    out("};")
    out("")

    out("struct FpInvVec { const char* a; const char* inverse; };")
    out("inline constexpr FpInvVec kFpInv[] = {")
    for a in [1, 2, B.P_MOD - 1] + [rand_fp() for _ in range(4)]:
        out(f"    {{{cxx_str(fp_hex(a))}, {cxx_str(fp_hex(B.fp_inv(a)))}}},")
    out("};")
    out("")

    out("struct FpSqrtVec { const char* a; bool has_root; const char* root; };")
    out("inline constexpr FpSqrtVec kFpSqrt[] = {")
    sqrt_inputs = [0, 1, 4, B.P_MOD - 1] + [rand_fp() for _ in range(6)]
    for a in sqrt_inputs:
        s = B.fp_sqrt(a)
        if s is None:
            out(f"    {{{cxx_str(fp_hex(a))}, false, {cxx_str(fp_hex(0))}}},")
        else:
            out(f"    {{{cxx_str(fp_hex(a))}, true, {cxx_str(fp_hex(s))}}},")
    out("};")
    out("")

    # Fp2 arithmetic.
    out("struct Fp2MulVec {")
    out("    const char* a0; const char* a1;")
    out("    const char* b0; const char* b1;")
    out("    const char* p0; const char* p1;")
    out("};")
    out("inline constexpr Fp2MulVec kFp2Mul[] = {")
    fp2_pairs = [
        (B.Fp2(0, 1), B.Fp2(0, 1)),  # u*u = -1
        (B.Fp2(1, 1), B.Fp2(1, B.P_MOD - 1)),
    ]
    fp2_pairs += [(B.Fp2(rand_fp(), rand_fp()), B.Fp2(rand_fp(), rand_fp())) for _ in range(4)]
    for a, b in fp2_pairs:
        p = a * b
        out(
            f"    {{{cxx_str(fp_hex(a.c0))}, {cxx_str(fp_hex(a.c1))}, "
            f"{cxx_str(fp_hex(b.c0))}, {cxx_str(fp_hex(b.c1))}, "
            f"{cxx_str(fp_hex(p.c0))}, {cxx_str(fp_hex(p.c1))}}},"
        )
    out("};")
    out("")

    out("struct Fp2InvVec { const char* a0; const char* a1; const char* i0; const char* i1; };")
    out("inline constexpr Fp2InvVec kFp2Inv[] = {")
    for a in [B.Fp2(1, 1), B.Fp2(0, 1)] + [B.Fp2(rand_fp(), rand_fp()) for _ in range(3)]:
        i = a.inv()
        out(
            f"    {{{cxx_str(fp_hex(a.c0))}, {cxx_str(fp_hex(a.c1))}, "
            f"{cxx_str(fp_hex(i.c0))}, {cxx_str(fp_hex(i.c1))}}},"
        )
    out("};")
    out("")

    # Scalar multiples of the generators, with compressed encodings.
    out("struct G1MulVec { const char* k; const char* x; const char* y; const char* compressed; };")
    out("inline constexpr G1MulVec kG1Mul[] = {")
    scalars = [1, 2, 3, 5, 0xDEADBEEF, B.R_ORDER - 1, B.sample_scalar(rng)]
    for k in scalars:
        pt = B.G1_CURVE.mul(B.G1_GEN, k)
        x, y = g1_affine_hex(pt)
        out(
            f"    {{{cxx_str(fr_hex(k))}, {cxx_str(x)}, {cxx_str(y)}, "
            f"{cxx_str(B.g1_compress(pt).hex())}}},"
        )
    out("};")
    out("")

    out("struct G2MulVec {")
    out("    const char* k;")
    out("    const char* x0; const char* x1; const char* y0; const char* y1;")
    out("    const char* compressed;")
    out("};")
    out("inline constexpr G2MulVec kG2Mul[] = {")
    for k in scalars:
        pt = B.G2_CURVE.mul(B.G2_GEN, k)
        x0, x1, y0, y1 = g2_affine_hex(pt)
        out(
            f"    {{{cxx_str(fr_hex(k))}, {cxx_str(x0)}, {cxx_str(x1)}, "
            f"{cxx_str(y0)}, {cxx_str(y1)}, {cxx_str(B.g2_compress(pt).hex())}}},"
        )
    out("};")
    out("")

    out('inline constexpr const char* kG1InfinityCompressed = "' + B.g1_compress(None).hex() + '";')
    out('inline constexpr const char* kG2InfinityCompressed = "' + B.g2_compress(None).hex() + '";')
    out("")

    # Pairing outputs as 12 concatenated Fp coefficients
    # (c0.c0.c0, c0.c0.c1, c0.c1.c0, ..., c1.c2.c1).
    out("struct PairingVec { const char* ka; const char* kb; const char* gt; };")
    out("inline constexpr PairingVec kPairing[] = {")
    for ka, kb in [(1, 1), (2, 1), (1, 2), (3, 5)]:
        e = B.pairing(B.G1_CURVE.mul(B.G1_GEN, ka), B.G2_CURVE.mul(B.G2_GEN, kb))
        out(f"    {{{cxx_str(fr_hex(ka))}, {cxx_str(fr_hex(kb))}, {cxx_str(gt_hex(e))}}},")
    out("};")
    out("")

    # Hash-to-curve outputs.
    out("struct HashToG1Vec {")
    out("    const char* digest; const char* nonce;")
    out("    const char* x; const char* y; const char* compressed;")
    out("};")
    out("inline constexpr HashToG1Vec kHashToG1[] = {")
    h2c_inputs = [
        (B.sha256(b"00:A0:C9:14:C8:29"), b""),
        (B.sha256(b"00:A0:C9:14:C8:29"), B.sha256(b"epoch-1")[:16]),
        (B.sha256(b"truck-7"), B.sha256(b"challenge-42")[:16]),
        (bytes(32), bytes(32)),
    ]
    for dg, nonce in h2c_inputs:
        pt = B.hash_to_g1(dg, nonce)
        x, y = g1_affine_hex(pt)
        out(
            f"    {{{cxx_str(dg.hex())}, {cxx_str(nonce.hex())}, "
            f"{cxx_str(x)}, {cxx_str(y)}, {cxx_str(B.g1_compress(pt).hex())}}},"
        )
    out("};")
    out("")

    # Key generation: 8-byte big-endian seed -> (secret, public key in G2).
    out("struct KeygenVec { unsigned long long seed; const char* secret; const char* pubkey; };")
    out("inline constexpr KeygenVec kKeygen[] = {")
    for seed in [0, 1, 2, 42, 0xFFFFFFFFFFFFFFFF]:
        a, v = B.keygen(seed)
        out(f"    {{{seed}ull, {cxx_str(fr_hex(a))}, {cxx_str(B.g2_compress(v).hex())}}},")
    out("};")
    out("")

    # Full prove path: seed -> secret, digest+nonce -> proof point.
    out("struct ProofVec {")
    out("    unsigned long long seed;")
    out("    const char* digest; const char* nonce; const char* proof;")
    out("};")
    out("inline constexpr ProofVec kProof[] = {")
    proof_inputs = [
        (1, B.sha256(b"00:A0:C9:14:C8:29"), B.sha256(b"epoch-1")[:16]),
        (2, B.sha256(b"00:A0:C9:14:C8:29"), B.sha256(b"epoch-1")[:16]),
        (42, B.sha256(b"truck-3"), B.sha256(b"challenge-9")[:16]),
        (7, B.sha256(b"truck-3"), b""),
    ]
    for seed, dg, nonce in proof_inputs:
        a, _ = B.keygen(seed)
        delta = B.sign(a, dg, nonce)
        out(
            f"    {{{seed}ull, {cxx_str(dg.hex())}, {cxx_str(nonce.hex())}, "
            f"{cxx_str(B.g1_compress(delta).hex())}}},"
        )
    out("};")
    out("")

    # SHA-256 and DRBG pins.
    out("struct DigestVec { const char* message; const char* digest; };")
    out("inline constexpr DigestVec kSha256[] = {")
    for msg in [b"", b"abc", b"00:A0:C9:14:C8:29"]:
        out(f"    {{{cxx_str(msg.decode())}, {cxx_str(B.sha256(msg).hex())}}},")
    out("};")
    out("")

    out("struct DrbgVec { unsigned long long seed; const char* stream; };")
    out("inline constexpr DrbgVec kDrbg[] = {")
    for seed in [0, 1, 123456789]:
        d = B.Drbg(seed.to_bytes(8, "big"))
        out(f"    {{{seed}ull, {cxx_str(d.fill(64).hex())}}},")
    out("};")
    out("")

    out("}  // namespace vectors")
    out("")

    here = os.path.dirname(os.path.abspath(__file__))
    dest = os.path.join(here, "..", "vectors", "bls_vectors.hpp")
    os.makedirs(os.path.dirname(dest), exist_ok=True)
    with open(dest, "w") as f:
        f.write("\n".join(lines))
    print(f"wrote {os.path.normpath(dest)}")


if __name__ == "__main__":
    main()
