#pragma once

#include <cstdint>
#include <cstddef>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace secemb {

// Fixed-point arithmetic over Z_{2^b}. Every value that crosses a wire in the
// protocol is an element of this ring; reals exist only on the client side.
struct RingParams {
    std::uint32_t bits = 32;       // b: ring element width
    std::uint32_t frac_bits = 16;  // f: fixed-point scale 2^f

    constexpr std::uint64_t mask() const {
        return bits == 64 ? ~0ULL : ((1ULL << bits) - 1ULL);
    }
    // Largest representable magnitude of the signed fixed-point encoding.
    double signed_range() const {
        return std::ldexp(1.0, static_cast<int>(bits - 1 - frac_bits));
    }
    constexpr double scale() const { return static_cast<double>(1ULL << frac_bits); }

    void validate() const {
        if (bits == 0 || bits > 64 || frac_bits == 0 || frac_bits >= bits)
            throw std::invalid_argument("RingParams: need 0 < f < b <= 64");
    }
    bool operator==(const RingParams&) const = default;
};

using RingScalar = std::uint64_t;

inline RingScalar ring_add(const RingParams& p, RingScalar a, RingScalar b) {
    return (a + b) & p.mask();
}

inline RingScalar ring_sub(const RingParams& p, RingScalar a, RingScalar b) {
    return (a - b) & p.mask();
}

inline RingScalar ring_neg(const RingParams& p, RingScalar a) {
    return (0 - a) & p.mask();
}

inline RingScalar ring_mul(const RingParams& p, RingScalar a, RingScalar b) {
    return (a * b) & p.mask();
}

// Two's-complement reading of a ring element.
inline std::int64_t ring_to_signed(const RingParams& p, RingScalar v) {
    if (p.bits == 64) return static_cast<std::int64_t>(v);
    std::uint64_t sign_bit = 1ULL << (p.bits - 1);
    if (v & sign_bit) return static_cast<std::int64_t>(v | ~p.mask());
    return static_cast<std::int64_t>(v);
}

// round(x * 2^f) mod 2^b. Throws when x falls outside the signed range.
inline RingScalar quantize(const RingParams& p, double x) {
    if (!(std::abs(x) < p.signed_range()))
        throw std::overflow_error("quantize: |x| >= 2^(b-1-f)");
    double scaled = x * p.scale();
    auto as_int = static_cast<std::int64_t>(std::llround(scaled));
    return static_cast<std::uint64_t>(as_int) & p.mask();
}

inline double dequantize(const RingParams& p, RingScalar v) {
    return static_cast<double>(ring_to_signed(p, v)) / p.scale();
}

// Fixed-length vector over the ring; componentwise group laws.
struct RingVector {
    RingParams params;
    std::vector<RingScalar> elems;

    RingVector() = default;
    RingVector(RingParams p, std::size_t len) : params(p), elems(len, 0) {}
    RingVector(RingParams p, std::vector<RingScalar> e) : params(p), elems(std::move(e)) {}

    std::size_t size() const { return elems.size(); }
    RingScalar& operator[](std::size_t i) { return elems[i]; }
    RingScalar operator[](std::size_t i) const { return elems[i]; }

    void check_compatible(const RingVector& o) const {
        if (!(params == o.params) || elems.size() != o.elems.size())
            throw std::invalid_argument("RingVector: parameter or length mismatch");
    }

    void add_in_place(const RingVector& o) {
        check_compatible(o);
        const std::uint64_t m = params.mask();
        for (std::size_t i = 0; i < elems.size(); ++i)
            elems[i] = (elems[i] + o.elems[i]) & m;
    }
    void sub_in_place(const RingVector& o) {
        check_compatible(o);
        const std::uint64_t m = params.mask();
        for (std::size_t i = 0; i < elems.size(); ++i)
            elems[i] = (elems[i] - o.elems[i]) & m;
    }
    void negate_in_place() {
        const std::uint64_t m = params.mask();
        for (auto& e : elems) e = (0 - e) & m;
    }
    bool operator==(const RingVector&) const = default;
};

inline RingVector ring_vec_add(const RingVector& a, const RingVector& b) {
    RingVector out = a;
    out.add_in_place(b);
    return out;
}

inline RingVector ring_vec_sub(const RingVector& a, const RingVector& b) {
    RingVector out = a;
    out.sub_in_place(b);
    return out;
}

inline RingVector quantize_vector(const RingParams& p, std::span<const double> xs) {
    RingVector out(p, xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out.elems[i] = quantize(p, xs[i]);
    return out;
}

inline std::vector<double> dequantize_vector(const RingVector& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = dequantize(v.params, v.elems[i]);
    return out;
}

// Little-endian wire encoding, b/8 bytes per scalar.
inline std::size_t scalar_wire_size(const RingParams& p) {
    if (p.bits % 8 != 0)
        throw std::invalid_argument("ring serialization requires b divisible by 8");
    return p.bits / 8;
}

inline void append_scalar_le(const RingParams& p, RingScalar v, std::vector<std::uint8_t>& out) {
    std::size_t nb = scalar_wire_size(p);
    for (std::size_t i = 0; i < nb; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline RingScalar read_scalar_le(const RingParams& p, const std::uint8_t* data) {
    std::size_t nb = scalar_wire_size(p);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < nb; ++i) v |= static_cast<std::uint64_t>(data[i]) << (8 * i);
    return v & p.mask();
}

inline void append_vector_le(const RingVector& v, std::vector<std::uint8_t>& out) {
    for (RingScalar e : v.elems) append_scalar_le(v.params, e, out);
}

inline RingVector read_vector_le(const RingParams& p, const std::uint8_t* data, std::size_t len) {
    RingVector out(p, len);
    std::size_t nb = scalar_wire_size(p);
    for (std::size_t i = 0; i < len; ++i) out.elems[i] = read_scalar_le(p, data + i * nb);
    return out;
}

}  // namespace secemb
