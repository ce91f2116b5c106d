#include "secemb/prg.hpp"

#include <openssl/evp.h>

#include <stdexcept>
#include <vector>

namespace secemb::prg {
namespace {

// Fixed, public AES-128 keys. G(s) = (E_k(s) ^ s) per branch in the
// Matyas-Meyer-Oseas style; key 2 supplies the control bits and key 3 drives
// the counter-mode Convert stream. The frozen test vectors pin this choice.
constexpr std::uint8_t kKeyLeft[16] = {0x21, 0x5d, 0x1f, 0x8e, 0xa1, 0x5b, 0x63, 0x29,
                                       0x77, 0x40, 0x9d, 0x4c, 0x04, 0x33, 0xb2, 0x5a};
constexpr std::uint8_t kKeyRight[16] = {0x8c, 0x2f, 0x71, 0x0d, 0x96, 0xe4, 0x58, 0xbb,
                                        0x12, 0x6a, 0xfe, 0x30, 0xc5, 0x07, 0x49, 0xd3};
constexpr std::uint8_t kKeyCtrl[16] = {0x5e, 0xb8, 0x02, 0xc7, 0x3d, 0x91, 0xaa, 0x46,
                                       0xe0, 0x1b, 0x64, 0xf9, 0x2e, 0x80, 0x57, 0x0c};
constexpr std::uint8_t kKeyConv[16] = {0xf3, 0x09, 0xcd, 0x52, 0x78, 0x26, 0xbe, 0x94,
                                       0x41, 0xd7, 0x0a, 0x85, 0x6c, 0xe2, 0x38, 0x1f};

thread_local std::uint64_t g_expand_count = 0;

struct Ecb {
    EVP_CIPHER_CTX* ctx = nullptr;

    explicit Ecb(const std::uint8_t* key) {
        ctx = EVP_CIPHER_CTX_new();
        if (!ctx || EVP_EncryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, key, nullptr) != 1)
            throw std::runtime_error("prg: AES context init failed");
        EVP_CIPHER_CTX_set_padding(ctx, 0);
    }
    ~Ecb() { EVP_CIPHER_CTX_free(ctx); }
    Ecb(const Ecb&) = delete;
    Ecb& operator=(const Ecb&) = delete;

    void encrypt(const std::uint8_t* in, std::uint8_t* out, std::size_t nblocks) const {
        int outl = 0;
        if (EVP_EncryptUpdate(ctx, out, &outl, in, static_cast<int>(nblocks * 16)) != 1)
            throw std::runtime_error("prg: AES encrypt failed");
    }
};

struct Ciphers {
    Ecb left{kKeyLeft};
    Ecb right{kKeyRight};
    Ecb ctrl{kKeyCtrl};
    Ecb conv{kKeyConv};
};

Ciphers& ciphers() {
    thread_local Ciphers c;
    return c;
}

inline void xor16(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out) {
    std::uint64_t a0, a1, b0, b1;
    std::memcpy(&a0, a, 8);
    std::memcpy(&a1, a + 8, 8);
    std::memcpy(&b0, b, 8);
    std::memcpy(&b1, b + 8, 8);
    a0 ^= b0;
    a1 ^= b1;
    std::memcpy(out, &a0, 8);
    std::memcpy(out + 8, &a1, 8);
}

thread_local std::vector<std::uint8_t> g_scratch;

}  // namespace

PrgOutput expand(const Seed& s) {
    PrgOutput out;
    std::uint8_t t;
    expand_batch(&s, 1, &out.left, &out.right, &t);
    out.t_left = t & 1;
    out.t_right = (t >> 1) & 1;
    return out;
}

void expand_batch(const Seed* in, std::size_t count,
                  Seed* out_left, Seed* out_right, std::uint8_t* out_t) {
    if (count == 0) return;
    g_expand_count += count;
    auto& c = ciphers();

    const auto* in_bytes = reinterpret_cast<const std::uint8_t*>(in);
    c.left.encrypt(in_bytes, reinterpret_cast<std::uint8_t*>(out_left), count);
    c.right.encrypt(in_bytes, reinterpret_cast<std::uint8_t*>(out_right), count);

    g_scratch.resize(count * 16);
    c.ctrl.encrypt(in_bytes, g_scratch.data(), count);

    for (std::size_t i = 0; i < count; ++i) {
        xor16(out_left[i].bytes.data(), in[i].bytes.data(), out_left[i].bytes.data());
        xor16(out_right[i].bytes.data(), in[i].bytes.data(), out_right[i].bytes.data());
        // Control bits from the feed-forwarded third branch.
        out_t[i] = static_cast<std::uint8_t>((g_scratch[i * 16] ^ in[i].bytes[0]) & 3);
    }
}

RingScalar convert_scalar(const Seed& s, const RingParams& p) {
    std::uint64_t v;
    std::memcpy(&v, s.bytes.data(), 8);
    return v & p.mask();
}

RingVector convert_vector(const Seed& s, std::size_t len, const RingParams& p) {
    if (len == 0) throw std::invalid_argument("convert_vector: len must be >= 1");
    RingVector out(p, len);
    convert_batch_into(&s, 1, len, p, out.elems.data());
    return out;
}

void convert_batch_into(const Seed* seeds, std::size_t count, std::size_t len,
                        const RingParams& p, std::uint64_t* out) {
    const std::uint64_t mask = p.mask();
    const std::size_t elem_bytes = (p.bits + 7) / 8;

    if (len * elem_bytes <= kSeedBytes) {
        // Truncation regime: slice elements straight out of the seed.
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t k = 0; k < len; ++k) {
                std::uint64_t v = 0;
                std::memcpy(&v, seeds[i].bytes.data() + k * elem_bytes,
                            std::min<std::size_t>(8, kSeedBytes - k * elem_bytes));
                out[i * len + k] = v & mask;
            }
        }
        return;
    }

    // Counter-mode regime: block_j = E_k(s ^ j) ^ s ^ j.
    const std::size_t nbytes = len * elem_bytes;
    const std::size_t stride = convert_stream_stride(nbytes);
    thread_local std::vector<std::uint8_t> stream_buf;
    stream_buf.resize(count * stride);
    convert_stream_into(seeds, count, nbytes, stream_buf.data());

    for (std::size_t i = 0; i < count; ++i) {
        const std::uint8_t* row = stream_buf.data() + i * stride;
        for (std::size_t k = 0; k < len; ++k) {
            std::uint64_t v = 0;
            std::memcpy(&v, row + k * elem_bytes, std::min<std::size_t>(8, elem_bytes));
            out[i * len + k] = v & mask;
        }
    }
}

void convert_stream_parts_into(const Seed* seeds, std::size_t count, std::size_t nbytes,
                               std::uint8_t* cipher_out, std::uint8_t* input_out) {
    const std::size_t nblocks = (nbytes + 15) / 16;
    if (nblocks > 0xFFFF) throw std::invalid_argument("convert stream too long");

    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t lo, hi;
        std::memcpy(&lo, seeds[i].bytes.data(), 8);
        std::memcpy(&hi, seeds[i].bytes.data() + 8, 8);
        std::uint8_t* row = input_out + i * nblocks * 16;
        for (std::size_t j = 0; j < nblocks; ++j) {
            // Counter fits the low two bytes; little-endian lo ^= j applies it.
            std::uint64_t jlo = lo ^ j;
            std::memcpy(row + j * 16, &jlo, 8);
            std::memcpy(row + j * 16 + 8, &hi, 8);
        }
    }
    ciphers().conv.encrypt(input_out, cipher_out, count * nblocks);
}

void convert_stream_into(const Seed* seeds, std::size_t count, std::size_t nbytes,
                         std::uint8_t* out) {
    const std::size_t nblocks = (nbytes + 15) / 16;
    g_scratch.resize(count * nblocks * 16);
    convert_stream_parts_into(seeds, count, nbytes, out, g_scratch.data());
    const std::size_t total = count * nblocks * 16;
    for (std::size_t off = 0; off < total; off += 8) {
        std::uint64_t a, b;
        std::memcpy(&a, out + off, 8);
        std::memcpy(&b, g_scratch.data() + off, 8);
        a ^= b;
        std::memcpy(out + off, &a, 8);
    }
}

std::uint64_t expand_count() { return g_expand_count; }
void reset_expand_count() { g_expand_count = 0; }

}  // namespace secemb::prg
