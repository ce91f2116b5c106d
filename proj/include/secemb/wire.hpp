#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace secemb::wire {

// Decode failure carrying the byte offset of the first bad position.
struct WireError : std::runtime_error {
    std::size_t offset;
    WireError(const std::string& what, std::size_t off)
        : std::runtime_error(what + " (offset " + std::to_string(off) + ")"), offset(off) {}
};

enum class MessageType : std::uint8_t {
    retrieval_req = 1,
    retrieval_resp = 2,
    update = 3,
    sync = 4,
};

inline constexpr std::size_t kFrameOverhead = 5;  // u32 length + u8 type

struct Frame {
    MessageType type;
    std::vector<std::uint8_t> payload;
};

// 4-byte little-endian payload length, 1-byte type tag, payload.
std::vector<std::uint8_t> encode_frame(MessageType type, std::span<const std::uint8_t> payload);

Frame decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace secemb::wire
