#include "secemb/wire.hpp"

namespace secemb::wire {

std::vector<std::uint8_t> encode_frame(MessageType type, std::span<const std::uint8_t> payload) {
    std::vector<std::uint8_t> out;
    out.reserve(kFrameOverhead + payload.size());
    auto len = static_cast<std::uint32_t>(payload.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
    out.push_back(static_cast<std::uint8_t>(type));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFrameOverhead)
        throw WireError("frame header truncated", bytes.size());
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    std::uint8_t tag = bytes[4];
    if (tag < 1 || tag > 4) throw WireError("unknown message type", 4);
    if (bytes.size() != kFrameOverhead + len)
        throw WireError("frame length mismatch", 0);
    Frame f;
    f.type = static_cast<MessageType>(tag);
    f.payload.assign(bytes.begin() + kFrameOverhead, bytes.end());
    return f;
}

}  // namespace secemb::wire
