#pragma once

#include <cstdint>
#include <vector>

#include "secemb/wire.hpp"

namespace secemb::ledger {

enum class Stage : std::uint8_t { retrieval = 0, aggregation = 1 };
enum class Direction : std::uint8_t { up = 0, down = 1 };

struct Entry {
    std::uint32_t round;
    std::uint32_t client;
    Stage stage;
    Direction dir;
    wire::MessageType type;
    std::uint64_t bytes;      // framed, as transmitted
    std::uint64_t info_bits;  // information content before byte alignment
};

struct Totals {
    std::uint64_t up_bytes = 0;
    std::uint64_t down_bytes = 0;
    std::uint64_t up_info_bits = 0;
    std::uint64_t down_info_bits = 0;
};

// Reporting unit for the communication tables: MB = 2^20 bytes.
inline double to_mb(std::uint64_t bytes) { return static_cast<double>(bytes) / (1024.0 * 1024.0); }

class MessageLedger {
  public:
    void record(std::uint32_t round, std::uint32_t client, Stage stage, Direction dir,
                wire::MessageType type, std::uint64_t framed_bytes, std::uint64_t info_bits) {
        entries_.push_back({round, client, stage, dir, type, framed_bytes, info_bits});
        if (dir == Direction::up) {
            total_.up_bytes += framed_bytes;
            total_.up_info_bits += info_bits;
        } else {
            total_.down_bytes += framed_bytes;
            total_.down_info_bits += info_bits;
        }
    }

    const std::vector<Entry>& entries() const { return entries_; }
    const Totals& total() const { return total_; }

    Totals round_totals(std::uint32_t round, Stage stage) const {
        Totals t;
        for (const Entry& e : entries_) {
            if (e.round != round || e.stage != stage) continue;
            if (e.dir == Direction::up) {
                t.up_bytes += e.bytes;
                t.up_info_bits += e.info_bits;
            } else {
                t.down_bytes += e.bytes;
                t.down_info_bits += e.info_bits;
            }
        }
        return t;
    }

    Totals round_totals(std::uint32_t round) const {
        Totals a = round_totals(round, Stage::retrieval);
        Totals b = round_totals(round, Stage::aggregation);
        return {a.up_bytes + b.up_bytes, a.down_bytes + b.down_bytes,
                a.up_info_bits + b.up_info_bits, a.down_info_bits + b.down_info_bits};
    }

    void clear() {
        entries_.clear();
        total_ = Totals{};
    }

  private:
    std::vector<Entry> entries_;
    Totals total_;
};

}  // namespace secemb::ledger
