#pragma once

// TotalView-ITCH 4.1 capture decoding.
//
// Capture container: gzip stream of length-prefixed frames,
//   repeat { u16_be length, payload[length] }
// where the first payload byte is the message type code. All integer
// fields are big-endian. Timestamps arrive split: 'T' messages carry
// whole seconds since midnight, every other message carries nanoseconds
// within the current second.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "bookflow/types.hpp"

namespace bookflow::itch {

enum class EventKind : std::uint8_t {
    SystemEvent,
    Seconds,
    AddOrder,
    AddOrderMpid,
    OrderExecuted,
    OrderExecutedWithPrice,
    OrderCancel,
    OrderDelete,
    OrderReplace,
    NonDisplayedTrade,
    Other,
};

const char* kind_name(EventKind k);

// One decoded message. A plain superset struct: unused fields are zero.
struct MarketEvent {
    EventKind kind = EventKind::Other;
    Nanos timestamp_ns = 0;
    std::uint64_t order_ref = 0;   // 0 for hidden orders on 'P'
    std::uint64_t new_ref = 0;     // OrderReplace only
    std::uint64_t match_number = 0;
    std::uint32_t shares = 0;
    Price4 price;
    Side side = Side::Buy;
    bool printable = true;         // OrderExecutedWithPrice only
    char code = 0;                 // SystemEvent code / raw type for Other
    StockField stock{};            // AddOrder / AddOrderMpid / NonDisplayedTrade
};

// Fatal capture defects carry the byte offset of the offending frame.
struct DecodeError : std::runtime_error {
    enum class Kind { TruncatedFrame, LengthMismatch };
    DecodeError(Kind k, std::uint64_t offset, const std::string& what)
        : std::runtime_error(what), kind(k), byte_offset(offset) {}
    Kind kind;
    std::uint64_t byte_offset;
};

// Pull-based byte source over a (possibly gzip-compressed) file. zlib
// reads plain files transparently as well.
class GzSource {
public:
    explicit GzSource(const std::string& path);
    ~GzSource();
    GzSource(GzSource&&) noexcept;
    GzSource& operator=(GzSource&&) noexcept;
    GzSource(const GzSource&) = delete;
    GzSource& operator=(const GzSource&) = delete;

    // Reads exactly `n` bytes unless the stream ends first; returns the
    // number of bytes actually read.
    std::size_t read(void* dst, std::size_t n);
    std::uint64_t offset() const { return offset_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::uint64_t offset_ = 0;
};

// Splits the capture into frames. Payload views stay valid until the
// next call.
class FrameReader {
public:
    explicit FrameReader(const std::string& path) : src_(path) {}

    // nullopt at a clean end-of-stream; throws TruncatedFrame otherwise.
    std::optional<std::span<const std::uint8_t>> next();
    std::uint64_t frame_offset() const { return frame_offset_; }

private:
    GzSource src_;
    std::vector<std::uint8_t> buf_;
    std::uint64_t frame_offset_ = 0;
};

// Decodes one payload. `seconds_base` is the value of the most recent
// 'T' message. Unknown type codes become EventKind::Other (timestamp
// only); known codes with the wrong payload size throw LengthMismatch.
MarketEvent decode_message(std::span<const std::uint8_t> payload, std::uint32_t seconds_base,
                           std::uint64_t frame_offset = 0);

// Streams decoded events from a capture, optionally filtered to a
// symbol set. Order-level events ('E','C','X','D','U') carry no symbol,
// so the reader keeps the ref->symbol binding learned from adds and
// routes them by reference; Seconds and SystemEvent always pass.
class EventReader {
public:
    explicit EventReader(const std::string& path) : frames_(path) {}
    EventReader(const std::string& path, std::vector<std::string> symbols);

    std::optional<MarketEvent> next();

    std::uint64_t frames_read() const { return frames_read_; }

private:
    bool wanted(const MarketEvent& ev);

    FrameReader frames_;
    std::uint32_t seconds_base_ = 0;
    std::uint64_t frames_read_ = 0;
    bool filtered_ = false;
    std::vector<StockField> symbols_;
    std::unordered_set<std::uint64_t> tracked_refs_;
};

} // namespace bookflow::itch
