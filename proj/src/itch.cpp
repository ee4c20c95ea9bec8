#include "bookflow/itch.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>

namespace bookflow::itch {

namespace {

inline std::uint16_t read_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0]) << 8 | p[1];
}

inline std::uint32_t read_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) << 24 | static_cast<std::uint32_t>(p[1]) << 16 |
           static_cast<std::uint32_t>(p[2]) << 8 | p[3];
}

inline std::uint64_t read_u64(const std::uint8_t* p) {
    return static_cast<std::uint64_t>(read_u32(p)) << 32 | read_u32(p + 4);
}

// Fixed payload sizes (type byte included) for the supported codes.
constexpr int frame_size(char type) {
    switch (type) {
        case 'T': return 5;
        case 'S': return 6;
        case 'A': return 30;
        case 'F': return 34;
        case 'E': return 25;
        case 'C': return 30;
        case 'X': return 17;
        case 'D': return 13;
        case 'U': return 29;
        case 'P': return 38;
        default: return -1;
    }
}

} // namespace

const char* kind_name(EventKind k) {
    switch (k) {
        case EventKind::SystemEvent: return "system";
        case EventKind::Seconds: return "seconds";
        case EventKind::AddOrder: return "add";
        case EventKind::AddOrderMpid: return "add_mpid";
        case EventKind::OrderExecuted: return "execute";
        case EventKind::OrderExecutedWithPrice: return "execute_px";
        case EventKind::OrderCancel: return "cancel";
        case EventKind::OrderDelete: return "delete";
        case EventKind::OrderReplace: return "replace";
        case EventKind::NonDisplayedTrade: return "trade";
        case EventKind::Other: return "other";
    }
    return "?";
}

struct GzSource::Impl {
    gzFile f = nullptr;
};

GzSource::GzSource(const std::string& path) : impl_(std::make_unique<Impl>()) {
    impl_->f = gzopen(path.c_str(), "rb");
    if (!impl_->f) throw std::runtime_error("cannot open capture file: " + path);
    gzbuffer(impl_->f, 1 << 18);
}

GzSource::~GzSource() {
    if (impl_ && impl_->f) gzclose(impl_->f);
}

GzSource::GzSource(GzSource&&) noexcept = default;
GzSource& GzSource::operator=(GzSource&&) noexcept = default;

std::size_t GzSource::read(void* dst, std::size_t n) {
    int got = gzread(impl_->f, dst, static_cast<unsigned>(n));
    if (got < 0) {
        int errnum = 0;
        const char* msg = gzerror(impl_->f, &errnum);
        throw std::runtime_error(std::string("gzip read error: ") + (msg ? msg : "?"));
    }
    offset_ += static_cast<std::uint64_t>(got);
    return static_cast<std::size_t>(got);
}

std::optional<std::span<const std::uint8_t>> FrameReader::next() {
    frame_offset_ = src_.offset();
    std::uint8_t hdr[2];
    std::size_t got = src_.read(hdr, 2);
    if (got == 0) return std::nullopt;
    if (got != 2)
        throw DecodeError(DecodeError::Kind::TruncatedFrame, frame_offset_,
                          "truncated frame header at byte " + std::to_string(frame_offset_));
    std::size_t len = read_u16(hdr);
    if (len == 0)
        throw DecodeError(DecodeError::Kind::TruncatedFrame, frame_offset_,
                          "zero-length frame at byte " + std::to_string(frame_offset_));
    buf_.resize(len);
    got = src_.read(buf_.data(), len);
    if (got != len)
        throw DecodeError(DecodeError::Kind::TruncatedFrame, frame_offset_,
                          "truncated frame payload at byte " + std::to_string(frame_offset_));
    return std::span<const std::uint8_t>(buf_.data(), len);
}

MarketEvent decode_message(std::span<const std::uint8_t> payload, std::uint32_t seconds_base,
                           std::uint64_t frame_offset) {
    MarketEvent ev;
    const std::uint8_t* p = payload.data();
    const char type = static_cast<char>(p[0]);
    const int want = frame_size(type);

    if (want < 0) {
        // Unsupported administrative message: keep the timestamp, skip the rest.
        ev.kind = EventKind::Other;
        ev.code = type;
        std::uint32_t ns = payload.size() >= 5 ? read_u32(p + 1) : 0;
        ev.timestamp_ns = static_cast<Nanos>(seconds_base) * 1'000'000'000 + ns;
        return ev;
    }
    if (static_cast<int>(payload.size()) != want)
        throw DecodeError(DecodeError::Kind::LengthMismatch, frame_offset,
                          std::string("message '") + type + "' has payload " +
                              std::to_string(payload.size()) + " bytes, expected " +
                              std::to_string(want) + " at byte " + std::to_string(frame_offset));

    if (type == 'T') {
        ev.kind = EventKind::Seconds;
        ev.timestamp_ns = static_cast<Nanos>(read_u32(p + 1)) * 1'000'000'000;
        return ev;
    }

    ev.timestamp_ns = static_cast<Nanos>(seconds_base) * 1'000'000'000 + read_u32(p + 1);
    switch (type) {
        case 'S':
            ev.kind = EventKind::SystemEvent;
            ev.code = static_cast<char>(p[5]);
            break;
        case 'A':
        case 'F':
            ev.kind = type == 'A' ? EventKind::AddOrder : EventKind::AddOrderMpid;
            ev.order_ref = read_u64(p + 5);
            ev.side = static_cast<char>(p[13]) == 'B' ? Side::Buy : Side::Sell;
            ev.shares = read_u32(p + 14);
            std::memcpy(ev.stock.data(), p + 18, 8);
            ev.price = Price4(read_u32(p + 26));
            break;
        case 'E':
            ev.kind = EventKind::OrderExecuted;
            ev.order_ref = read_u64(p + 5);
            ev.shares = read_u32(p + 13);
            ev.match_number = read_u64(p + 17);
            break;
        case 'C':
            ev.kind = EventKind::OrderExecutedWithPrice;
            ev.order_ref = read_u64(p + 5);
            ev.shares = read_u32(p + 13);
            ev.match_number = read_u64(p + 17);
            ev.printable = static_cast<char>(p[25]) == 'Y';
            ev.price = Price4(read_u32(p + 26));
            break;
        case 'X':
            ev.kind = EventKind::OrderCancel;
            ev.order_ref = read_u64(p + 5);
            ev.shares = read_u32(p + 13);
            break;
        case 'D':
            ev.kind = EventKind::OrderDelete;
            ev.order_ref = read_u64(p + 5);
            break;
        case 'U':
            ev.kind = EventKind::OrderReplace;
            ev.order_ref = read_u64(p + 5);
            ev.new_ref = read_u64(p + 13);
            ev.shares = read_u32(p + 21);
            ev.price = Price4(read_u32(p + 25));
            break;
        case 'P':
            ev.kind = EventKind::NonDisplayedTrade;
            ev.order_ref = read_u64(p + 5);
            ev.side = static_cast<char>(p[13]) == 'B' ? Side::Buy : Side::Sell;
            ev.shares = read_u32(p + 14);
            std::memcpy(ev.stock.data(), p + 18, 8);
            ev.price = Price4(read_u32(p + 26));
            ev.match_number = read_u64(p + 30);
            break;
        default: break;
    }
    return ev;
}

EventReader::EventReader(const std::string& path, std::vector<std::string> symbols)
    : frames_(path), filtered_(true) {
    symbols_.reserve(symbols.size());
    for (const auto& s : symbols) symbols_.push_back(pad_stock(s));
}

bool EventReader::wanted(const MarketEvent& ev) {
    if (!filtered_) return true;
    switch (ev.kind) {
        case EventKind::Seconds:
        case EventKind::SystemEvent:
            return true;
        case EventKind::AddOrder:
        case EventKind::AddOrderMpid:
        case EventKind::NonDisplayedTrade: {
            bool mine = std::find(symbols_.begin(), symbols_.end(), ev.stock) != symbols_.end();
            if (mine && ev.order_ref != 0) tracked_refs_.insert(ev.order_ref);
            return mine;
        }
        case EventKind::OrderExecuted:
        case EventKind::OrderExecutedWithPrice:
        case EventKind::OrderCancel:
            return tracked_refs_.count(ev.order_ref) != 0;
        case EventKind::OrderDelete: {
            auto it = tracked_refs_.find(ev.order_ref);
            if (it == tracked_refs_.end()) return false;
            tracked_refs_.erase(it);
            return true;
        }
        case EventKind::OrderReplace: {
            auto it = tracked_refs_.find(ev.order_ref);
            if (it == tracked_refs_.end()) return false;
            tracked_refs_.erase(it);
            tracked_refs_.insert(ev.new_ref);
            return true;
        }
        case EventKind::Other:
            return false;
    }
    return false;
}

std::optional<MarketEvent> EventReader::next() {
    for (;;) {
        auto frame = frames_.next();
        if (!frame) return std::nullopt;
        ++frames_read_;
        MarketEvent ev = decode_message(*frame, seconds_base_, frames_.frame_offset());
        if (ev.kind == EventKind::Seconds)
            seconds_base_ = static_cast<std::uint32_t>(ev.timestamp_ns / 1'000'000'000);
        if (wanted(ev)) return ev;
    }
}

} // namespace bookflow::itch
