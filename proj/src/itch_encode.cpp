#include "bookflow/itch_encode.hpp"

#include <zlib.h>

#include <stdexcept>

namespace bookflow::itch {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
    put_u32(out, static_cast<std::uint32_t>(v));
}

} // namespace

void encode_payload(const MarketEvent& ev, std::vector<std::uint8_t>& out) {
    const auto ns = static_cast<std::uint32_t>(ev.timestamp_ns % 1'000'000'000);
    switch (ev.kind) {
        case EventKind::Seconds:
            out.push_back('T');
            put_u32(out, static_cast<std::uint32_t>(ev.timestamp_ns / 1'000'000'000));
            break;
        case EventKind::SystemEvent:
            out.push_back('S');
            put_u32(out, ns);
            out.push_back(static_cast<std::uint8_t>(ev.code));
            break;
        case EventKind::AddOrder:
        case EventKind::AddOrderMpid:
            out.push_back(ev.kind == EventKind::AddOrder ? 'A' : 'F');
            put_u32(out, ns);
            put_u64(out, ev.order_ref);
            out.push_back(ev.side == Side::Buy ? 'B' : 'S');
            put_u32(out, ev.shares);
            out.insert(out.end(), ev.stock.begin(), ev.stock.end());
            put_u32(out, ev.price.raw);
            if (ev.kind == EventKind::AddOrderMpid)
                for (int i = 0; i < 4; ++i) out.push_back(' ');
            break;
        case EventKind::OrderExecuted:
            out.push_back('E');
            put_u32(out, ns);
            put_u64(out, ev.order_ref);
            put_u32(out, ev.shares);
            put_u64(out, ev.match_number);
            break;
        case EventKind::OrderExecutedWithPrice:
            out.push_back('C');
            put_u32(out, ns);
            put_u64(out, ev.order_ref);
            put_u32(out, ev.shares);
            put_u64(out, ev.match_number);
            out.push_back(ev.printable ? 'Y' : 'N');
            put_u32(out, ev.price.raw);
            break;
        case EventKind::OrderCancel:
            out.push_back('X');
            put_u32(out, ns);
            put_u64(out, ev.order_ref);
            put_u32(out, ev.shares);
            break;
        case EventKind::OrderDelete:
            out.push_back('D');
            put_u32(out, ns);
            put_u64(out, ev.order_ref);
            break;
        case EventKind::OrderReplace:
            out.push_back('U');
            put_u32(out, ns);
            put_u64(out, ev.order_ref);
            put_u64(out, ev.new_ref);
            put_u32(out, ev.shares);
            put_u32(out, ev.price.raw);
            break;
        case EventKind::NonDisplayedTrade:
            out.push_back('P');
            put_u32(out, ns);
            put_u64(out, ev.order_ref);
            out.push_back(ev.side == Side::Buy ? 'B' : 'S');
            put_u32(out, ev.shares);
            out.insert(out.end(), ev.stock.begin(), ev.stock.end());
            put_u32(out, ev.price.raw);
            put_u64(out, ev.match_number);
            break;
        case EventKind::Other:
            throw std::logic_error("EventKind::Other is not encodable");
    }
}

void encode_frame(const MarketEvent& ev, std::vector<std::uint8_t>& out) {
    const std::size_t mark = out.size();
    put_u16(out, 0);
    encode_payload(ev, out);
    const std::size_t len = out.size() - mark - 2;
    out[mark] = static_cast<std::uint8_t>(len >> 8);
    out[mark + 1] = static_cast<std::uint8_t>(len);
}

struct GzCaptureWriter::Impl {
    gzFile f = nullptr;
    std::int64_t current_second = -1;
    std::vector<std::uint8_t> buf;
};

GzCaptureWriter::GzCaptureWriter(const std::string& path) : impl_(std::make_unique<Impl>()) {
    impl_->f = gzopen(path.c_str(), "wb");
    if (!impl_->f) throw std::runtime_error("cannot create capture file: " + path);
    gzbuffer(impl_->f, 1 << 18);
}

GzCaptureWriter::~GzCaptureWriter() { close(); }

void GzCaptureWriter::close() {
    if (impl_ && impl_->f) {
        gzclose(impl_->f);
        impl_->f = nullptr;
    }
}

void GzCaptureWriter::write(const MarketEvent& ev) {
    auto& im = *impl_;
    im.buf.clear();
    const std::int64_t sec = ev.timestamp_ns / 1'000'000'000;
    if (ev.kind != EventKind::Seconds && sec != im.current_second) {
        MarketEvent tick;
        tick.kind = EventKind::Seconds;
        tick.timestamp_ns = sec * 1'000'000'000;
        encode_frame(tick, im.buf);
        im.current_second = sec;
    } else if (ev.kind == EventKind::Seconds) {
        im.current_second = sec;
    }
    encode_frame(ev, im.buf);
    if (gzwrite(im.f, im.buf.data(), static_cast<unsigned>(im.buf.size())) !=
        static_cast<int>(im.buf.size()))
        throw std::runtime_error("gzip write failed");
}

void write_capture(const std::string& path, std::span<const MarketEvent> events) {
    GzCaptureWriter w(path);
    for (const auto& ev : events) w.write(ev);
    w.close();
}

} // namespace bookflow::itch
