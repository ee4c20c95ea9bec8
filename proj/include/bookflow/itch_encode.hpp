#pragma once

// Encoding side of the ITCH 4.1 capture format. The decoder is the
// production surface; encoding exists so synthetic streams can be
// written out as real capture files (and so tests can round-trip).

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bookflow/itch.hpp"

namespace bookflow::itch {

// Appends the payload (no frame header) for one event. Seconds events
// encode their own base; every other kind encodes nanoseconds within
// the current second. EventKind::Other is not encodable.
void encode_payload(const MarketEvent& ev, std::vector<std::uint8_t>& out);

// Appends u16_be length + payload.
void encode_frame(const MarketEvent& ev, std::vector<std::uint8_t>& out);

// Writes a gzip capture file. Emits 'T' frames automatically whenever
// the event clock crosses a second boundary, so callers only provide
// the substantive stream.
class GzCaptureWriter {
public:
    explicit GzCaptureWriter(const std::string& path);
    ~GzCaptureWriter();
    GzCaptureWriter(const GzCaptureWriter&) = delete;
    GzCaptureWriter& operator=(const GzCaptureWriter&) = delete;

    void write(const MarketEvent& ev);
    void close();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

void write_capture(const std::string& path, std::span<const MarketEvent> events);

} // namespace bookflow::itch
