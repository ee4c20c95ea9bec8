#pragma once

// Replay pipeline: decoded events -> book -> one attribute row per book
// modification, streamed as CSV. Shared by the command-line tool and the
// integration tests.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>

#include "bookflow/attributes.hpp"
#include "bookflow/book.hpp"
#include "bookflow/edge_quadrature.hpp"
#include "bookflow/exec_flow.hpp"

namespace bookflow {

struct RunConfig {
    std::string input_path;
    std::string symbol;
    double tau_s = 128.0;
    int n_basis = 7;
    double cutoff_dollars = 1.0;
    int radau_nodes = 10;
    double sliding_window_s = 64.0;
    double from_hours = -std::numeric_limits<double>::infinity();
    double to_hours = std::numeric_limits<double>::infinity();
    int edge_every_n = 1; // recompute edge quadrature every n-th row
};

// One output row. Column order is frozen; see kCsvHeader.
struct AttributeRow {
    AttributeSample book_sample;
    double i_sliding = 0;
    std::optional<double> i_now;       // sliding-window fallback during warm-up
    std::optional<double> lambda_min, lambda_max, c_max_sq;
    std::optional<double> v_christoffel_buy, v_christoffel_sell;
    std::optional<double> tau_edge_buy, tau_edge_sell;
};

extern const char* const kCsvSchemaComment; // "# schema=1 ..."
extern const char* const kCsvHeader;

void write_csv_row(std::ostream& os, const AttributeRow& row);

// Turns BookUpdates into attribute rows. Owns the flow estimator and
// the edge-quadrature throttle (rows between refreshes repeat the last
// computed edge values).
class AttributeEngine {
public:
    explicit AttributeEngine(const RunConfig& cfg);

    // Pins the flow clock to the first event of the session (updates may
    // start later).
    void note_event_time(Nanos t) {
        if (!flow_.started()) flow_.advance_to(t);
    }

    // Feed one book update; returns the row (regardless of time range --
    // callers apply the range filter).
    AttributeRow on_update(const BookUpdate& update);

    const FlowState& flow() const { return flow_; }

private:
    void edge_side(const OrderBook& book, Side side, Nanos now, std::optional<double>& vol,
                   std::optional<double>& tau, const std::optional<double>& raw_tau);

    RunConfig cfg_;
    FlowState flow_;
    SlidingRate sliding_;
    std::uint64_t rows_seen_ = 0;
    std::optional<double> held_v_buy_, held_v_sell_, held_tau_buy_, held_tau_sell_;
};

struct ReplayResult {
    SessionStats stats;
    std::uint64_t rows_emitted = 0;
    std::uint64_t events_seen = 0;
};

// Replays an event source through a fresh book and writes CSV rows to
// `csv`. When `csv` is null the rows are computed but not printed
// (benchmark mode). Header lines are the caller's business.
using EventSource = std::function<std::optional<itch::MarketEvent>()>;
ReplayResult replay(const EventSource& source, const RunConfig& cfg, std::ostream* csv);

// Convenience wrappers used by the CLI.
ReplayResult dump_capture(const RunConfig& cfg, std::ostream& csv);
ReplayResult dump_events(std::span<const itch::MarketEvent> events, const RunConfig& cfg,
                         std::ostream* csv);

void print_summary(std::ostream& os, const ReplayResult& result, const RunConfig& cfg);

} // namespace bookflow
