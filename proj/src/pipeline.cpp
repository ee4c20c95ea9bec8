#include "bookflow/pipeline.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <ostream>

namespace bookflow {

const char* const kCsvSchemaComment = "# schema=1 raw order-book attributes, nan = absent";
const char* const kCsvHeader =
    "t_hours,t_ns,p_last,p_buy,p_sell,p_buy_minus_last,p_sell_minus_last,"
    "v_best_buy,v_best_sell,eta_disbalance,t_book_buy_s,t_book_sell_s,"
    "i_sliding,i_now,lambda_min,lambda_max,c_max_sq,"
    "v_christoffel_buy,v_christoffel_sell,tau_edge_buy,tau_edge_sell";

namespace {

class RowBuffer {
public:
    void reset() { len_ = 0; }

    void raw(const char* s) {
        const std::size_t n = std::strlen(s);
        std::memcpy(buf_ + len_, s, n);
        len_ += n;
    }
    void sep() { buf_[len_++] = ','; }
    void real(double v, const char* fmt = "%.9g") {
        len_ += static_cast<std::size_t>(
            std::snprintf(buf_ + len_, sizeof(buf_) - len_, fmt, v));
    }
    void opt(const std::optional<double>& v, const char* fmt = "%.9g") {
        if (v)
            real(*v, fmt);
        else
            raw("nan");
    }
    void price(const std::optional<Price4>& p) {
        if (p)
            real(p->dollars(), "%.4f");
        else
            raw("nan");
    }
    void integer(std::uint64_t v) {
        len_ += static_cast<std::size_t>(
            std::snprintf(buf_ + len_, sizeof(buf_) - len_, "%" PRIu64, v));
    }
    void write_line(std::ostream& os) {
        buf_[len_++] = '\n';
        os.write(buf_, static_cast<std::streamsize>(len_));
    }

private:
    char buf_[1024];
    std::size_t len_ = 0;
};

} // namespace

void write_csv_row(std::ostream& os, const AttributeRow& row) {
    const AttributeSample& s = row.book_sample;
    static thread_local RowBuffer b;
    b.reset();
    b.real(s.time_decimal_hours, "%.9f");
    b.sep();
    b.integer(static_cast<std::uint64_t>(s.time_ns));
    b.sep();
    b.price(s.p_last);
    b.sep();
    b.price(s.p_buy);
    b.sep();
    b.price(s.p_sell);
    b.sep();
    b.opt(s.p_buy_minus_last, "%.4f");
    b.sep();
    b.opt(s.p_sell_minus_last, "%.4f");
    b.sep();
    b.integer(s.v_best_buy);
    b.sep();
    b.integer(s.v_best_sell);
    b.sep();
    b.opt(s.eta_disbalance);
    b.sep();
    b.opt(s.t_in_book_buy_s);
    b.sep();
    b.opt(s.t_in_book_sell_s);
    b.sep();
    b.real(row.i_sliding);
    b.sep();
    b.opt(row.i_now);
    b.sep();
    b.opt(row.lambda_min);
    b.sep();
    b.opt(row.lambda_max);
    b.sep();
    b.opt(row.c_max_sq);
    b.sep();
    b.opt(row.v_christoffel_buy);
    b.sep();
    b.opt(row.v_christoffel_sell);
    b.sep();
    b.opt(row.tau_edge_buy);
    b.sep();
    b.opt(row.tau_edge_sell);
    b.write_line(os);
}

AttributeEngine::AttributeEngine(const RunConfig& cfg)
    : cfg_(cfg),
      flow_(FlowConfig{cfg.tau_s, cfg.n_basis, 16.0}),
      sliding_(cfg.sliding_window_s) {}

void AttributeEngine::edge_side(const OrderBook& book, Side side, Nanos now,
                                std::optional<double>& vol, std::optional<double>& tau,
                                const std::optional<double>& raw_tau) {
    vol.reset();
    tau.reset();
    auto measure = build_measure(book, side, now, cfg_.cutoff_dollars);
    if (!measure) return;

    if (auto rule = radau_rule(*measure, cfg_.radau_nodes))
        vol = christoffel_volume(*rule);
    else if (auto best = book.best(side))
        vol = static_cast<double>(best->volume); // non-finite moments: raw volume

    if (auto t = rn_tau_at_edge(*measure))
        tau = t;
    else
        tau = raw_tau; // singular Gram: raw best-level time-in-book
}

AttributeRow AttributeEngine::on_update(const BookUpdate& update) {
    for (const Trade& tr : update.recent_trades) {
        flow_.advance_to(tr.time_ns);
        flow_.add_trade(tr.shares);
        sliding_.observe(tr.time_ns, tr.shares);
    }
    flow_.advance_to(update.time_ns);

    AttributeRow row;
    row.book_sample = sample_book(update.book, update.time_ns);
    row.i_sliding = sliding_.rate_at(update.time_ns);

    if (auto reading = flow_.reading()) {
        row.i_now = reading->i_now;
        row.lambda_min = reading->lambda_min;
        row.lambda_max = reading->lambda_max;
        row.c_max_sq = reading->c_max_sq;
    } else {
        row.i_now = row.i_sliding; // warm-up fallback
    }

    if (rows_seen_ % static_cast<std::uint64_t>(std::max(1, cfg_.edge_every_n)) == 0) {
        edge_side(update.book, Side::Buy, update.time_ns, held_v_buy_, held_tau_buy_,
                  row.book_sample.t_in_book_buy_s);
        edge_side(update.book, Side::Sell, update.time_ns, held_v_sell_, held_tau_sell_,
                  row.book_sample.t_in_book_sell_s);
    }
    ++rows_seen_;

    row.v_christoffel_buy = held_v_buy_;
    row.v_christoffel_sell = held_v_sell_;
    row.tau_edge_buy = held_tau_buy_;
    row.tau_edge_sell = held_tau_sell_;
    return row;
}

ReplayResult replay(const EventSource& source, const RunConfig& cfg, std::ostream* csv) {
    OrderBook book(cfg.symbol);
    AttributeEngine engine(cfg);
    ReplayResult result;

    auto counted = [&]() {
        auto ev = source();
        if (ev) {
            ++result.events_seen;
            engine.note_event_time(ev->timestamp_ns);
        }
        return ev;
    };

    run_session(counted, book, [&](const BookUpdate& update) {
        AttributeRow row = engine.on_update(update);
        const double h = row.book_sample.time_decimal_hours;
        if (h >= cfg.from_hours && h < cfg.to_hours) {
            ++result.rows_emitted;
            if (csv) write_csv_row(*csv, row);
        }
    });

    result.stats = book.stats();
    return result;
}

ReplayResult dump_capture(const RunConfig& cfg, std::ostream& csv) {
    itch::EventReader reader(cfg.input_path, {cfg.symbol});
    csv << kCsvSchemaComment << '\n' << kCsvHeader << '\n';
    return replay([&reader]() { return reader.next(); }, cfg, &csv);
}

ReplayResult dump_events(std::span<const itch::MarketEvent> events, const RunConfig& cfg,
                         std::ostream* csv) {
    if (csv) *csv << kCsvSchemaComment << '\n' << kCsvHeader << '\n';
    std::size_t i = 0;
    return replay(
        [&]() -> std::optional<itch::MarketEvent> {
            if (i == events.size()) return std::nullopt;
            return events[i++];
        },
        cfg, csv);
}

void print_summary(std::ostream& os, const ReplayResult& result, const RunConfig& cfg) {
    const SessionStats& st = result.stats;
    os << "events=" << result.events_seen << " book_updates=" << st.book_updates
       << " rows=" << result.rows_emitted << " adds=" << st.adds
       << " executions=" << st.executions << " cancels=" << st.cancels
       << " deletes=" << st.deletes << " replaces=" << st.replaces
       << " hidden_trades=" << st.hidden_trades << " trades=" << st.trades
       << " trade_volume=" << st.trade_volume << " unknown_refs=" << st.unknown_refs
       << " crossed=" << st.crossed_after_event;
    if (auto ratio = cancellation_ratio(st))
        os << " cancellation_ratio=" << *ratio;
    else
        os << " cancellation_ratio=n/a";
    os << " symbol=" << cfg.symbol << '\n';
}

} // namespace bookflow
