#pragma once

// Naive reference book: a flat order list rescanned on every event. No
// indexes, no level structure; every query is a linear pass. Slow and
// obviously correct, which is the point -- the production engine must
// match it event for event.

#include <cstdint>
#include <optional>
#include <vector>

#include "bookflow/book.hpp"
#include "bookflow/itch.hpp"

namespace bookflow::testing {

class ReferenceBook {
public:
    void apply(const itch::MarketEvent& ev);

    std::vector<OrderBook::FlatOrder> flatten() const;
    const std::vector<Trade>& trades() const { return trades_; }
    std::optional<Price4> last_trade_price() const { return p_last_; }
    std::uint64_t unknown_refs() const { return unknown_refs_; }
    std::uint64_t best_touched_terminated() const { return touched_terminated_; }
    std::uint64_t best_touched_cancelled() const { return touched_cancelled_; }

    std::optional<BestLevel> best(Side side) const;

private:
    struct RefOrder {
        std::uint64_t ref;
        Side side;
        std::uint32_t price_raw;
        std::uint32_t shares;
        Nanos origination_ns;
        bool touched_best = false;
    };

    RefOrder* find(std::uint64_t ref);
    void erase(std::uint64_t ref, bool exec);
    void mark_best();

    std::vector<RefOrder> orders_;
    std::vector<Trade> trades_;
    std::optional<Price4> p_last_;
    std::uint64_t unknown_refs_ = 0;
    std::uint64_t touched_terminated_ = 0;
    std::uint64_t touched_cancelled_ = 0;
};

} // namespace bookflow::testing
