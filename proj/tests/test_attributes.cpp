#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bookflow/attributes.hpp"
#include "bookflow/synth.hpp"

using namespace bookflow;

TEST_CASE("midprice") {
    CHECK(midprice(Price4(100'000), Price4(100'200)).value() ==
          doctest::Approx(10.01).epsilon(1e-12));
    CHECK(midprice(Price4(100'000), Price4(100'000)).value() ==
          doctest::Approx(10.00).epsilon(1e-12)); // locked book
    CHECK(!midprice(Price4(100'000), std::nullopt).has_value());
    CHECK(!midprice(std::nullopt, Price4(100'000)).has_value());
}

TEST_CASE("disbalance formula and edge cases") {
    CHECK(disbalance(100, 100).value() == doctest::Approx(0.0));
    CHECK(disbalance(0, 300).value() == doctest::Approx(1.0));
    CHECK(disbalance(300, 100).value() == doctest::Approx(-0.5));
    CHECK(!disbalance(0, 0).has_value());
}

TEST_CASE("time in book is a size-weighted mean age") {
    std::vector<Order> one = {{1, 100, 0, false}};
    CHECK(time_in_book(one, ns_from_seconds(5)).value() == doctest::Approx(5.0));

    std::vector<Order> two = {{1, 100, 0, false}, {2, 300, ns_from_seconds(8), false}};
    // 100 sh aged 10 s + 300 sh aged 2 s -> (1000+600)/400 = 4 s
    CHECK(time_in_book(two, ns_from_seconds(10)).value() == doctest::Approx(4.0));

    CHECK(!time_in_book({}, 100).has_value());
}

TEST_CASE("time in book equals a flat recomputation on random levels") {
    synth::Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const Nanos now = ns_from_seconds(1000.0 + rng.uniform() * 1000.0);
        std::vector<Order> orders;
        const int n = 1 + static_cast<int>(rng.integer(20));
        for (int i = 0; i < n; ++i)
            orders.push_back(Order{static_cast<std::uint64_t>(i + 1),
                                   static_cast<std::uint32_t>(1 + rng.integer(5000)),
                                   ns_from_seconds(rng.uniform() * 1000.0), false});
        double ws = 0, total = 0;
        for (const auto& o : orders) {
            ws += double(o.shares) * seconds_from_ns(now - o.origination_ns);
            total += o.shares;
        }
        CHECK(time_in_book(orders, now).value() ==
              doctest::Approx(ws / total).epsilon(1e-12));
    }
}

TEST_CASE("edge prices are signed distances from the last print") {
    auto e = edge_prices(Price4(99'900), Price4(100'100), Price4(100'000));
    CHECK(e.buy_minus_last.value() == doctest::Approx(-0.01));
    CHECK(e.sell_minus_last.value() == doctest::Approx(+0.01));

    auto locked = edge_prices(Price4(100'000), Price4(100'200), Price4(100'000));
    CHECK(locked.buy_minus_last.value() == doctest::Approx(0.0));
    CHECK(locked.sell_minus_last.value() == doctest::Approx(0.02));

    auto none = edge_prices(Price4(1), Price4(2), std::nullopt);
    CHECK(!none.buy_minus_last.has_value());
    CHECK(!none.sell_minus_last.has_value());
}

TEST_CASE("property: disbalance antisymmetry and bounds") {
    synth::Rng rng(77);
    for (int i = 0; i < 10'000; ++i) {
        const auto a = rng.integer(100'000);
        const auto b = rng.integer(100'000);
        auto ab = disbalance(a, b);
        auto ba = disbalance(b, a);
        REQUIRE(ab.has_value() == ba.has_value());
        if (!ab) continue;
        CHECK(std::abs(*ab) <= 1.0);
        CHECK(*ab == doctest::Approx(-*ba).epsilon(1e-12));
    }
}

TEST_CASE("property: midprice translation equivariance") {
    synth::Rng rng(78);
    for (int i = 0; i < 10'000; ++i) {
        const std::uint32_t pb = 1000 + static_cast<std::uint32_t>(rng.integer(1'000'000));
        const std::uint32_t ps = pb + static_cast<std::uint32_t>(rng.integer(10'000));
        const std::uint32_t shift = static_cast<std::uint32_t>(rng.integer(100'000));
        const double base = midprice(Price4(pb), Price4(ps)).value();
        const double moved = midprice(Price4(pb + shift), Price4(ps + shift)).value();
        CHECK(moved - base == doctest::Approx(shift / 10000.0).epsilon(1e-9));
    }
}

TEST_CASE("property: time in book is invariant under order splitting") {
    synth::Rng rng(79);
    for (int i = 0; i < 10'000; ++i) {
        const Nanos now = ns_from_seconds(5000);
        const std::uint32_t shares = 2 + static_cast<std::uint32_t>(rng.integer(10'000));
        const Nanos orig = ns_from_seconds(rng.uniform() * 4999.0);
        std::vector<Order> whole = {{1, shares, orig, false}};
        const std::uint32_t cut = 1 + static_cast<std::uint32_t>(rng.integer(shares - 1));
        std::vector<Order> split = {{1, cut, orig, false}, {2, shares - cut, orig, false}};
        CHECK(time_in_book(whole, now).value() ==
              doctest::Approx(time_in_book(split, now).value()).epsilon(1e-12));
    }
}
