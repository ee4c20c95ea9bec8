#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace bookflow {

// Nanoseconds since midnight. Signed so that differences are painless.
using Nanos = std::int64_t;

inline constexpr double kNanosPerSecond = 1e9;
inline constexpr double kNanosPerHour = 3.6e12;

inline constexpr double hours_from_ns(Nanos t) { return static_cast<double>(t) / kNanosPerHour; }
inline constexpr double seconds_from_ns(Nanos t) { return static_cast<double>(t) / kNanosPerSecond; }
inline constexpr Nanos ns_from_seconds(double s) { return static_cast<Nanos>(s * kNanosPerSecond); }

enum class Side : std::uint8_t { Buy, Sell };

inline Side opposite(Side s) { return s == Side::Buy ? Side::Sell : Side::Buy; }

// Price in units of 1/10000 USD (the ITCH fixed-point convention).
struct Price4 {
    std::uint32_t raw = 0;

    constexpr Price4() = default;
    constexpr explicit Price4(std::uint32_t r) : raw(r) {}

    static constexpr Price4 from_dollars_exact(long cents_x100) {
        return Price4(static_cast<std::uint32_t>(cents_x100));
    }

    double dollars() const { return raw / 10000.0; }
    auto operator<=>(const Price4&) const = default;
};

// Signed tick difference, in 1/10000 USD.
inline std::int64_t ticks_between(Price4 a, Price4 b) {
    return static_cast<std::int64_t>(a.raw) - static_cast<std::int64_t>(b.raw);
}

inline double dollars_between(Price4 a, Price4 b) { return ticks_between(a, b) / 10000.0; }

// 8-character space-padded stock symbol, as it appears on the wire.
using StockField = std::array<char, 8>;

inline StockField pad_stock(std::string_view name) {
    StockField f{' ', ' ', ' ', ' ', ' ', ' ', ' ', ' '};
    for (std::size_t i = 0; i < f.size() && i < name.size(); ++i) f[i] = name[i];
    return f;
}

inline std::string trim_stock(const StockField& f) {
    std::size_t n = f.size();
    while (n > 0 && f[n - 1] == ' ') --n;
    return std::string(f.data(), n);
}

} // namespace bookflow
