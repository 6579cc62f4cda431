#pragma once

#include <ets/error.hpp>

#include <cfloat>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace ets {

/// Decimal fixed-point amount with six fractional digits, stored as a signed
/// count of micro-units. The tag keeps token quantities and stablecoin amounts
/// from being mixed by accident.
template <typename Tag>
class Fixed {
public:
    using raw_type = std::int64_t;
    static constexpr raw_type scale = 1'000'000;
    static constexpr int decimals = 6;

    constexpr Fixed() noexcept = default;

    static constexpr Fixed from_raw(raw_type raw) noexcept
    {
        Fixed f;
        f.raw_ = raw;
        return f;
    }

    static Fixed from_units(std::int64_t units)
    {
        raw_type out{};
        require(!__builtin_mul_overflow(units, scale, &out), ErrorCode::Overflow,
                "fixed-point value out of range");
        return from_raw(out);
    }

    /// Exact decimal parse: optional sign, digits, optional '.' and at most six
    /// fractional digits. No exponent, no whitespace.
    static Fixed parse(std::string_view text)
    {
        const std::string original(text);
        auto bad = [&] { return Error(ErrorCode::SchemaError, "not a decimal amount: '" + original + "'"); };
        if (text.empty())
            throw bad();
        bool negative = false;
        if (text.front() == '-' || text.front() == '+') {
            negative = text.front() == '-';
            text.remove_prefix(1);
        }
        const auto dot = text.find('.');
        const std::string_view whole = text.substr(0, dot);
        const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
        if (whole.empty() && frac.empty())
            throw bad();
        if (dot != std::string_view::npos && frac.empty())
            throw bad();
        if (frac.size() > decimals)
            throw Error(ErrorCode::SchemaError, "more than six fractional digits: '" + original + "'");

        raw_type raw = 0;
        auto push_digit = [&](char c) {
            if (c < '0' || c > '9')
                throw bad();
            if (__builtin_mul_overflow(raw, raw_type{10}, &raw) || __builtin_add_overflow(raw, raw_type{c - '0'}, &raw))
                throw Error(ErrorCode::Overflow, "amount out of range: '" + original + "'");
        };
        for (char c : whole)
            push_digit(c);
        for (char c : frac)
            push_digit(c);
        for (std::size_t i = frac.size(); i < decimals; ++i)
            push_digit('0');
        return from_raw(negative ? -raw : raw);
    }

    [[nodiscard]] constexpr raw_type raw() const noexcept { return raw_; }
    [[nodiscard]] constexpr double to_double() const noexcept { return static_cast<double>(raw_) / scale; }
    [[nodiscard]] constexpr bool is_zero() const noexcept { return raw_ == 0; }
    [[nodiscard]] constexpr bool is_negative() const noexcept { return raw_ < 0; }
    [[nodiscard]] constexpr bool is_positive() const noexcept { return raw_ > 0; }

    /// Always six fractional digits, so equal values print identically.
    [[nodiscard]] std::string to_string() const
    {
        const bool negative = raw_ < 0;
        // magnitude as unsigned to survive INT64_MIN
        const std::uint64_t mag = negative ? std::uint64_t{0} - static_cast<std::uint64_t>(raw_)
                                           : static_cast<std::uint64_t>(raw_);
        std::string frac = std::to_string(mag % scale);
        frac.insert(0, decimals - frac.size(), '0');
        return (negative ? "-" : "") + std::to_string(mag / scale) + "." + frac;
    }

    friend Fixed operator+(Fixed a, Fixed b)
    {
        raw_type out{};
        require(!__builtin_add_overflow(a.raw_, b.raw_, &out), ErrorCode::Overflow, "fixed-point addition overflow");
        return from_raw(out);
    }
    friend Fixed operator-(Fixed a, Fixed b)
    {
        raw_type out{};
        require(!__builtin_sub_overflow(a.raw_, b.raw_, &out), ErrorCode::Overflow, "fixed-point subtraction overflow");
        return from_raw(out);
    }
    friend Fixed operator-(Fixed a)
    {
        require(a.raw_ != std::numeric_limits<raw_type>::min(), ErrorCode::Overflow, "fixed-point negation overflow");
        return from_raw(-a.raw_);
    }
    Fixed& operator+=(Fixed other) { return *this = *this + other; }
    Fixed& operator-=(Fixed other) { return *this = *this - other; }

    friend constexpr auto operator<=>(Fixed, Fixed) noexcept = default;
    friend constexpr bool operator==(Fixed, Fixed) noexcept = default;

private:
    raw_type raw_ = 0;
};

template <typename Tag>
Fixed<Tag> abs(Fixed<Tag> v)
{
    return v.is_negative() ? -v : v;
}

template <typename Tag>
Fixed<Tag> min(Fixed<Tag> a, Fixed<Tag> b)
{
    return b < a ? b : a;
}

template <typename Tag>
Fixed<Tag> max(Fixed<Tag> a, Fixed<Tag> b)
{
    return a < b ? b : a;
}

struct QuantityTag {};
struct MoneyTag {};

/// Token amount; 1 token = 1 tCO2e.
using Quantity = Fixed<QuantityTag>;
/// Stablecoin amount (EUR), also used for per-token prices.
using Money = Fixed<MoneyTag>;

enum class Rounding { Down, Up, Nearest };

/// Snap a binary floating-point amount onto the 10^-6 grid. Values within a
/// few double ulps of a grid point are treated as that grid point, so
/// directed rounding does not turn `2100.0000000000002` into `2100.000001`.
/// When `units` is a difference of larger terms, pass the largest of them as
/// `magnitude`; the snap window then covers their cancellation error.
template <typename Tag>
Fixed<Tag> to_fixed(double units, Rounding mode, double magnitude = 0.0)
{
    require(std::isfinite(units), ErrorCode::Overflow, "non-finite amount");
    const double micro = units * static_cast<double>(Fixed<Tag>::scale);
    require(std::fabs(micro) < 9.0e18, ErrorCode::Overflow, "amount out of fixed-point range");
    const double nearest = std::nearbyint(micro);
    const double scale = std::fmax(std::fabs(micro), std::fabs(magnitude) * static_cast<double>(Fixed<Tag>::scale));
    const double slack = 64.0 * DBL_EPSILON * std::fmax(1.0, scale);
    double snapped = 0;
    if (std::fabs(micro - nearest) <= slack)
        snapped = nearest;
    else if (mode == Rounding::Down)
        snapped = std::floor(micro);
    else if (mode == Rounding::Up)
        snapped = std::ceil(micro);
    else
        snapped = nearest;
    return Fixed<Tag>::from_raw(static_cast<std::int64_t>(snapped));
}

/// quantity * unit price, rounded half away from zero to the money grid.
inline Money value_of(Quantity quantity, Money unit_price)
{
    const __int128 product = static_cast<__int128>(quantity.raw()) * unit_price.raw();
    const __int128 half = Quantity::scale / 2;
    const __int128 q = product >= 0 ? (product + half) / Quantity::scale : (product - half) / Quantity::scale;
    require(q <= std::numeric_limits<std::int64_t>::max() && q >= std::numeric_limits<std::int64_t>::min(),
            ErrorCode::Overflow, "money value out of range");
    return Money::from_raw(static_cast<std::int64_t>(q));
}

inline Quantity to_quantity(Money m) { return Quantity::from_raw(m.raw()); }
inline Money to_money(Quantity q) { return Money::from_raw(q.raw()); }

} // namespace ets
