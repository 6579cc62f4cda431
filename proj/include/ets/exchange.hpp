#pragma once

#include <ets/error.hpp>
#include <ets/fixed_point.hpp>

#include <cmath>
#include <string>

namespace ets {

/// Closed-form constant-reserve-fraction curve in plain doubles. These are the
/// reference formulas; the fixed-point quoting below is layered on top.
///
/// With reserve fraction F and baseline (s0, C0):
///   C(s) = C0 * (s / s0)^(1/F)              reserve backing supply s
///   P(s) = C0 / (F * s) * (s / s0)^(1/F)    marginal price, P = dC/ds
///   t(e) = C0 * ((1 + e / s0)^(1/F) - 1)    cash to move supply s0 -> s0 + e
///   e(t) = s0 * ((t / C0 + 1)^F - 1)        tokens for cash t (inverse of t(e))
namespace curve {

inline double reserve(double fraction, double s0, double c0, double supply)
{
    return c0 * std::pow(supply / s0, 1.0 / fraction);
}

inline double price(double fraction, double s0, double c0, double supply)
{
    return c0 / (fraction * supply) * std::pow(supply / s0, 1.0 / fraction);
}

// Both use expm1/log1p: (1+x)^k - 1 evaluated naively loses most of its
// digits for small trades.
inline double cash_for_tokens(double fraction, double s0, double c0, double tokens)
{
    return c0 * std::expm1(std::log1p(tokens / s0) / fraction);
}

inline double tokens_for_cash(double fraction, double s0, double c0, double cash)
{
    return s0 * std::expm1(fraction * std::log1p(cash / c0));
}

/// Supply at which the curve's reserve equals `reserve_amount`.
inline double supply_at_reserve(double fraction, double s0, double c0, double reserve_amount)
{
    return s0 * std::pow(reserve_amount / c0, fraction);
}

} // namespace curve

struct ExchangeState {
    double fraction = 1.0;   // F, in (0, 1]
    Money reserve;           // C, stablecoin held by the exchange
    Quantity supply;         // outstanding supply priced by the curve
    Quantity baseline_supply; // s0 at the last rebase
    Money baseline_reserve;  // C0 at the last rebase
    bool active = false;

    friend bool operator==(const ExchangeState&, const ExchangeState&) = default;
};

inline bool valid_fraction(double f) noexcept { return std::isfinite(f) && f > 0.0 && f <= 1.0; }

/// Bootstraps the curve at (F, s0, C0); the baseline starts at the same point.
inline ExchangeState open_exchange(double fraction, Quantity s0, Money c0)
{
    require(valid_fraction(fraction), ErrorCode::InvalidFraction, "reserve fraction must lie in (0, 1]");
    require(s0.is_positive(), ErrorCode::InvalidSupply, "initial supply must be positive");
    require(c0.is_positive(), ErrorCode::ReserveExhausted, "initial reserve must be positive");
    return ExchangeState{
        .fraction = fraction,
        .reserve = c0,
        .supply = s0,
        .baseline_supply = s0,
        .baseline_reserve = c0,
        .active = true,
    };
}

/// Curve reserve at `supply` measured from the state's baseline.
inline double curve_reserve(const ExchangeState& st, Quantity supply)
{
    return curve::reserve(st.fraction, st.baseline_supply.to_double(), st.baseline_reserve.to_double(),
                          supply.to_double());
}

/// Price per token at `supply`, rounded to the nearest micro-euro.
inline Money spot_price(const ExchangeState& st, Quantity supply)
{
    require(supply.is_positive(), ErrorCode::InvalidSupply, "supply must be positive");
    require(valid_fraction(st.fraction), ErrorCode::InvalidFraction, "reserve fraction must lie in (0, 1]");
    require(st.baseline_supply.is_positive() && st.baseline_reserve.is_positive(), ErrorCode::InvalidSupply,
            "exchange baseline is not initialised");
    return to_fixed<MoneyTag>(curve::price(st.fraction, st.baseline_supply.to_double(),
                                           st.baseline_reserve.to_double(), supply.to_double()),
                              Rounding::Nearest);
}

inline Money current_price(const ExchangeState& st) { return spot_price(st, st.supply); }

struct Quote {
    Quantity tokens_delta; // bought (+) or sold (-)
    Money cash_delta;      // paid in (+) or received (-)
    Money price_after;     // spot price at the post-trade supply (zero when supply drains)
};

namespace detail {

inline Money price_or_zero(const ExchangeState& st, Quantity supply)
{
    return supply.is_positive() ? spot_price(st, supply) : Money{};
}

inline void require_active(const ExchangeState& st)
{
    require(st.active, ErrorCode::ExchangeInactive, "exchange has not been opened");
}

} // namespace detail

/// Cash for `tokens` (negative: proceeds of a sale). The buyer's cost rounds
/// up and the seller's proceeds round down, so the reserve never ends below
/// the curve. A trade whose cash leg rounds to nothing is refused.
inline Quote quote_buy_tokens(const ExchangeState& st, Quantity tokens)
{
    detail::require_active(st);
    require(!tokens.is_zero(), ErrorCode::InvalidAmount, "token amount must be non-zero");
    const Quantity new_supply = st.supply + tokens;
    require(!new_supply.is_negative(), ErrorCode::InvalidAmount,
            "cannot sell " + abs(tokens).to_string() + " tokens, curve supply is " + st.supply.to_string());

    const double target = curve_reserve(st, new_supply);
    const double gap = target - st.reserve.to_double();
    const double magnitude = std::fmax(target, st.reserve.to_double());
    Money cash;
    if (tokens.is_positive()) {
        cash = max(to_fixed<MoneyTag>(gap, Rounding::Up, magnitude), Money::from_raw(1));
    } else {
        cash = -min(max(to_fixed<MoneyTag>(-gap, Rounding::Down, magnitude), Money{}), st.reserve);
        require(!cash.is_zero(), ErrorCode::InvalidAmount, "sale proceeds round to zero");
    }
    return Quote{tokens, cash, detail::price_or_zero(st, new_supply)};
}

/// Tokens for spending `cash` (negative: cash withdrawn by surrendering
/// tokens). Tokens received round down, tokens surrendered round up.
inline Quote quote_spend_cash(const ExchangeState& st, Money cash)
{
    detail::require_active(st);
    require(!cash.is_zero(), ErrorCode::InvalidAmount, "cash amount must be non-zero");
    require(!cash.is_negative() || abs(cash) <= st.reserve, ErrorCode::ReserveExhausted,
            "cannot withdraw " + abs(cash).to_string() + ", reserve is " + st.reserve.to_string());

    const Money new_reserve = st.reserve + cash;
    const double target_supply = curve::supply_at_reserve(st.fraction, st.baseline_supply.to_double(),
                                                          st.baseline_reserve.to_double(), new_reserve.to_double());
    const double gap = target_supply - st.supply.to_double();
    const double magnitude = std::fmax(target_supply, st.supply.to_double());
    Quantity tokens;
    if (cash.is_positive()) {
        tokens = to_fixed<QuantityTag>(gap, Rounding::Down, magnitude);
        require(tokens.is_positive(), ErrorCode::InvalidAmount, "cash buys less than one micro-token");
    } else {
        tokens = -min(max(to_fixed<QuantityTag>(-gap, Rounding::Up, magnitude), Quantity::from_raw(1)), st.supply);
    }
    return Quote{tokens, cash, detail::price_or_zero(st, st.supply + tokens)};
}

/// State after settling a quote against the reserve.
inline ExchangeState settle(ExchangeState st, const Quote& q)
{
    st.supply += q.tokens_delta;
    st.reserve += q.cash_delta;
    require(!st.reserve.is_negative(), ErrorCode::ReserveExhausted, "reserve would become negative");
    return st;
}

/// Market-adjustment rebase: the current point becomes the new baseline.
inline ExchangeState rebase(ExchangeState st)
{
    require(st.supply.is_positive(), ErrorCode::InvalidSupply, "cannot rebase an exchange with no supply");
    require(st.reserve.is_positive(), ErrorCode::ReserveExhausted, "cannot rebase an exchange with no reserve");
    st.baseline_supply = st.supply;
    st.baseline_reserve = st.reserve;
    return st;
}

/// Lowering F raises the price at the current supply.
inline ExchangeState with_fraction(ExchangeState st, double fraction)
{
    detail::require_active(st);
    require(valid_fraction(fraction), ErrorCode::InvalidFraction, "reserve fraction must lie in (0, 1]");
    st.fraction = fraction;
    return rebase(st);
}

/// Adding reserve raises the price proportionally at fixed supply and F.
inline ExchangeState with_reserve_delta(ExchangeState st, Money delta)
{
    detail::require_active(st);
    const Money next = st.reserve + delta;
    require(next.is_positive(), ErrorCode::ReserveExhausted,
            "reserve must stay positive (" + st.reserve.to_string() + " + " + delta.to_string() + ")");
    st.reserve = next;
    return rebase(st);
}

} // namespace ets
