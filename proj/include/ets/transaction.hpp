#pragma once

#include <ets/domain.hpp>
#include <ets/error.hpp>
#include <ets/fixed_point.hpp>
#include <ets/hash.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace ets {

enum class TxKind {
    SetRole,
    MintPermit,
    GrantPermit,
    MintEmission,
    TransferPermit,
    BurnToken,
    TradeToken,
    ConvertCash,
    SetReserveFraction,
    AdjustReserve,
    SetPrice,
};

inline constexpr std::array<std::pair<TxKind, std::string_view>, 11> tx_kind_names{{
    {TxKind::SetRole, "setRole"},
    {TxKind::MintPermit, "mintPermit"},
    {TxKind::GrantPermit, "grantPermit"},
    {TxKind::MintEmission, "mintEmission"},
    {TxKind::TransferPermit, "transferPermit"},
    {TxKind::BurnToken, "burnToken"},
    {TxKind::TradeToken, "tradeToken"},
    {TxKind::ConvertCash, "convertCash"},
    {TxKind::SetReserveFraction, "setReserveFraction"},
    {TxKind::AdjustReserve, "adjustReserve"},
    {TxKind::SetPrice, "setPrice"},
}};

constexpr std::string_view to_string(TxKind kind) noexcept
{
    for (const auto& [k, name] : tx_kind_names)
        if (k == kind)
            return name;
    return "unknown";
}

inline std::optional<TxKind> tx_kind_from_string(std::string_view name) noexcept
{
    for (const auto& [k, n] : tx_kind_names)
        if (n == name)
            return k;
    return std::nullopt;
}

/// What a caller asks the ledger to do. Which fields matter depends on `kind`:
///
///   setRole             sender, target, role
///   mintPermit          sender (signer), target, quantity
///   grantPermit         sender (signer), target, quantity
///   mintEmission        sender, cosigner (verifier), quantity
///   transferPermit      sender, target, quantity
///   burnToken           sender, quantity
///   tradeToken          sender, quantity (signed; < 0 sells)
///   convertCash         sender, money (signed; < 0 withdraws cash)
///   setReserveFraction  sender (authority), fraction
///   adjustReserve       sender (authority), money (signed)
///   setPrice            money (market price checkpoint)
struct TxRequest {
    TxKind kind = TxKind::SetPrice;
    std::string time;
    OrgId sender;
    std::optional<OrgId> cosigner;
    std::optional<OrgId> target;
    Quantity quantity;
    Money money;
    std::string role;
    double fraction = 0.0;

    friend bool operator==(const TxRequest&, const TxRequest&) = default;
};

/// Effects recorded with an applied transaction. Deltas are for the party whose
/// balance moves: the target for issuance and transfers, otherwise the sender.
/// For adjustReserve `cash_delta` is the reserve change.
struct TxOutcome {
    Quantity permit_delta;
    Money cash_delta;
    Quantity emission_delta;
    Money price;
    Digest pre_state{};
    Digest post_state{};

    friend bool operator==(const TxOutcome&, const TxOutcome&) = default;
};

struct Transaction {
    std::uint64_t seq = 0;
    TxRequest request;
    TxOutcome outcome;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

namespace tx {

inline TxRequest set_role(OrgId sender, OrgId target, std::string role)
{
    return {.kind = TxKind::SetRole, .sender = std::move(sender), .target = std::move(target), .role = std::move(role)};
}
inline TxRequest mint_permit(OrgId signer, OrgId target, Quantity amount)
{
    return {.kind = TxKind::MintPermit, .sender = std::move(signer), .target = std::move(target), .quantity = amount};
}
inline TxRequest grant_permit(OrgId signer, OrgId target, Quantity amount)
{
    return {.kind = TxKind::GrantPermit, .sender = std::move(signer), .target = std::move(target), .quantity = amount};
}
inline TxRequest mint_emission(OrgId sender, OrgId signer, Quantity amount)
{
    return {.kind = TxKind::MintEmission, .sender = std::move(sender), .cosigner = std::move(signer), .quantity = amount};
}
inline TxRequest transfer_permit(OrgId sender, OrgId target, Quantity amount)
{
    return {.kind = TxKind::TransferPermit, .sender = std::move(sender), .target = std::move(target), .quantity = amount};
}
inline TxRequest burn_token(OrgId sender, Quantity amount)
{
    return {.kind = TxKind::BurnToken, .sender = std::move(sender), .quantity = amount};
}
inline TxRequest trade_token(OrgId sender, Quantity amount)
{
    return {.kind = TxKind::TradeToken, .sender = std::move(sender), .quantity = amount};
}
inline TxRequest convert_cash(OrgId sender, Money amount)
{
    return {.kind = TxKind::ConvertCash, .sender = std::move(sender), .money = amount};
}
inline TxRequest set_reserve_fraction(OrgId authority, double fraction)
{
    return {.kind = TxKind::SetReserveFraction, .sender = std::move(authority), .fraction = fraction};
}
inline TxRequest adjust_reserve(OrgId authority, Money delta)
{
    return {.kind = TxKind::AdjustReserve, .sender = std::move(authority), .money = delta};
}
inline TxRequest set_price(Money price)
{
    return {.kind = TxKind::SetPrice, .money = price};
}

} // namespace tx

inline constexpr std::string_view tx_format_tag = "ets-tx/1";

/// Canonical byte encoding hashed into the chain. Field order is fixed; see
/// the README for the byte layout.
inline Bytes encode(const Transaction& t)
{
    const auto& r = t.request;
    const auto& o = t.outcome;
    CanonicalWriter w;
    w.field(tx_format_tag)
        .field(t.seq)
        .field(std::string_view(r.time))
        .field(to_string(r.kind))
        .field(std::string_view(r.sender.str()))
        .field(std::string_view(r.cosigner ? r.cosigner->str() : std::string{}))
        .field(std::string_view(r.target ? r.target->str() : std::string{}))
        .field(r.quantity.raw())
        .field(r.money.raw())
        .field(std::string_view(r.role))
        .field(r.fraction)
        .field(o.permit_delta.raw())
        .field(o.cash_delta.raw())
        .field(o.emission_delta.raw())
        .field(o.price.raw())
        .field(std::span<const std::uint8_t>(o.pre_state))
        .field(std::span<const std::uint8_t>(o.post_state));
    return std::move(w).bytes();
}

inline Transaction decode_transaction(std::span<const std::uint8_t> bytes)
{
    CanonicalReader in(bytes);
    require(in.string() == tx_format_tag, ErrorCode::ChainInvalid, "unsupported transaction encoding");
    Transaction t;
    t.seq = in.u64();
    auto& r = t.request;
    r.time = in.string();
    const auto kind_name = in.string();
    const auto kind = tx_kind_from_string(kind_name);
    require(kind.has_value(), ErrorCode::ChainInvalid, "unknown transaction kind '" + kind_name + "'");
    r.kind = *kind;
    auto org = [](std::string s) { return s.empty() ? OrgId{} : OrgId(std::move(s)); };
    auto opt_org = [](std::string s) { return s.empty() ? std::nullopt : std::optional<OrgId>(OrgId(std::move(s))); };
    r.sender = org(in.string());
    r.cosigner = opt_org(in.string());
    r.target = opt_org(in.string());
    r.quantity = Quantity::from_raw(in.i64());
    r.money = Money::from_raw(in.i64());
    r.role = in.string();
    r.fraction = in.f64();
    auto& o = t.outcome;
    o.permit_delta = Quantity::from_raw(in.i64());
    o.cash_delta = Money::from_raw(in.i64());
    o.emission_delta = Quantity::from_raw(in.i64());
    o.price = Money::from_raw(in.i64());
    o.pre_state = in.digest();
    o.post_state = in.digest();
    require(in.done(), ErrorCode::ChainInvalid, "trailing bytes after transaction");
    return t;
}

} // namespace ets
