#pragma once

#include <ets/domain.hpp>
#include <ets/error.hpp>
#include <ets/exchange.hpp>
#include <ets/fixed_point.hpp>
#include <ets/hash.hpp>
#include <ets/transaction.hpp>

#include <concepts>
#include <cstdint>
#include <string>
#include <utility>

namespace ets {

/// Complete ledger state. A plain value: copies are immutable snapshots that
/// can be handed to readers while the owning ledger keeps applying.
struct LedgerState {
    Registry registry;
    Quantity market_permit;
    Quantity market_emission;
    ExchangeState exchange;
    Money market_price;
    std::uint64_t seq = 0;

    friend bool operator==(const LedgerState&, const LedgerState&) = default;
};

inline constexpr std::string_view state_format_tag = "ets-state/1";

inline Bytes encode(const LedgerState& s)
{
    CanonicalWriter w;
    w.field(state_format_tag)
        .field(s.seq)
        .field(s.market_permit.raw())
        .field(s.market_emission.raw())
        .field(s.market_price.raw())
        .field(s.exchange.active)
        .field(s.exchange.fraction)
        .field(s.exchange.reserve.raw())
        .field(s.exchange.supply.raw())
        .field(s.exchange.baseline_supply.raw())
        .field(s.exchange.baseline_reserve.raw())
        .field(static_cast<std::uint64_t>(s.registry.size()));
    for (const auto& [id, org] : s.registry.orgs()) {
        w.field(std::string_view(id.str()))
            .field(org.role.to_string())
            .field(org.permit.raw())
            .field(org.emission.raw())
            .field(org.cash.raw())
            .field(static_cast<std::uint64_t>(org.projects.size()));
        for (const auto& p : org.projects)
            w.field(std::string_view(p));
    }
    return std::move(w).bytes();
}

inline Digest state_digest(const LedgerState& s, std::string_view algorithm = default_hash)
{
    return hash_bytes(algorithm, encode(s));
}

/// Σ permit balances = market permit total, Σ emission balances = market
/// emission total, and no persisted balance is negative.
inline bool conservation_holds(const LedgerState& s)
{
    Quantity permits;
    Quantity emissions;
    for (const auto& [id, org] : s.registry.orgs()) {
        if (org.permit.is_negative() || org.emission.is_negative() || org.cash.is_negative())
            return false;
        permits += org.permit;
        emissions += org.emission;
    }
    return permits == s.market_permit && emissions == s.market_emission && !s.exchange.reserve.is_negative();
}

struct ComplianceReport {
    Quantity outstanding_emissions;
    bool compliant = true;
};

template <typename P>
concept SignaturePolicy = requires(const P& p, const TxRequest& r, const LedgerState& s) {
    { p.verify(r, s) } -> std::convertible_to<bool>;
};

/// Simulation mode: the sender/signer named in a request is taken as
/// authenticated.
struct IdentitySignatures {
    bool verify(const TxRequest&, const LedgerState&) const noexcept { return true; }
};

/// The token state machine. Single writer: `apply` validates a request against
/// the current state and either commits all of its effects, assigning the next
/// sequence number, or throws and leaves the state untouched.
template <SignaturePolicy Signatures = IdentitySignatures>
class BasicLedger {
public:
    explicit BasicLedger(std::string hash_algorithm = std::string(default_hash), Signatures signatures = {})
        : hash_(std::move(hash_algorithm)), signatures_(std::move(signatures))
    {
        require(is_supported_hash(hash_), ErrorCode::UnknownHash, "unsupported hash function '" + hash_ + "'");
        refresh_digest();
    }

    BasicLedger(LedgerState genesis, std::string hash_algorithm = std::string(default_hash), Signatures signatures = {})
        : BasicLedger(std::move(hash_algorithm), std::move(signatures))
    {
        state_ = std::move(genesis);
        refresh_digest();
    }

    // -- genesis ------------------------------------------------------------

    const OrgRecord& register_org(const OrgId& id, Role role)
    {
        require_genesis();
        const auto& rec = state_.registry.register_org(id, role);
        refresh_digest();
        return rec;
    }

    const OrgRecord& register_project(const OrgId& authority, const OrgId& owner, const std::string& project_id)
    {
        require_genesis();
        const auto& rec = state_.registry.register_project(authority, owner, project_id);
        refresh_digest();
        return rec;
    }

    /// Stablecoin faucet; genesis only.
    void fund(const OrgId& id, Money cash)
    {
        require_genesis();
        require(!cash.is_negative(), ErrorCode::InvalidAmount, "faucet amount must not be negative");
        auto& org = state_.registry.mutable_at(id);
        org.cash += cash;
        refresh_digest();
    }

    void open_exchange(const OrgId& authority, double fraction, Quantity s0, Money c0)
    {
        require_genesis();
        require(state_.registry.at(authority).role.is_authority(), ErrorCode::Unauthorized,
                "only an authority can open the exchange");
        require(!state_.exchange.active, ErrorCode::ExchangeAlreadyActive, "exchange already open");
        state_.exchange = ets::open_exchange(fraction, s0, c0);
        refresh_digest();
    }

    void set_initial_price(Money price)
    {
        require_genesis();
        require(!price.is_negative(), ErrorCode::InvalidAmount, "price must not be negative");
        state_.market_price = price;
        refresh_digest();
    }

    // -- transactions -------------------------------------------------------

    Transaction apply(const TxRequest& req)
    {
        require(signatures_.verify(req, state_), ErrorCode::BadSignature,
                "signature check failed for " + std::string(to_string(req.kind)));
        LedgerState next = state_;
        TxOutcome out;
        out.pre_state = digest_;
        switch (req.kind) {
        case TxKind::SetRole: set_role(next, req); break;
        case TxKind::MintPermit: mint_permit(next, req, out); break;
        case TxKind::GrantPermit: grant_permit(next, req, out); break;
        case TxKind::MintEmission: mint_emission(next, req, out); break;
        case TxKind::TransferPermit: transfer_permit(next, req, out); break;
        case TxKind::BurnToken: burn_token(next, req, out); break;
        case TxKind::TradeToken: trade_token(next, req, out); break;
        case TxKind::ConvertCash: convert_cash(next, req, out); break;
        case TxKind::SetReserveFraction: set_reserve_fraction(next, req); break;
        case TxKind::AdjustReserve: adjust_reserve(next, req, out); break;
        case TxKind::SetPrice: set_price(next, req); break;
        }
        next.seq = state_.seq + 1;
        out.price = next.market_price;
        out.post_state = state_digest(next, hash_);

        state_ = std::move(next);
        digest_ = out.post_state;
        return Transaction{.seq = state_.seq, .request = req, .outcome = out};
    }

    [[nodiscard]] ComplianceReport compliance_check(const OrgId& id) const
    {
        const auto& org = state_.registry.at(id);
        return {.outstanding_emissions = org.emission, .compliant = org.emission.is_zero()};
    }

    [[nodiscard]] const LedgerState& state() const noexcept { return state_; }
    [[nodiscard]] LedgerState snapshot() const { return state_; }
    [[nodiscard]] const Digest& digest() const noexcept { return digest_; }
    [[nodiscard]] const std::string& hash_algorithm() const noexcept { return hash_; }
    [[nodiscard]] const OrgRecord& org(const OrgId& id) const { return state_.registry.at(id); }

private:
    void require_genesis() const
    {
        require(state_.seq == 0, ErrorCode::GenesisSealed, "genesis operations are only allowed before the first transaction");
    }

    void refresh_digest() { digest_ = state_digest(state_, hash_); }

    static void require_amount(Quantity q)
    {
        require(!q.is_zero(), ErrorCode::ZeroAmount, "amount must be non-zero");
        require(q.is_positive(), ErrorCode::InvalidAmount, "amount must be positive");
    }

    static const OrgId& target_of(const TxRequest& r)
    {
        require(r.target.has_value(), ErrorCode::SchemaError, std::string(to_string(r.kind)) + " needs a target");
        return *r.target;
    }

    static void set_role(LedgerState& s, const TxRequest& r)
    {
        const auto& sender = s.registry.at(r.sender);
        auto& target = s.registry.mutable_at(target_of(r));
        require(sender.role.is_authority(), ErrorCode::Unauthorized,
                "'" + r.sender.str() + "' is not an authority and cannot change roles");
        const auto role = Role::from_string(r.role);
        require(role.has_value(), ErrorCode::SchemaError, "unknown role '" + r.role + "'");
        require(target.role != *role, ErrorCode::NoChange,
                "'" + target.id.str() + "' already has role " + std::string(role->to_string()));
        target.role = *role;
    }

    static void mint_permit(LedgerState& s, const TxRequest& r, TxOutcome& out)
    {
        const auto& signer = s.registry.at(r.sender);
        auto& target = s.registry.mutable_at(target_of(r));
        require(signer.role.is_authority(), ErrorCode::Unauthorized, "only authorities can mint permits");
        require_amount(r.quantity);
        target.permit += r.quantity;
        s.market_permit += r.quantity;
        out.permit_delta = r.quantity;
    }

    static void grant_permit(LedgerState& s, const TxRequest& r, TxOutcome& out)
    {
        const auto& signer = s.registry.at(r.sender);
        auto& target = s.registry.mutable_at(target_of(r));
        require(signer.role.is_verifier(), ErrorCode::Unauthorized, "only verifiers can grant permits");
        require_amount(r.quantity);
        require(target.has_project(), ErrorCode::NoProject, "'" + target.id.str() + "' owns no emission-reducing project");
        target.permit += r.quantity;
        s.market_permit += r.quantity;
        out.permit_delta = r.quantity;
    }

    static void mint_emission(LedgerState& s, const TxRequest& r, TxOutcome& out)
    {
        require(r.cosigner.has_value(), ErrorCode::Unauthorized, "mintEmission must be co-signed by a verifier");
        auto& sender = s.registry.mutable_at(r.sender);
        const auto& signer = s.registry.at(*r.cosigner);
        require(signer.role.is_verifier(), ErrorCode::Unauthorized, "mintEmission must be co-signed by a verifier");
        require(sender.role.is_enterprise(), ErrorCode::Unauthorized, "only enterprises report emissions");
        require_amount(r.quantity);
        sender.emission += r.quantity;
        s.market_emission += r.quantity;
        out.emission_delta = r.quantity;
    }

    static void transfer_permit(LedgerState& s, const TxRequest& r, TxOutcome& out)
    {
        auto& sender = s.registry.mutable_at(r.sender);
        (void)s.registry.at(target_of(r)); // existence check
        require_amount(r.quantity);
        require(r.quantity <= sender.permit, ErrorCode::InsufficientBalance,
                "'" + sender.id.str() + "' holds " + sender.permit.to_string() + " permits");
        sender.permit -= r.quantity;
        s.registry.mutable_at(*r.target).permit += r.quantity;
        out.permit_delta = r.quantity;
    }

    static void burn_token(LedgerState& s, const TxRequest& r, TxOutcome& out)
    {
        auto& sender = s.registry.mutable_at(r.sender);
        require_amount(r.quantity);
        require(r.quantity <= sender.permit, ErrorCode::InsufficientBalance,
                "'" + sender.id.str() + "' holds " + sender.permit.to_string() + " permits");
        // Beyond the emission balance the excess is a voluntary surrender.
        const Quantity retired = min(r.quantity, sender.emission);
        sender.emission -= retired;
        sender.permit -= r.quantity;
        s.market_permit -= r.quantity;
        s.market_emission -= retired;
        out.permit_delta = -r.quantity;
        out.emission_delta = -retired;
    }

    static void trade_token(LedgerState& s, const TxRequest& r, TxOutcome& out)
    {
        auto& sender = s.registry.mutable_at(r.sender);
        require(!r.quantity.is_zero(), ErrorCode::ZeroAmount, "trade amount must be non-zero");
        require(s.exchange.active, ErrorCode::ExchangeInactive, "exchange has not been opened");
        if (r.quantity.is_negative())
            require(abs(r.quantity) <= sender.permit, ErrorCode::InsufficientBalance,
                    "'" + sender.id.str() + "' holds " + sender.permit.to_string() + " permits");
        const Quote q = quote_buy_tokens(s.exchange, r.quantity);
        if (q.cash_delta.is_positive())
            require(q.cash_delta <= sender.cash, ErrorCode::InsufficientCash,
                    "'" + sender.id.str() + "' has " + sender.cash.to_string() + ", needs " + q.cash_delta.to_string());
        settle_trade(s, sender, q, out);
    }

    static void convert_cash(LedgerState& s, const TxRequest& r, TxOutcome& out)
    {
        auto& sender = s.registry.mutable_at(r.sender);
        require(!r.money.is_zero(), ErrorCode::ZeroAmount, "cash amount must be non-zero");
        require(s.exchange.active, ErrorCode::ExchangeInactive, "exchange has not been opened");
        if (r.money.is_positive())
            require(r.money <= sender.cash, ErrorCode::InsufficientCash,
                    "'" + sender.id.str() + "' has " + sender.cash.to_string());
        const Quote q = quote_spend_cash(s.exchange, r.money);
        if (q.tokens_delta.is_negative())
            require(abs(q.tokens_delta) <= sender.permit, ErrorCode::InsufficientBalance,
                    "withdrawing " + abs(r.money).to_string() + " needs " + abs(q.tokens_delta).to_string()
                        + " permits, '" + sender.id.str() + "' holds " + sender.permit.to_string());
        settle_trade(s, sender, q, out);
    }

    static void settle_trade(LedgerState& s, OrgRecord& sender, const Quote& q, TxOutcome& out)
    {
        sender.permit += q.tokens_delta;
        s.market_permit += q.tokens_delta;
        sender.cash -= q.cash_delta;
        s.exchange = settle(s.exchange, q);
        out.permit_delta = q.tokens_delta;
        out.cash_delta = -q.cash_delta;
    }

    static void set_reserve_fraction(LedgerState& s, const TxRequest& r)
    {
        require(s.registry.at(r.sender).role.is_authority(), ErrorCode::Unauthorized,
                "only authorities can change the reserve fraction");
        s.exchange = with_fraction(s.exchange, r.fraction);
    }

    static void adjust_reserve(LedgerState& s, const TxRequest& r, TxOutcome& out)
    {
        require(s.registry.at(r.sender).role.is_authority(), ErrorCode::Unauthorized,
                "only authorities can adjust the reserve");
        s.exchange = with_reserve_delta(s.exchange, r.money);
        out.cash_delta = r.money;
    }

    static void set_price(LedgerState& s, const TxRequest& r)
    {
        require(r.money.is_positive(), ErrorCode::InvalidAmount, "market price must be positive");
        s.market_price = r.money;
    }

    LedgerState state_;
    std::string hash_;
    Signatures signatures_;
    Digest digest_{};
};

using Ledger = BasicLedger<>;

} // namespace ets
