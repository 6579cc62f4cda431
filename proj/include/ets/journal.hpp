#pragma once

#include <ets/chainlog.hpp>
#include <ets/domain.hpp>
#include <ets/fixed_point.hpp>
#include <ets/transaction.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ets {

enum class Account {
    EmissionPermitAllowances,
    EmissionPermitCredits,
    EmissionPermit,
    DeferredIncome,
    EmissionRights,
    GainOnRevaluation,
    LossOnRevaluation,
    Income,
    ExpensesEmissions,
    PermitSurrenderable,
    Cash,
};

enum class AccountClass { Asset, Liability, Equity };
enum class Side { Dr, Cr };

inline constexpr std::array all_accounts{
    Account::EmissionPermitAllowances, Account::EmissionPermitCredits, Account::EmissionPermit,
    Account::DeferredIncome,           Account::EmissionRights,        Account::GainOnRevaluation,
    Account::LossOnRevaluation,        Account::Income,                Account::ExpensesEmissions,
    Account::PermitSurrenderable,      Account::Cash,
};

constexpr std::string_view account_name(Account a) noexcept
{
    switch (a) {
    case Account::EmissionPermitAllowances: return "Emission permit - Allowances";
    case Account::EmissionPermitCredits: return "Emission permit - Credits";
    case Account::EmissionPermit: return "Emission permit";
    case Account::DeferredIncome: return "Deferred income";
    case Account::EmissionRights: return "Emission rights";
    case Account::GainOnRevaluation: return "Gain on revaluation";
    case Account::LossOnRevaluation: return "Loss on revaluation";
    case Account::Income: return "Income";
    case Account::ExpensesEmissions: return "Expenses - Emissions";
    case Account::PermitSurrenderable: return "Permit surrenderable";
    case Account::Cash: return "Cash";
    }
    return "?";
}

inline std::optional<Account> account_from_name(std::string_view name) noexcept
{
    for (auto a : all_accounts)
        if (account_name(a) == name)
            return a;
    return std::nullopt;
}

constexpr AccountClass account_class(Account a) noexcept
{
    switch (a) {
    case Account::EmissionPermitAllowances:
    case Account::EmissionPermitCredits:
    case Account::EmissionPermit:
    case Account::Cash: return AccountClass::Asset;
    case Account::DeferredIncome:
    case Account::EmissionRights:
    case Account::PermitSurrenderable: return AccountClass::Liability;
    case Account::GainOnRevaluation:
    case Account::LossOnRevaluation:
    case Account::Income:
    case Account::ExpensesEmissions: return AccountClass::Equity;
    }
    return AccountClass::Equity;
}

constexpr std::string_view to_string(AccountClass c) noexcept
{
    switch (c) {
    case AccountClass::Asset: return "Asset";
    case AccountClass::Liability: return "Liability";
    case AccountClass::Equity: return "Equity";
    }
    return "?";
}

constexpr std::string_view to_string(Side s) noexcept { return s == Side::Dr ? "Dr" : "Cr"; }

struct JournalLine {
    Account account;
    Side side;
    Money amount;

    friend bool operator==(const JournalLine&, const JournalLine&) = default;
};

struct JournalEntry {
    std::uint64_t event_ref = 0;
    OrgId org;
    std::vector<JournalLine> lines;

    [[nodiscard]] Money total(Side side) const
    {
        Money sum;
        for (const auto& l : lines)
            if (l.side == side)
                sum += l.amount;
        return sum;
    }
    [[nodiscard]] bool balanced() const { return total(Side::Dr) == total(Side::Cr); }
    [[nodiscard]] Money amount_of(Account account, Side side) const
    {
        Money sum;
        for (const auto& l : lines)
            if (l.account == account && l.side == side)
                sum += l.amount;
        return sum;
    }

    friend bool operator==(const JournalEntry&, const JournalEntry&) = default;
};

/// Tokens held at one valuation. `issuance_price` is set only for tokens
/// received free of charge (allocated or granted), which carry deferred income.
struct HoldingLot {
    Quantity quantity;
    Money carrying_price;
    std::optional<Money> issuance_price;

    friend bool operator==(const HoldingLot&, const HoldingLot&) = default;
};

/// Accrued obligation to surrender permits, in tokens and in booked value.
struct Surrenderable {
    Quantity quantity;
    Money amount;

    friend bool operator==(const Surrenderable&, const Surrenderable&) = default;
};

using TrialBalance = std::map<Account, Money>; // Dr - Cr per account

/// Fair-value carbon accounting as a fold over applied transactions. Lots are
/// costed FIFO and re-marked to market at every price checkpoint.
class Journal {
public:
    /// Books one transaction; returns the entries it produced (possibly none).
    std::vector<JournalEntry> apply(const Transaction& t)
    {
        std::vector<JournalEntry> out;
        const auto& r = t.request;
        const auto& o = t.outcome;
        switch (r.kind) {
        case TxKind::SetPrice: revalue(t.seq, o.price, out); break;
        case TxKind::MintPermit: issue(t.seq, *r.target, o.permit_delta, o.price, Account::EmissionPermitAllowances, out); break;
        case TxKind::GrantPermit: issue(t.seq, *r.target, o.permit_delta, o.price, Account::EmissionPermitCredits, out); break;
        case TxKind::TransferPermit: transfer(t.seq, r.sender, *r.target, o.permit_delta, out); break;
        case TxKind::MintEmission: recognise_emission(t.seq, r.sender, o.emission_delta, o.price, out); break;
        case TxKind::TradeToken:
        case TxKind::ConvertCash: trade(t.seq, r.sender, o.permit_delta, o.cash_delta, o.price, out); break;
        case TxKind::BurnToken: burn(t.seq, r.sender, -o.permit_delta, o.price, out); break;
        case TxKind::SetRole:
        case TxKind::SetReserveFraction:
        case TxKind::AdjustReserve: break;
        }
        price_ = o.price;
        entries_.insert(entries_.end(), out.begin(), out.end());
        return out;
    }

    [[nodiscard]] const std::vector<JournalEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] Money price() const noexcept { return price_; }

    [[nodiscard]] const std::deque<HoldingLot>& lots(const OrgId& org) const
    {
        static const std::deque<HoldingLot> none;
        auto it = lots_.find(org);
        return it == lots_.end() ? none : it->second;
    }

    [[nodiscard]] Quantity holdings(const OrgId& org) const
    {
        Quantity q;
        for (const auto& lot : lots(org))
            q += lot.quantity;
        return q;
    }

    [[nodiscard]] Surrenderable surrenderable(const OrgId& org) const
    {
        auto it = accrued_.find(org);
        return it == accrued_.end() ? Surrenderable{} : it->second;
    }

    [[nodiscard]] const std::map<OrgId, std::deque<HoldingLot>>& all_lots() const noexcept { return lots_; }

    /// Whole-book balances, or one organisation's when `org` is given.
    [[nodiscard]] TrialBalance trial_balance(const std::optional<OrgId>& org = std::nullopt) const
    {
        TrialBalance tb;
        for (auto a : all_accounts)
            tb[a] = Money{};
        for (const auto& e : entries_) {
            if (org && e.org != *org)
                continue;
            for (const auto& l : e.lines)
                tb[l.account] += l.side == Side::Dr ? l.amount : -l.amount;
        }
        return tb;
    }

    friend bool operator==(const Journal&, const Journal&) = default;

private:
    static void push(std::vector<JournalEntry>& out, std::uint64_t ref, const OrgId& org, Account dr, Account cr,
                     Money amount)
    {
        if (amount.is_zero())
            return;
        if (amount.is_negative()) {
            std::swap(dr, cr);
            amount = -amount;
        }
        out.push_back({ref, org, {{dr, Side::Dr, amount}, {cr, Side::Cr, amount}}});
    }

    struct Disposal {
        std::vector<HoldingLot> taken;
        Money deferred_value; // Σ taken quantity × issuance price
    };

    /// Removes `quantity` from the front of the org's lots.
    Disposal dispose(const OrgId& org, Quantity quantity)
    {
        Disposal d;
        auto& lots = lots_[org];
        while (quantity.is_positive() && !lots.empty()) {
            auto& front = lots.front();
            HoldingLot part = front;
            part.quantity = min(front.quantity, quantity);
            front.quantity -= part.quantity;
            quantity -= part.quantity;
            if (part.issuance_price)
                d.deferred_value += value_of(part.quantity, *part.issuance_price);
            d.taken.push_back(part);
            if (front.quantity.is_zero())
                lots.pop_front();
        }
        if (lots.empty())
            lots_.erase(org);
        return d;
    }

    void revalue(std::uint64_t ref, Money new_price, std::vector<JournalEntry>& out)
    {
        for (auto& [org, lots] : lots_) {
            Money delta;
            for (auto& lot : lots) {
                delta += value_of(lot.quantity, new_price - lot.carrying_price);
                lot.carrying_price = new_price;
            }
            // gain: Dr asset / Cr gain; loss is the mirror image
            if (delta.is_positive())
                push(out, ref, org, Account::EmissionPermit, Account::GainOnRevaluation, delta);
            else if (delta.is_negative())
                push(out, ref, org, Account::LossOnRevaluation, Account::EmissionPermit, -delta);
        }
    }

    void issue(std::uint64_t ref, const OrgId& org, Quantity q, Money p, Account asset, std::vector<JournalEntry>& out)
    {
        push(out, ref, org, asset, Account::DeferredIncome, value_of(q, p));
        lots_[org].push_back({q, p, p});
    }

    void transfer(std::uint64_t ref, const OrgId& from, const OrgId& to, Quantity q, std::vector<JournalEntry>& out)
    {
        auto d = dispose(from, q);
        push(out, ref, from, Account::DeferredIncome, Account::EmissionRights, d.deferred_value);
        auto& dest = lots_[to];
        for (const auto& part : d.taken)
            dest.push_back({part.quantity, part.carrying_price, std::nullopt});
    }

    /// Deferred income is released at the issuance prices of the oldest
    /// free-of-charge lots currently held, covering at most `q` tokens.
    void recognise_emission(std::uint64_t ref, const OrgId& org, Quantity q, Money p, std::vector<JournalEntry>& out)
    {
        Money release;
        Quantity remaining = q;
        for (const auto& lot : lots(org)) {
            if (!remaining.is_positive())
                break;
            if (!lot.issuance_price)
                continue;
            const Quantity part = min(remaining, lot.quantity);
            release += value_of(part, *lot.issuance_price);
            remaining -= part;
        }
        push(out, ref, org, Account::DeferredIncome, Account::Income, release);

        const Money expense = value_of(q, p);
        push(out, ref, org, Account::ExpensesEmissions, Account::PermitSurrenderable, expense);
        auto& acc = accrued_[org];
        acc.quantity += q;
        acc.amount += expense;
    }

    void trade(std::uint64_t ref, const OrgId& org, Quantity tokens, Money cash_change, Money p,
               std::vector<JournalEntry>& out)
    {
        if (tokens.is_positive()) {
            push(out, ref, org, Account::EmissionPermit, Account::Cash, -cash_change);
            lots_[org].push_back({tokens, p, std::nullopt});
        } else {
            push(out, ref, org, Account::Cash, Account::EmissionPermit, cash_change);
            auto d = dispose(org, -tokens);
            push(out, ref, org, Account::DeferredIncome, Account::Income, d.deferred_value);
        }
    }

    /// Surrender settles the accrued obligation first; anything beyond it is a
    /// voluntary surrender expensed directly. The settled obligation is then
    /// re-measured from its booked value to the surrender value.
    void burn(std::uint64_t ref, const OrgId& org, Quantity q, Money p, std::vector<JournalEntry>& out)
    {
        dispose(org, q);
        auto& acc = accrued_[org];
        const Quantity settled = min(q, acc.quantity);
        const Money settled_booked =
            settled == acc.quantity
                ? acc.amount
                : Money::from_raw(static_cast<std::int64_t>(static_cast<__int128>(acc.amount.raw()) * settled.raw()
                                                            / acc.quantity.raw()));
        const Money against_liability = value_of(settled, p);
        const Money voluntary = value_of(q - settled, p);

        JournalEntry e{ref, org, {}};
        if (against_liability.is_positive())
            e.lines.push_back({Account::PermitSurrenderable, Side::Dr, against_liability});
        if (voluntary.is_positive())
            e.lines.push_back({Account::ExpensesEmissions, Side::Dr, voluntary});
        if (const Money total = against_liability + voluntary; total.is_positive())
            e.lines.push_back({Account::EmissionPermit, Side::Cr, total});
        if (!e.lines.empty())
            out.push_back(std::move(e));

        push(out, ref, org, Account::PermitSurrenderable, Account::ExpensesEmissions, settled_booked - against_liability);

        acc.quantity -= settled;
        acc.amount -= settled_booked;
        if (acc.quantity.is_zero() && acc.amount.is_zero())
            accrued_.erase(org);
    }

    std::vector<JournalEntry> entries_;
    std::map<OrgId, std::deque<HoldingLot>> lots_;
    std::map<OrgId, Surrenderable> accrued_;
    Money price_;
};

/// Lines for export: event order, then Dr before Cr, then account name.
inline std::vector<std::pair<std::uint64_t, JournalLine>> ordered_lines(const std::vector<JournalEntry>& entries)
{
    std::vector<std::pair<std::uint64_t, JournalLine>> lines;
    for (const auto& e : entries)
        for (const auto& l : e.lines)
            lines.emplace_back(e.event_ref, l);
    std::stable_sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first < b.first;
        if (a.second.side != b.second.side)
            return a.second.side == Side::Dr;
        return account_name(a.second.account) < account_name(b.second.account);
    });
    return lines;
}

/// eventRef,account,class,side,amount
inline std::string journal_csv(const std::vector<JournalEntry>& entries)
{
    std::string out = "eventRef,account,class,side,amount\n";
    for (const auto& [ref, l] : ordered_lines(entries)) {
        out += std::to_string(ref);
        out += ',';
        out += account_name(l.account);
        out += ',';
        out += to_string(account_class(l.account));
        out += ',';
        out += to_string(l.side);
        out += ',';
        out += l.amount.to_string();
        out += '\n';
    }
    return out;
}

/// Assets (Dr - Cr) equal liabilities plus equity (Cr - Dr).
inline bool trial_balance_closes(const TrialBalance& tb)
{
    Money assets;
    Money claims;
    for (const auto& [account, net] : tb) {
        if (account_class(account) == AccountClass::Asset)
            assets += net;
        else
            claims -= net;
    }
    return assets == claims;
}

inline Journal journal_from_log(const ChainLog& log)
{
    Journal j;
    for (const auto& e : log.entries())
        j.apply(e.transaction());
    return j;
}

} // namespace ets
