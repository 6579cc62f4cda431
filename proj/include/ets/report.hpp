#pragma once

#include <ets/error.hpp>
#include <ets/exchange.hpp>
#include <ets/ledger.hpp>
#include <ets/scenario.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace ets {

/// One row per organisation: balances plus its compliance position.
inline std::string balances_csv(const Ledger& ledger)
{
    std::string out = "org,role,permit,emission,cash,outstanding,compliant\n";
    for (const auto& [id, org] : ledger.state().registry.orgs()) {
        const auto c = ledger.compliance_check(id);
        out += id.str() + "," + std::string(org.role.to_string()) + "," + org.permit.to_string() + ","
               + org.emission.to_string() + "," + org.cash.to_string() + "," + c.outstanding_emissions.to_string()
               + "," + (c.compliant ? "true" : "false") + "\n";
    }
    return out;
}

inline std::string run_report(const Scenario& s, const RunResult& r)
{
    std::string out = "scenario " + s.name + "\n";
    out += "actions " + std::to_string(s.action_count()) + ", timestamps " + std::to_string(s.timestamp_count())
           + ", chain entries " + std::to_string(r.chain.size()) + "\n";
    for (const auto& st : r.steps) {
        out += "step " + std::to_string(st.index) + " " + st.time + " " + st.action + " ";
        if (st.seq)
            out += "seq=" + std::to_string(*st.seq) + " ";
        if (st.error)
            out += std::string(to_string(*st.error)) + " ";
        out += st.ok ? "ok" : "FAILED";
        if (!st.detail.empty())
            out += " (" + st.detail + ")";
        out += "\n";
    }
    const auto& ex = r.ledger.state().exchange;
    if (ex.active)
        out += "exchange supply " + ex.supply.to_string() + ", reserve " + ex.reserve.to_string() + ", price "
               + current_price(ex).to_string() + "\n";
    out += "market price " + r.ledger.state().market_price.to_string() + "\n";
    out += std::string("trial balance ") + (trial_balance_closes(r.journal.trial_balance()) ? "closes" : "DOES NOT CLOSE")
           + "\n";
    out += std::string("result ") + (r.success() ? "ok" : "FAILED") + "\n";
    return out;
}

/// `points` evenly spaced supplies from `min` to `max` inclusive, with the
/// spot price at each.
inline std::vector<std::pair<double, double>> price_curve(double fraction, double s0, double c0, double min,
                                                          double max, int points)
{
    require(points >= 2, ErrorCode::InvalidRange, "need at least 2 points");
    require(std::isfinite(min) && std::isfinite(max) && min > 0 && min < max, ErrorCode::InvalidRange,
            "need 0 < min < max");
    require(valid_fraction(fraction), ErrorCode::InvalidFraction, "reserve fraction must be in (0, 1]");
    require(s0 > 0 && c0 > 0, ErrorCode::InvalidSupply, "baseline supply and reserve must be positive");
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double s = i + 1 == points ? max : min + (max - min) * i / (points - 1);
        out.emplace_back(s, curve::price(fraction, s0, c0, s));
    }
    return out;
}

inline std::string price_curve_csv(const std::vector<std::pair<double, double>>& curve)
{
    std::string out = "supply,price\n";
    char buf[96];
    for (const auto& [s, p] : curve) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", s, p);
        out += buf;
    }
    return out;
}

} // namespace ets
