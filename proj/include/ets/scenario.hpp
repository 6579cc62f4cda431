#pragma once

#include <ets/chainlog.hpp>
#include <ets/domain.hpp>
#include <ets/error.hpp>
#include <ets/fixed_point.hpp>
#include <ets/journal.hpp>
#include <ets/ledger.hpp>
#include <ets/transaction.hpp>

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ets {

struct OrgSpec {
    OrgId id;
    Role role = Role::enterprise();
    Money cash;
};

struct ProjectSpec {
    OrgId authority;
    OrgId owner;
    std::string id;
};

struct ExchangeSpec {
    OrgId authority;
    double fraction = 1.0;
    Quantity supply;
    Money reserve;
};

struct GenesisSpec {
    std::string hash = std::string(default_hash);
    std::vector<OrgSpec> orgs;
    std::vector<ProjectSpec> projects;
    std::optional<ExchangeSpec> exchange;
    std::optional<Money> price;
};

/// Inline assertion. Either on an organisation's balances / compliance, or on
/// the net (Dr - Cr) of a journal account, or on a market total.
struct Expectation {
    std::optional<OrgId> org;
    std::optional<Quantity> permit;
    std::optional<Quantity> emission;
    std::optional<Money> cash;
    std::optional<bool> compliant;
    std::optional<Account> account;
    std::optional<Money> balance;
    std::optional<Quantity> market_permit;
    std::optional<Quantity> market_emission;
};

struct Step {
    std::string time;
    int line = 0;
    std::variant<TxRequest, Expectation> action;
    std::optional<ErrorCode> expect_error;

    [[nodiscard]] bool is_transaction() const { return std::holds_alternative<TxRequest>(action); }
    [[nodiscard]] std::string_view name() const
    {
        return is_transaction() ? to_string(std::get<TxRequest>(action).kind) : std::string_view("expect");
    }
};

struct Scenario {
    std::string name;
    std::string description;
    GenesisSpec genesis;
    std::vector<Step> steps;

    /// Steps that are ledger actions; price checkpoints and assertions are not.
    [[nodiscard]] std::size_t action_count() const
    {
        return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const Step& s) {
            return s.is_transaction() && std::get<TxRequest>(s.action).kind != TxKind::SetPrice;
        }));
    }

    [[nodiscard]] std::size_t timestamp_count() const
    {
        std::set<std::string> times;
        for (const auto& s : steps)
            times.insert(s.time);
        return times.size();
    }
};

namespace yaml_detail {

inline int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

[[noreturn]] inline void schema_error(const YAML::Node& n, const std::string& what)
{
    throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_of(n)) + ": " + what);
}

inline std::string scalar(const YAML::Node& parent, const char* key)
{
    const auto n = parent[key];
    if (!n)
        schema_error(parent, std::string("missing field '") + key + "'");
    if (!n.IsScalar())
        schema_error(n, std::string("field '") + key + "' must be a scalar");
    return n.Scalar();
}

inline std::optional<std::string> optional_scalar(const YAML::Node& parent, const char* key)
{
    const auto n = parent[key];
    if (!n)
        return std::nullopt;
    if (!n.IsScalar())
        schema_error(n, std::string("field '") + key + "' must be a scalar");
    return n.Scalar();
}

template <typename T>
T fixed(const YAML::Node& parent, const char* key)
{
    const auto text = scalar(parent, key);
    try {
        return T::parse(text);
    } catch (const Error& e) {
        schema_error(parent[key], std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
std::optional<T> optional_fixed(const YAML::Node& parent, const char* key)
{
    if (!parent[key])
        return std::nullopt;
    return fixed<T>(parent, key);
}

inline double real(const YAML::Node& parent, const char* key)
{
    const auto text = scalar(parent, key);
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        schema_error(parent[key], std::string("field '") + key + "' is not a number: '" + text + "'");
    return v;
}

inline bool boolean(const YAML::Node& parent, const char* key)
{
    const auto text = scalar(parent, key);
    if (text == "true")
        return true;
    if (text == "false")
        return false;
    schema_error(parent[key], std::string("field '") + key + "' must be true or false");
}

inline OrgId org(const YAML::Node& parent, const char* key)
{
    const auto text = scalar(parent, key);
    if (text.empty())
        schema_error(parent[key], std::string("field '") + key + "' must be a non-empty organisation id");
    return OrgId(text);
}

inline void only_keys(const YAML::Node& n, std::initializer_list<std::string_view> allowed)
{
    for (const auto& kv : n) {
        const auto key = kv.first.Scalar();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            schema_error(kv.first, "unknown field '" + key + "'");
    }
}

inline GenesisSpec parse_genesis(const YAML::Node& g, std::string hash)
{
    if (!g.IsMap())
        schema_error(g, "'genesis' must be a mapping");
    only_keys(g, {"orgs", "projects", "exchange", "price"});
    GenesisSpec spec;
    spec.hash = std::move(hash);
    if (!is_supported_hash(spec.hash))
        schema_error(g, "unsupported hash function '" + spec.hash + "'");

    const auto orgs = g["orgs"];
    if (orgs && !orgs.IsSequence())
        schema_error(orgs, "'orgs' must be a list");
    for (const auto& o : orgs) {
        only_keys(o, {"id", "role", "cash"});
        const auto role_text = scalar(o, "role");
        const auto role = Role::from_string(role_text);
        if (!role)
            schema_error(o["role"], "unknown role '" + role_text + "'");
        spec.orgs.push_back({org(o, "id"), *role, optional_fixed<Money>(o, "cash").value_or(Money{})});
    }

    const auto projects = g["projects"];
    if (projects && !projects.IsSequence())
        schema_error(projects, "'projects' must be a list");
    for (const auto& p : projects) {
        only_keys(p, {"authority", "owner", "id"});
        spec.projects.push_back({org(p, "authority"), org(p, "owner"), scalar(p, "id")});
    }

    if (const auto ex = g["exchange"]) {
        only_keys(ex, {"authority", "fraction", "supply", "reserve"});
        spec.exchange = ExchangeSpec{org(ex, "authority"), real(ex, "fraction"), fixed<Quantity>(ex, "supply"),
                                     fixed<Money>(ex, "reserve")};
    }
    spec.price = optional_fixed<Money>(g, "price");
    return spec;
}

inline Step parse_step(const YAML::Node& n)
{
    if (!n.IsMap())
        schema_error(n, "step must be a mapping");
    Step step;
    step.line = line_of(n);
    step.time = scalar(n, "time");
    if (!detail::is_token(step.time))
        schema_error(n["time"], "time must be printable ASCII without spaces");
    if (auto e = optional_scalar(n, "expectError")) {
        step.expect_error = error_code_from_string(*e);
        if (!step.expect_error)
            schema_error(n["expectError"], "unknown error '" + *e + "'");
    }

    const auto action = scalar(n, "action");
    if (action == "expect") {
        only_keys(n, {"time", "action", "org", "permit", "emission", "cash", "compliant", "account", "balance",
                      "marketPermit", "marketEmission"});
        Expectation x;
        if (n["org"])
            x.org = org(n, "org");
        x.permit = optional_fixed<Quantity>(n, "permit");
        x.emission = optional_fixed<Quantity>(n, "emission");
        x.cash = optional_fixed<Money>(n, "cash");
        if (n["compliant"])
            x.compliant = boolean(n, "compliant");
        if (auto a = optional_scalar(n, "account")) {
            x.account = account_from_name(*a);
            if (!x.account)
                schema_error(n["account"], "unknown account '" + *a + "'");
            x.balance = fixed<Money>(n, "balance");
        }
        x.market_permit = optional_fixed<Quantity>(n, "marketPermit");
        x.market_emission = optional_fixed<Quantity>(n, "marketEmission");
        const bool org_check = x.permit || x.emission || x.cash || x.compliant;
        if (org_check && !x.org)
            schema_error(n, "balance expectations need an 'org'");
        if (!org_check && !x.account && !x.market_permit && !x.market_emission)
            schema_error(n, "expect step asserts nothing");
        if (step.expect_error)
            schema_error(n, "expect steps cannot carry expectError");
        step.action = x;
        return step;
    }

    const auto kind = tx_kind_from_string(action);
    if (!kind)
        schema_error(n["action"], "unknown action '" + action + "'");
    TxRequest r;
    switch (*kind) {
    case TxKind::SetRole:
        only_keys(n, {"time", "action", "expectError", "sender", "target", "role"});
        r = tx::set_role(org(n, "sender"), org(n, "target"), scalar(n, "role"));
        if (!Role::from_string(r.role))
            schema_error(n["role"], "unknown role '" + r.role + "'");
        break;
    case TxKind::MintPermit:
        only_keys(n, {"time", "action", "expectError", "signer", "target", "amount"});
        r = tx::mint_permit(org(n, "signer"), org(n, "target"), fixed<Quantity>(n, "amount"));
        break;
    case TxKind::GrantPermit:
        only_keys(n, {"time", "action", "expectError", "signer", "target", "amount"});
        r = tx::grant_permit(org(n, "signer"), org(n, "target"), fixed<Quantity>(n, "amount"));
        break;
    case TxKind::MintEmission:
        only_keys(n, {"time", "action", "expectError", "sender", "signer", "amount"});
        r = tx::mint_emission(org(n, "sender"), org(n, "signer"), fixed<Quantity>(n, "amount"));
        break;
    case TxKind::TransferPermit:
        only_keys(n, {"time", "action", "expectError", "sender", "target", "amount"});
        r = tx::transfer_permit(org(n, "sender"), org(n, "target"), fixed<Quantity>(n, "amount"));
        break;
    case TxKind::BurnToken:
        only_keys(n, {"time", "action", "expectError", "sender", "amount"});
        r = tx::burn_token(org(n, "sender"), fixed<Quantity>(n, "amount"));
        break;
    case TxKind::TradeToken:
        only_keys(n, {"time", "action", "expectError", "sender", "amount"});
        r = tx::trade_token(org(n, "sender"), fixed<Quantity>(n, "amount"));
        break;
    case TxKind::ConvertCash:
        only_keys(n, {"time", "action", "expectError", "sender", "amount"});
        r = tx::convert_cash(org(n, "sender"), fixed<Money>(n, "amount"));
        break;
    case TxKind::SetReserveFraction:
        only_keys(n, {"time", "action", "expectError", "authority", "fraction"});
        r = tx::set_reserve_fraction(org(n, "authority"), real(n, "fraction"));
        break;
    case TxKind::AdjustReserve:
        only_keys(n, {"time", "action", "expectError", "authority", "delta"});
        r = tx::adjust_reserve(org(n, "authority"), fixed<Money>(n, "delta"));
        break;
    case TxKind::SetPrice:
        only_keys(n, {"time", "action", "expectError", "price"});
        r = tx::set_price(fixed<Money>(n, "price"));
        break;
    }
    r.time = step.time;
    step.action = std::move(r);
    return step;
}

inline YAML::Node load(std::string_view text)
{
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::SyntaxError, "line " + std::to_string(e.mark.line + 1) + ", column "
                                                + std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
}

inline std::string hash_of(const YAML::Node& root)
{
    return optional_scalar(root, "hash").value_or(std::string(default_hash));
}

} // namespace yaml_detail

/// Every organisation a step or the genesis section mentions must be declared
/// under genesis.orgs.
inline void check_references(const Scenario& s)
{
    std::set<OrgId> declared;
    for (const auto& o : s.genesis.orgs) {
        require(declared.insert(o.id).second, ErrorCode::DuplicateId, "organisation '" + o.id.str() + "' declared twice");
    }
    auto check = [&](const OrgId& id, int line) {
        if (!id.empty() && !declared.contains(id))
            throw Error(ErrorCode::ReferenceError,
                        "line " + std::to_string(line) + ": undeclared organisation '" + id.str() + "'");
    };
    for (const auto& p : s.genesis.projects) {
        check(p.authority, 0);
        check(p.owner, 0);
    }
    if (s.genesis.exchange)
        check(s.genesis.exchange->authority, 0);
    for (const auto& step : s.steps) {
        if (const auto* r = std::get_if<TxRequest>(&step.action)) {
            check(r->sender, step.line);
            if (r->cosigner)
                check(*r->cosigner, step.line);
            if (r->target)
                check(*r->target, step.line);
        } else if (const auto& x = std::get<Expectation>(step.action); x.org) {
            check(*x.org, step.line);
        }
    }
}

inline Scenario parse_scenario(std::string_view text)
{
    using namespace yaml_detail;
    const YAML::Node root = load(text);
    if (!root.IsMap())
        throw Error(ErrorCode::SchemaError, "line 1: scenario must be a mapping");
    only_keys(root, {"name", "description", "hash", "genesis", "steps"});
    Scenario s;
    s.name = scalar(root, "name");
    s.description = optional_scalar(root, "description").value_or("");
    if (!root["genesis"])
        schema_error(root, "missing field 'genesis'");
    s.genesis = parse_genesis(root["genesis"], hash_of(root));
    const auto steps = root["steps"];
    if (steps && !steps.IsSequence() && !steps.IsNull())
        schema_error(steps, "'steps' must be a list");
    if (steps && steps.IsSequence())
        for (const auto& n : steps)
            s.steps.push_back(parse_step(n));
    for (std::size_t i = 1; i < s.steps.size(); ++i)
        if (s.steps[i].time < s.steps[i - 1].time)
            throw Error(ErrorCode::SchemaError, "line " + std::to_string(s.steps[i].line)
                                                    + ": timestamps must be non-decreasing");
    check_references(s);
    return s;
}

/// A genesis file is any document with a top-level 'genesis' mapping (and an
/// optional 'hash'); a scenario file qualifies.
inline GenesisSpec parse_genesis_file(std::string_view text)
{
    using namespace yaml_detail;
    const YAML::Node root = load(text);
    if (!root.IsMap() || !root["genesis"])
        throw Error(ErrorCode::SchemaError, "line 1: expected a document with a 'genesis' mapping");
    return parse_genesis(root["genesis"], hash_of(root));
}

inline std::string genesis_yaml(const GenesisSpec& g)
{
    YAML::Emitter out;
    out << YAML::BeginMap << YAML::Key << "hash" << YAML::Value << g.hash;
    out << YAML::Key << "genesis" << YAML::Value << YAML::BeginMap;
    if (g.price)
        out << YAML::Key << "price" << YAML::Value << g.price->to_string();
    out << YAML::Key << "orgs" << YAML::Value << YAML::BeginSeq;
    for (const auto& o : g.orgs)
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << o.id.str() << YAML::Key << "role"
            << YAML::Value << std::string(o.role.to_string()) << YAML::Key << "cash" << YAML::Value
            << o.cash.to_string() << YAML::EndMap;
    out << YAML::EndSeq;
    out << YAML::Key << "projects" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : g.projects)
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "authority" << YAML::Value << p.authority.str()
            << YAML::Key << "owner" << YAML::Value << p.owner.str() << YAML::Key << "id" << YAML::Value << p.id
            << YAML::EndMap;
    out << YAML::EndSeq;
    if (g.exchange) {
        char fraction[40];
        std::snprintf(fraction, sizeof fraction, "%.17g", g.exchange->fraction);
        out << YAML::Key << "exchange" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "authority"
            << YAML::Value << g.exchange->authority.str() << YAML::Key << "fraction" << YAML::Value
            << std::string(fraction) << YAML::Key << "supply" << YAML::Value << g.exchange->supply.to_string()
            << YAML::Key << "reserve" << YAML::Value << g.exchange->reserve.to_string() << YAML::EndMap;
    }
    out << YAML::EndMap << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

inline Ledger build_genesis(const GenesisSpec& g)
{
    Ledger ledger(g.hash);
    for (const auto& o : g.orgs)
        ledger.register_org(o.id, o.role);
    for (const auto& p : g.projects)
        ledger.register_project(p.authority, p.owner, p.id);
    for (const auto& o : g.orgs)
        if (o.cash.is_positive())
            ledger.fund(o.id, o.cash);
    if (g.exchange)
        ledger.open_exchange(g.exchange->authority, g.exchange->fraction, g.exchange->supply, g.exchange->reserve);
    if (g.price)
        ledger.set_initial_price(*g.price);
    return ledger;
}

struct StepResult {
    std::size_t index = 0;
    int line = 0;
    std::string time;
    std::string action;
    std::optional<std::uint64_t> seq;
    std::optional<ErrorCode> error;
    std::string detail;
    bool ok = true;
};

struct RunResult {
    LedgerState genesis;
    Ledger ledger;
    ChainLog chain;
    Journal journal;
    std::vector<StepResult> steps;

    [[nodiscard]] bool success() const
    {
        return std::all_of(steps.begin(), steps.end(), [](const StepResult& s) { return s.ok; });
    }
};

namespace detail {

inline std::vector<std::string> check_expectation(const Expectation& x, const Ledger& ledger, const Journal& journal)
{
    std::vector<std::string> failures;
    auto compare = [&](const std::string& what, const auto& expected, const auto& actual) {
        if (expected != actual)
            failures.push_back(what + " expected " + expected.to_string() + ", got " + actual.to_string());
    };
    if (x.org) {
        const auto& org = ledger.org(*x.org);
        const auto who = x.org->str();
        if (x.permit)
            compare(who + ".permit", *x.permit, org.permit);
        if (x.emission)
            compare(who + ".emission", *x.emission, org.emission);
        if (x.cash)
            compare(who + ".cash", *x.cash, org.cash);
        if (x.compliant) {
            const auto report = ledger.compliance_check(*x.org);
            if (report.compliant != *x.compliant)
                failures.push_back(who + ".compliant expected " + (*x.compliant ? "true" : "false")
                                   + " (outstanding " + report.outstanding_emissions.to_string() + ")");
        }
    }
    if (x.account)
        compare(std::string(account_name(*x.account)) + " balance", *x.balance,
                journal.trial_balance(x.org).at(*x.account));
    if (x.market_permit)
        compare("market permit", *x.market_permit, ledger.state().market_permit);
    if (x.market_emission)
        compare("market emission", *x.market_emission, ledger.state().market_emission);
    return failures;
}

} // namespace detail

/// Applies the steps in order (price checkpoints first within a timestamp),
/// appending each applied transaction to the chain log and the journal.
/// Failed assertions and unexpected rejections are recorded, not thrown.
/// `observer`, if set, sees each step's result and the ledger after it.
inline RunResult run_scenario(const Scenario& s,
                              const std::function<void(const StepResult&, const Ledger&)>& observer = {})
{
    Ledger ledger = build_genesis(s.genesis);
    RunResult result{.genesis = ledger.snapshot(),
                     .ledger = ledger,
                     .chain = ChainLog(ledger.hash_algorithm(), ledger.digest()),
                     .journal = {},
                     .steps = {}};

    std::vector<std::size_t> order(s.steps.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& sa = s.steps[a];
        const auto& sb = s.steps[b];
        if (sa.time != sb.time)
            return sa.time < sb.time;
        auto checkpoint = [](const Step& st) {
            return st.is_transaction() && std::get<TxRequest>(st.action).kind == TxKind::SetPrice;
        };
        return checkpoint(sa) && !checkpoint(sb);
    });

    for (std::size_t i : order) {
        const auto& step = s.steps[i];
        StepResult sr{.index = i + 1, .line = step.line, .time = step.time, .action = std::string(step.name())};
        if (const auto* req = std::get_if<TxRequest>(&step.action)) {
            try {
                const Transaction t = result.ledger.apply(*req);
                result.chain.append(t);
                result.journal.apply(t);
                sr.seq = t.seq;
                if (step.expect_error) {
                    sr.ok = false;
                    sr.error = ErrorCode::AssertionFailed;
                    sr.detail = "expected " + std::string(to_string(*step.expect_error)) + " but it was applied";
                }
            } catch (const Error& e) {
                sr.error = e.code();
                sr.detail = e.what();
                sr.ok = step.expect_error == e.code();
                if (step.expect_error && !sr.ok)
                    sr.detail = "expected " + std::string(to_string(*step.expect_error)) + ", got " + sr.detail;
            }
        } else {
            const auto failures = detail::check_expectation(std::get<Expectation>(step.action), result.ledger,
                                                            result.journal);
            if (!failures.empty()) {
                sr.ok = false;
                sr.error = ErrorCode::AssertionFailed;
                for (const auto& f : failures)
                    sr.detail += (sr.detail.empty() ? "" : "; ") + f;
            }
        }
        if (observer)
            observer(sr, result.ledger);
        result.steps.push_back(std::move(sr));
    }
    return result;
}

} // namespace ets
