// Command-line front end: run scenarios, verify and replay chain logs,
// regenerate journals, and query the bonding curve.
//
// Exit status: 0 success, 1 assertion or verification failure, 2 bad input.

#include <ets/ets.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_input = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw InputError("cannot write '" + path.string() + "'");
}

int cmd_run(const std::string& path, const std::string& out_dir)
{
    const auto scenario = ets::parse_scenario(read_file(path));
    const auto result = ets::run_scenario(scenario);
    const auto report = ets::run_report(scenario, result);
    std::cout << report;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        const fs::path dir(out_dir);
        write_file(dir / "genesis.yaml", ets::genesis_yaml(scenario.genesis));
        write_file(dir / "chain.log", result.chain.serialize());
        write_file(dir / "journal.csv", ets::journal_csv(result.journal.entries()));
        write_file(dir / "balances.csv", ets::balances_csv(result.ledger));
        write_file(dir / "report.txt", report);
    }
    return result.success() ? exit_ok : exit_failed;
}

int cmd_verify(const std::string& path)
{
    const auto text = read_file(path);
    const auto v = ets::verify_chain_text(text);
    if (v.valid) {
        const auto log = ets::parse_chainlog(text);
        std::cout << "valid: " << log.size() << " entries, head " << ets::to_hex(ets::head_state_digest(log)) << "\n";
        return exit_ok;
    }
    std::cout << "invalid at seq " << v.first_bad_seq.value_or(0) << ": " << v.reason << "\n";
    return exit_failed;
}

int cmd_replay(const std::string& log_path, const std::string& genesis_path)
{
    const auto log_text = read_file(log_path);
    const auto genesis = ets::parse_genesis_file(read_file(genesis_path));
    const auto log = ets::parse_chainlog(log_text);
    auto start = ets::build_genesis(genesis);
    const auto ledger = ets::replay(log, start.snapshot());
    std::cout << "replayed " << log.size() << " entries, head " << ets::to_hex(ledger.digest()) << "\n";
    std::cout << ets::balances_csv(ledger);
    return exit_ok;
}

int cmd_journal(const std::string& path)
{
    const auto log = ets::parse_chainlog(read_file(path));
    const auto v = ets::verify_chain(log);
    if (!v.valid) {
        std::cerr << "invalid at seq " << v.first_bad_seq.value_or(0) << ": " << v.reason << "\n";
        return exit_failed;
    }
    std::cout << ets::journal_csv(ets::journal_from_log(log).entries());
    return exit_ok;
}

int cmd_quote(double f, const std::string& s0, const std::string& c0, const std::string& buy, const std::string& spend)
{
    const auto st = ets::open_exchange(f, ets::Quantity::parse(s0), ets::Money::parse(c0));
    const auto q = !buy.empty() ? ets::quote_buy_tokens(st, ets::Quantity::parse(buy))
                                : ets::quote_spend_cash(st, ets::Money::parse(spend));
    std::cout << "tokens " << q.tokens_delta.to_string() << "\ncash " << q.cash_delta.to_string() << "\nprice_before "
              << ets::current_price(st).to_string() << "\nprice_after " << q.price_after.to_string() << "\n";
    return exit_ok;
}

/// Codes that describe the input rather than the ledger's verdict on it.
bool is_input_error(ets::ErrorCode c)
{
    using E = ets::ErrorCode;
    switch (c) {
    case E::SyntaxError:
    case E::SchemaError:
    case E::ReferenceError:
    case E::InvalidRange:
    case E::InvalidFraction:
    case E::InvalidSupply:
    case E::InvalidAmount:
    case E::ReserveExhausted:
    case E::UnknownHash:
    case E::DuplicateId:
    case E::UnknownOrg:
    case E::Unauthorized:
    case E::Overflow: return true;
    default: return false;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Emissions trading ledger: scenarios, chain logs, journals and the bonding curve"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir;
    auto* run = app.add_subcommand("run", "apply a scenario file and report the outcome");
    run->add_option("scenario", scenario_path, "scenario YAML")->required();
    run->add_option("--out", out_dir, "write genesis.yaml, chain.log, journal.csv, balances.csv, report.txt here");

    std::string log_path;
    auto* verify = app.add_subcommand("verify", "check every link and digest of a chain log");
    verify->add_option("chainlog", log_path)->required();

    std::string genesis_path;
    auto* replay = app.add_subcommand("replay", "re-apply a chain log from a genesis file");
    replay->add_option("chainlog", log_path)->required();
    replay->add_option("genesis", genesis_path, "genesis or scenario YAML")->required();

    auto* journal = app.add_subcommand("journal", "regenerate the journal CSV from a chain log");
    journal->add_option("chainlog", log_path)->required();

    double fraction = 0.5;
    std::string s0 = "1000", c0 = "10000", buy, spend;
    auto* quote = app.add_subcommand("quote", "price a trade against a freshly opened curve");
    quote->add_option("--f", fraction, "reserve fraction in (0, 1]")->capture_default_str();
    quote->add_option("--s0", s0, "baseline supply")->capture_default_str();
    quote->add_option("--c0", c0, "baseline reserve")->capture_default_str();
    auto* buy_opt = quote->add_option("--buy-tokens", buy, "tokens to buy (negative sells)");
    auto* spend_opt = quote->add_option("--spend-cash", spend, "cash to spend (negative withdraws)");
    buy_opt->excludes(spend_opt);
    quote->callback([&] {
        if (buy.empty() == spend.empty())
            throw CLI::ValidationError("quote", "give exactly one of --buy-tokens or --spend-cash");
    });

    double pc_f = 0, pc_s0 = 0, pc_c0 = 0, pc_min = 0, pc_max = 0;
    int points = 0;
    auto* curve = app.add_subcommand("price-curve", "tabulate spot price against supply");
    curve->add_option("--f", pc_f)->required();
    curve->add_option("--s0", pc_s0)->required();
    curve->add_option("--c0", pc_c0)->required();
    curve->add_option("--min", pc_min)->required();
    curve->add_option("--max", pc_max)->required();
    curve->add_option("--points", points)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_input;
    }

    try {
        if (*run)
            return cmd_run(scenario_path, out_dir);
        if (*verify)
            return cmd_verify(log_path);
        if (*replay)
            return cmd_replay(log_path, genesis_path);
        if (*journal)
            return cmd_journal(log_path);
        if (*quote)
            return cmd_quote(fraction, s0, c0, buy, spend);
        if (*curve) {
            std::cout << ets::price_curve_csv(ets::price_curve(pc_f, pc_s0, pc_c0, pc_min, pc_max, points));
            return exit_ok;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const ets::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_input_error(e.code()) ? exit_input : exit_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}
