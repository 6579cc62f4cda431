#pragma once

#include <ets/error.hpp>
#include <ets/hash.hpp>
#include <ets/ledger.hpp>
#include <ets/transaction.hpp>

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ets {

/// One applied transaction, linked to its predecessor:
///   entry_hash = H(be64(seq) || tx_digest || prev_hash)
/// The genesis entry links to the all-zero digest.
struct ChainEntry {
    std::uint64_t seq = 0;
    std::string timestamp;
    Digest tx_digest{};
    Digest prev_hash{};
    Digest entry_hash{};
    Bytes tx_bytes;

    [[nodiscard]] Transaction transaction() const { return decode_transaction(tx_bytes); }

    friend bool operator==(const ChainEntry&, const ChainEntry&) = default;
};

inline constexpr std::string_view chainlog_magic = "ets-chainlog";
inline constexpr int chainlog_version = 1;

inline Digest link_hash(std::string_view algorithm, std::uint64_t seq, const Digest& tx_digest, const Digest& prev)
{
    Bytes buf;
    buf.reserve(8 + 2 * Digest{}.size());
    for (int shift = 56; shift >= 0; shift -= 8)
        buf.push_back(static_cast<std::uint8_t>((seq >> shift) & 0xff));
    buf.insert(buf.end(), tx_digest.begin(), tx_digest.end());
    buf.insert(buf.end(), prev.begin(), prev.end());
    return hash_bytes(algorithm, buf);
}

namespace detail {
inline bool is_token(std::string_view s)
{
    if (s.empty())
        return false;
    for (unsigned char c : s)
        if (c <= 0x20 || c >= 0x7f)
            return false;
    return true;
}
} // namespace detail

/// Append-only, hash-linked record of applied transactions.
class ChainLog {
public:
    ChainLog(std::string hash_algorithm, Digest genesis_digest)
        : hash_(std::move(hash_algorithm)), genesis_(genesis_digest)
    {
        require(is_supported_hash(hash_), ErrorCode::UnknownHash, "unsupported hash function '" + hash_ + "'");
    }

    /// The transaction must be the next one after the current head.
    const ChainEntry& append(const Transaction& tx)
    {
        const std::uint64_t expected = entries_.size() + 1;
        require(tx.seq == expected, ErrorCode::SeqGap,
                "expected seq " + std::to_string(expected) + ", got " + std::to_string(tx.seq));
        require(detail::is_token(tx.request.time), ErrorCode::SchemaError,
                "timestamp must be non-empty printable ASCII without spaces");
        ChainEntry e;
        e.seq = tx.seq;
        e.timestamp = tx.request.time;
        e.tx_bytes = encode(tx);
        e.tx_digest = hash_bytes(hash_, e.tx_bytes);
        e.prev_hash = entries_.empty() ? Digest{} : entries_.back().entry_hash;
        e.entry_hash = link_hash(hash_, e.seq, e.tx_digest, e.prev_hash);
        entries_.push_back(std::move(e));
        return entries_.back();
    }

    /// Adds an entry exactly as read from storage, without recomputing
    /// anything; verification is a separate step.
    void push_raw(ChainEntry entry) { entries_.push_back(std::move(entry)); }

    [[nodiscard]] const std::string& hash_algorithm() const noexcept { return hash_; }
    [[nodiscard]] const Digest& genesis_digest() const noexcept { return genesis_; }
    [[nodiscard]] const std::vector<ChainEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::vector<ChainEntry>& mutable_entries() noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

    /// Header line, then one line per entry:
    ///   ets-chainlog 1 <hash-name> <genesis-digest-hex>
    ///   <seq> <timestamp> <tx-digest> <prev-hash> <entry-hash> <tx-bytes-hex>
    [[nodiscard]] std::string serialize() const
    {
        std::string out;
        out += std::string(chainlog_magic) + " " + std::to_string(chainlog_version) + " " + hash_ + " "
               + to_hex(genesis_) + "\n";
        for (const auto& e : entries_) {
            out += std::to_string(e.seq) + " " + e.timestamp + " " + to_hex(e.tx_digest) + " " + to_hex(e.prev_hash)
                   + " " + to_hex(e.entry_hash) + " " + to_hex(e.tx_bytes) + "\n";
        }
        return out;
    }

    friend bool operator==(const ChainLog&, const ChainLog&) = default;

private:
    std::string hash_;
    Digest genesis_{};
    std::vector<ChainEntry> entries_;
};

struct VerifyResult {
    bool valid = true;
    std::optional<std::uint64_t> first_bad_seq; // 0 marks the header
    std::string reason;
};

namespace detail {

inline std::vector<std::string_view> split_spaces(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(' ', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<std::uint64_t> parse_seq(std::string_view s)
{
    if (s.empty() || (s.size() > 1 && s.front() == '0'))
        return std::nullopt;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

} // namespace detail

/// Strict parse of the text format. Any deviation (a non-lowercase hex digit,
/// an extra space, a missing final newline) is a ChainInvalid error naming the
/// offending line.
inline ChainLog parse_chainlog(std::string_view text, std::uint64_t* bad_line = nullptr)
{
    auto fail = [bad_line](std::uint64_t line, const std::string& why) {
        if (bad_line)
            *bad_line = line;
        return Error(ErrorCode::ChainInvalid, "line " + std::to_string(line) + ": " + why);
    };
    if (text.empty() || text.back() != '\n') {
        std::uint64_t last = 1;
        for (char c : text)
            last += c == '\n';
        throw fail(last, "log must end with a newline");
    }
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto nl = text.find('\n', start);
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }

    const auto header = detail::split_spaces(lines.front());
    if (header.size() != 4 || header[0] != chainlog_magic || header[1] != std::to_string(chainlog_version))
        throw fail(1, "bad header");
    if (!is_supported_hash(header[2]))
        throw fail(1, "unsupported hash function '" + std::string(header[2]) + "'");
    const auto genesis = digest_from_hex(header[3]);
    if (!genesis)
        throw fail(1, "bad genesis digest");

    ChainLog log(std::string(header[2]), *genesis);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = detail::split_spaces(lines[i]);
        if (f.size() != 6)
            throw fail(i + 1, "expected 6 fields");
        ChainEntry e;
        const auto seq = detail::parse_seq(f[0]);
        const auto txd = digest_from_hex(f[2]);
        const auto prev = digest_from_hex(f[3]);
        const auto eh = digest_from_hex(f[4]);
        auto body = from_hex(f[5]);
        if (!seq || !detail::is_token(f[1]) || !txd || !prev || !eh || !body || body->empty())
            throw fail(i + 1, "malformed entry");
        e.seq = *seq;
        e.timestamp = std::string(f[1]);
        e.tx_digest = *txd;
        e.prev_hash = *prev;
        e.entry_hash = *eh;
        e.tx_bytes = std::move(*body);
        log.push_raw(std::move(e));
    }
    return log;
}

/// Recomputes every digest and link. Also checks that each transaction's
/// recorded pre-state is its predecessor's post-state (the first one's is the
/// header's genesis digest), which binds the header into the chain.
inline VerifyResult verify_chain(const ChainLog& log)
{
    const auto& algo = log.hash_algorithm();
    Digest prev_link{};
    Digest prev_state = log.genesis_digest();
    std::uint64_t expected = 1;
    for (const auto& e : log.entries()) {
        auto bad = [&](std::string why) { return VerifyResult{false, expected, std::move(why)}; };
        if (e.seq != expected)
            return bad("sequence gap");
        if (hash_bytes(algo, e.tx_bytes) != e.tx_digest)
            return bad("transaction digest mismatch");
        if (e.prev_hash != prev_link)
            return bad("broken link to previous entry");
        if (link_hash(algo, e.seq, e.tx_digest, e.prev_hash) != e.entry_hash)
            return bad("entry hash mismatch");
        Transaction tx;
        try {
            tx = e.transaction();
        } catch (const Error& err) {
            return bad(err.what());
        }
        if (tx.seq != e.seq || tx.request.time != e.timestamp)
            return bad("entry fields disagree with transaction body");
        if (tx.outcome.pre_state != prev_state)
            return bad("state digest does not continue from previous entry");
        prev_link = e.entry_hash;
        prev_state = tx.outcome.post_state;
        ++expected;
    }
    return {};
}

/// Parse-and-verify for raw file contents; parse failures count as invalid.
inline VerifyResult verify_chain_text(std::string_view text)
{
    std::uint64_t bad_line = 0;
    try {
        return verify_chain(parse_chainlog(text, &bad_line));
    } catch (const Error& err) {
        return {false, bad_line > 1 ? bad_line - 1 : 0, err.what()};
    }
}

/// Digest of the state at the head of the log (genesis digest when empty).
inline Digest head_state_digest(const ChainLog& log)
{
    return log.empty() ? log.genesis_digest() : log.entries().back().transaction().outcome.post_state;
}

/// Re-applies every logged request to `genesis` and checks that each one
/// reproduces the recorded transaction bit for bit.
template <SignaturePolicy S = IdentitySignatures>
BasicLedger<S> replay(const ChainLog& log, const LedgerState& genesis, S signatures = {})
{
    const auto check = verify_chain(log);
    require(check.valid, ErrorCode::ChainInvalid,
            "seq " + std::to_string(check.first_bad_seq.value_or(0)) + ": " + check.reason);
    BasicLedger<S> ledger(genesis, log.hash_algorithm(), std::move(signatures));
    require(ledger.digest() == log.genesis_digest(), ErrorCode::StateMismatch,
            "genesis state does not match the log's genesis digest");
    for (const auto& e : log.entries()) {
        const Transaction recorded = e.transaction();
        Transaction again;
        try {
            again = ledger.apply(recorded.request);
        } catch (const Error& err) {
            throw Error(ErrorCode::StateMismatch,
                        "seq " + std::to_string(e.seq) + " rejected on replay: " + err.what());
        }
        require(again == recorded, ErrorCode::StateMismatch,
                "seq " + std::to_string(e.seq) + " replays to a different result");
    }
    require(ledger.digest() == head_state_digest(log), ErrorCode::StateMismatch, "head state digest mismatch");
    return ledger;
}

} // namespace ets
