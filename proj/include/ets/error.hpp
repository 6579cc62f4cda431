#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ets {

enum class ErrorCode {
    // domain
    DuplicateId,
    UnknownOrg,
    Unauthorized,
    // statemachine
    NoChange,
    NoProject,
    ZeroAmount,
    InsufficientBalance,
    BadSignature,
    GenesisSealed,
    // exchange
    InsufficientCash,
    InvalidAmount,
    InvalidSupply,
    InvalidFraction,
    ReserveExhausted,
    ExchangeInactive,
    ExchangeAlreadyActive,
    // chainlog
    SeqGap,
    ChainInvalid,
    StateMismatch,
    UnknownHash,
    // cli / scenario
    SyntaxError,
    SchemaError,
    ReferenceError,
    AssertionFailed,
    TransactionRejected,
    InvalidRange,
    // arithmetic
    Overflow,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownOrg: return "UnknownOrg";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::NoChange: return "NoChange";
    case ErrorCode::NoProject: return "NoProject";
    case ErrorCode::ZeroAmount: return "ZeroAmount";
    case ErrorCode::InsufficientBalance: return "InsufficientBalance";
    case ErrorCode::BadSignature: return "BadSignature";
    case ErrorCode::GenesisSealed: return "GenesisSealed";
    case ErrorCode::InsufficientCash: return "InsufficientCash";
    case ErrorCode::InvalidAmount: return "InvalidAmount";
    case ErrorCode::InvalidSupply: return "InvalidSupply";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::ReserveExhausted: return "ReserveExhausted";
    case ErrorCode::ExchangeInactive: return "ExchangeInactive";
    case ErrorCode::ExchangeAlreadyActive: return "ExchangeAlreadyActive";
    case ErrorCode::SeqGap: return "SeqGap";
    case ErrorCode::ChainInvalid: return "ChainInvalid";
    case ErrorCode::StateMismatch: return "StateMismatch";
    case ErrorCode::UnknownHash: return "UnknownHash";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ReferenceError: return "ReferenceError";
    case ErrorCode::AssertionFailed: return "AssertionFailed";
    case ErrorCode::TransactionRejected: return "TransactionRejected";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::Overflow: return "Overflow";
    }
    return "Unknown";
}

inline std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept
{
    for (int i = 0; i <= static_cast<int>(ErrorCode::Overflow); ++i) {
        const auto code = static_cast<ErrorCode>(i);
        if (to_string(code) == name)
            return code;
    }
    return std::nullopt;
}

/// Every rejection in the engine surfaces as this exception; `code()` is the
/// stable identifier written to run reports.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what)
{
    if (!condition)
        throw Error(code, what);
}

} // namespace ets
