#pragma once

#include <ets/error.hpp>

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ets {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline constexpr std::string_view default_hash = "sha256";

inline constexpr std::array<std::string_view, 3> supported_hashes{"sha256", "sha3-256", "blake2s256"};

/// Only the canonical lowercase names are accepted; OpenSSL's own lookup is
/// case-insensitive, which would let "SHA256" alias "sha256" in a log header.
inline bool is_supported_hash(std::string_view algorithm)
{
    for (auto name : supported_hashes)
        if (name == algorithm)
            return true;
    return false;
}

/// 256-bit digest through OpenSSL's EVP interface, algorithm chosen by name.
inline Digest hash_bytes(std::string_view algorithm, std::span<const std::uint8_t> data)
{
    const std::string name(algorithm);
    require(is_supported_hash(name), ErrorCode::UnknownHash, "unsupported hash function '" + name + "'");
    const EVP_MD* md = EVP_get_digestbyname(name.c_str());
    require(md != nullptr, ErrorCode::UnknownHash, "unknown hash function '" + name + "'");
    require(EVP_MD_size(md) == static_cast<int>(Digest{}.size()), ErrorCode::UnknownHash,
            "hash function '" + name + "' is not 256-bit");

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    Digest out{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1
        || EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1
        || EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size())
        throw Error(ErrorCode::UnknownHash, "digest computation failed for '" + name + "'");
    return out;
}

inline std::string to_hex(std::span<const std::uint8_t> data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

/// Strict lowercase-only decoding; a flipped case bit is a decoding failure,
/// not a silent equivalent.
inline std::optional<Bytes> from_hex(std::string_view text)
{
    if (text.size() % 2 != 0)
        return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        return -1;
    };
    Bytes out;
    out.reserve(text.size() / 2);
    for (std::size_t i = 0; i < text.size(); i += 2) {
        const int hi = nibble(text[i]);
        const int lo = nibble(text[i + 1]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

inline std::optional<Digest> digest_from_hex(std::string_view text)
{
    auto bytes = from_hex(text);
    if (!bytes || bytes->size() != Digest{}.size())
        return std::nullopt;
    Digest d{};
    std::memcpy(d.data(), bytes->data(), d.size());
    return d;
}

/// Length-prefixed canonical encoder: every field is a 4-byte big-endian
/// length followed by its bytes. Integers are 8-byte big-endian two's
/// complement, doubles their IEEE-754 bit pattern, strings raw UTF-8.
class CanonicalWriter {
public:
    CanonicalWriter& field(std::span<const std::uint8_t> bytes)
    {
        put_u32(static_cast<std::uint32_t>(bytes.size()));
        out_.insert(out_.end(), bytes.begin(), bytes.end());
        return *this;
    }
    CanonicalWriter& field(std::string_view text)
    {
        return field(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    }
    CanonicalWriter& field(const char* text) { return field(std::string_view(text)); }
    CanonicalWriter& field(std::int64_t v) { return field_u64(static_cast<std::uint64_t>(v)); }
    CanonicalWriter& field(std::uint64_t v) { return field_u64(v); }
    CanonicalWriter& field(double v) { return field_u64(std::bit_cast<std::uint64_t>(v)); }
    CanonicalWriter& field(bool v)
    {
        const std::uint8_t b = v ? 1 : 0;
        return field(std::span(&b, 1));
    }

    [[nodiscard]] const Bytes& bytes() const& noexcept { return out_; }
    [[nodiscard]] Bytes bytes() && noexcept { return std::move(out_); }

private:
    CanonicalWriter& field_u64(std::uint64_t v)
    {
        std::array<std::uint8_t, 8> be{};
        for (int i = 7; i >= 0; --i) {
            be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
            v >>= 8;
        }
        return field(std::span<const std::uint8_t>(be));
    }
    void put_u32(std::uint32_t v)
    {
        for (int shift = 24; shift >= 0; shift -= 8)
            out_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
    }

    Bytes out_;
};

/// Reads back what CanonicalWriter produced. Any structural mismatch throws
/// ChainInvalid, since the only source of these bytes is a log file.
class CanonicalReader {
public:
    explicit CanonicalReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::span<const std::uint8_t> field()
    {
        require(data_.size() - pos_ >= 4, ErrorCode::ChainInvalid, "truncated field length");
        std::uint32_t len = 0;
        for (int i = 0; i < 4; ++i)
            len = (len << 8) | data_[pos_++];
        require(data_.size() - pos_ >= len, ErrorCode::ChainInvalid, "truncated field body");
        auto out = data_.subspan(pos_, len);
        pos_ += len;
        return out;
    }
    std::string string()
    {
        auto f = field();
        return {reinterpret_cast<const char*>(f.data()), f.size()};
    }
    std::uint64_t u64()
    {
        auto f = field();
        require(f.size() == 8, ErrorCode::ChainInvalid, "integer field must be 8 bytes");
        std::uint64_t v = 0;
        for (auto b : f)
            v = (v << 8) | b;
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    bool boolean()
    {
        auto f = field();
        require(f.size() == 1 && f[0] <= 1, ErrorCode::ChainInvalid, "boolean field malformed");
        return f[0] == 1;
    }
    Digest digest()
    {
        auto f = field();
        require(f.size() == Digest{}.size(), ErrorCode::ChainInvalid, "digest field must be 32 bytes");
        Digest d{};
        std::memcpy(d.data(), f.data(), d.size());
        return d;
    }
    [[nodiscard]] bool done() const noexcept { return pos_ == data_.size(); }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

} // namespace ets
