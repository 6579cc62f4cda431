#pragma once

#include <ets/error.hpp>
#include <ets/fixed_point.hpp>

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace ets {

/// Case-sensitive, non-empty participant identifier.
class OrgId {
public:
    OrgId() = default;
    explicit OrgId(std::string value) : value_(std::move(value))
    {
        require(!value_.empty(), ErrorCode::SchemaError, "organisation id must be non-empty");
    }

    [[nodiscard]] const std::string& str() const noexcept { return value_; }
    [[nodiscard]] bool empty() const noexcept { return value_.empty(); }

    friend auto operator<=>(const OrgId&, const OrgId&) = default;
    friend bool operator==(const OrgId&, const OrgId&) = default;

private:
    std::string value_;
};

enum class RoleKind { Authority, Enterprise };

/// An authority, or an enterprise that may carry verifier status. The
/// constructors are the only way in, so an authority can never be a verifier.
class Role {
public:
    static constexpr Role authority() noexcept { return Role(RoleKind::Authority, false); }
    static constexpr Role enterprise() noexcept { return Role(RoleKind::Enterprise, false); }
    static constexpr Role verifier() noexcept { return Role(RoleKind::Enterprise, true); }

    /// "authority" | "enterprise" | "verifier"
    static std::optional<Role> from_string(std::string_view s) noexcept
    {
        if (s == "authority")
            return authority();
        if (s == "enterprise")
            return enterprise();
        if (s == "verifier")
            return verifier();
        return std::nullopt;
    }

    [[nodiscard]] constexpr RoleKind kind() const noexcept { return kind_; }
    [[nodiscard]] constexpr bool is_authority() const noexcept { return kind_ == RoleKind::Authority; }
    [[nodiscard]] constexpr bool is_enterprise() const noexcept { return kind_ == RoleKind::Enterprise; }
    [[nodiscard]] constexpr bool is_verifier() const noexcept { return verifier_; }

    [[nodiscard]] constexpr std::string_view to_string() const noexcept
    {
        if (kind_ == RoleKind::Authority)
            return "authority";
        return verifier_ ? "verifier" : "enterprise";
    }

    friend constexpr bool operator==(Role, Role) noexcept = default;

private:
    constexpr Role(RoleKind kind, bool verifier) noexcept : kind_(kind), verifier_(verifier) {}

    RoleKind kind_;
    bool verifier_;
};

enum class TokenKind {
    Permit,   // permit to emit 1 tCO2e (allowance or credit)
    Emission, // 1 tCO2e verified emissions
};

struct OrgRecord {
    OrgId id;
    Role role = Role::enterprise();
    Quantity permit;
    Quantity emission;
    Money cash;
    std::set<std::string> projects;

    [[nodiscard]] bool has_project() const noexcept { return !projects.empty(); }
    [[nodiscard]] Quantity balance(TokenKind kind) const noexcept
    {
        return kind == TokenKind::Permit ? permit : emission;
    }

    friend bool operator==(const OrgRecord&, const OrgRecord&) = default;
};

/// Ordered by id so every traversal (digests, reports) is deterministic.
class Registry {
public:
    using map_type = std::map<OrgId, OrgRecord>;

    const OrgRecord& register_org(const OrgId& id, Role role)
    {
        require(!id.empty(), ErrorCode::SchemaError, "organisation id must be non-empty");
        auto [it, inserted] = orgs_.try_emplace(id, OrgRecord{.id = id, .role = role});
        require(inserted, ErrorCode::DuplicateId, "organisation '" + id.str() + "' already registered");
        return it->second;
    }

    const OrgRecord& register_project(const OrgId& authority, const OrgId& owner, const std::string& project_id)
    {
        const auto& caller = at(authority);
        auto& target = mutable_at(owner);
        require(caller.role.is_authority(), ErrorCode::Unauthorized,
                "'" + authority.str() + "' is not an authority and cannot register projects");
        require(target.role.is_enterprise(), ErrorCode::Unauthorized,
                "projects can only be owned by enterprises, '" + owner.str() + "' is an authority");
        require(!project_id.empty(), ErrorCode::SchemaError, "project id must be non-empty");
        target.projects.insert(project_id);
        return target;
    }

    [[nodiscard]] bool contains(const OrgId& id) const { return orgs_.contains(id); }

    [[nodiscard]] const OrgRecord& at(const OrgId& id) const
    {
        auto it = orgs_.find(id);
        require(it != orgs_.end(), ErrorCode::UnknownOrg, "unknown organisation '" + id.str() + "'");
        return it->second;
    }

    OrgRecord& mutable_at(const OrgId& id)
    {
        auto it = orgs_.find(id);
        require(it != orgs_.end(), ErrorCode::UnknownOrg, "unknown organisation '" + id.str() + "'");
        return it->second;
    }

    [[nodiscard]] bool has_project(const OrgId& id) const { return at(id).has_project(); }

    [[nodiscard]] const map_type& orgs() const noexcept { return orgs_; }
    [[nodiscard]] std::size_t size() const noexcept { return orgs_.size(); }

    friend bool operator==(const Registry&, const Registry&) = default;

private:
    map_type orgs_;
};

} // namespace ets
