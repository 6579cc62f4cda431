#include "support.hpp"

using namespace ets;
using namespace ets::testing;

TEST(Registry, NewOrganisationsStartEmpty)
{
    Registry r;
    const auto& a = r.register_org(A, Role::authority());
    EXPECT_TRUE(a.permit.is_zero());
    EXPECT_TRUE(a.emission.is_zero());
    EXPECT_TRUE(a.cash.is_zero());
    EXPECT_TRUE(a.role.is_authority());
    EXPECT_EQ(r.register_org(E, Role::enterprise()).role, Role::enterprise());
    EXPECT_FALSE(r.at(E).role.is_verifier());
}

TEST(Registry, DuplicateIdIsRejected)
{
    Registry r;
    r.register_org(A, Role::authority());
    EXPECT_ETS_ERROR(r.register_org(A, Role::authority()), ErrorCode::DuplicateId);
    EXPECT_ETS_ERROR(r.register_org(A, Role::enterprise()), ErrorCode::DuplicateId);
}

TEST(Registry, LookupReturnsTheRegisteredRecord)
{
    Registry r;
    r.register_org(V, Role::verifier());
    EXPECT_EQ(r.at(V).id, V);
    EXPECT_TRUE(r.at(V).role.is_verifier());
    EXPECT_TRUE(r.at(V).role.is_enterprise());
    EXPECT_ETS_ERROR(r.at(OrgId("Z")), ErrorCode::UnknownOrg);
}

TEST(Registry, ProjectsNeedAnAuthorityAndAnEnterpriseOwner)
{
    Registry r;
    r.register_org(A, Role::authority());
    r.register_org(E, Role::enterprise());
    r.register_org(F, Role::enterprise());
    EXPECT_FALSE(r.has_project(E));
    r.register_project(A, E, "p1");
    EXPECT_EQ(r.at(E).projects, std::set<std::string>{"p1"});
    EXPECT_ETS_ERROR(r.register_project(E, F, "p2"), ErrorCode::Unauthorized);
    EXPECT_ETS_ERROR(r.register_project(A, A, "p3"), ErrorCode::Unauthorized);
    EXPECT_ETS_ERROR(r.register_project(A, OrgId("Z"), "p4"), ErrorCode::UnknownOrg);
    EXPECT_FALSE(r.has_project(F));
}

TEST(Role, NamesRoundTrip)
{
    for (auto role : {Role::authority(), Role::enterprise(), Role::verifier()})
        EXPECT_EQ(Role::from_string(role.to_string()), role);
    EXPECT_FALSE(Role::from_string("Authority"));
    EXPECT_FALSE(Role::from_string(""));
}

TEST(OrgId, MustNotBeEmpty)
{
    EXPECT_ANY_THROW(OrgId(""));
}

TEST(Errors, NamesRoundTrip)
{
    for (int i = 0; i <= static_cast<int>(ErrorCode::Overflow); ++i) {
        const auto code = static_cast<ErrorCode>(i);
        EXPECT_EQ(error_code_from_string(to_string(code)), code);
    }
    EXPECT_FALSE(error_code_from_string("NotAnError"));
}
