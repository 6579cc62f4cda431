#pragma once

#include <ets/ets.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

// Fails unless `expr` throws ets::Error carrying `code`.
#define EXPECT_ETS_ERROR(expr, want)                                                                        \
    do {                                                                                                    \
        try {                                                                                               \
            (void)(expr);                                                                                   \
            ADD_FAILURE() << #expr " did not throw, expected " << ets::to_string(want);                     \
        } catch (const ets::Error& e_) {                                                                    \
            EXPECT_EQ(e_.code(), want) << e_.what();                                                        \
        }                                                                                                   \
    } while (0)

namespace ets::testing {

inline Quantity q(std::string_view s) { return Quantity::parse(s); }
inline Money m(std::string_view s) { return Money::parse(s); }

inline const OrgId A{"A"};
inline const OrgId V{"V"};
inline const OrgId E{"E"};
inline const OrgId F{"F"};

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string scenario_path(const std::string& name) { return std::string(ETS_SCENARIO_DIR) + "/" + name; }

/// The four organisations of the worked example, E owning a project and an
/// exchange at F=0.5, s0=1000, C0=10000.
inline Ledger sample_ledger(Money e_cash = Money::from_units(10'000))
{
    Ledger l;
    l.register_org(A, Role::authority());
    l.register_org(V, Role::verifier());
    l.register_org(E, Role::enterprise());
    l.register_org(F, Role::enterprise());
    l.register_project(A, E, "p1");
    l.fund(E, e_cash);
    l.open_exchange(A, 0.5, Quantity::from_units(1000), Money::from_units(10'000));
    return l;
}

} // namespace ets::testing
