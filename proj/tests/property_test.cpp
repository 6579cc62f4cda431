#include "generators.hpp"
#include "support.hpp"

using namespace ets;
using namespace ets::testing;

TEST(Property, RandomSequencesConserveBalances)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        gen::Rng rng(seed);
        auto ledger = gen::population();
        const auto r = gen::run_sequence(ledger, rng, 300);
        EXPECT_TRUE(r.conserved) << "seed " << seed;
        EXPECT_TRUE(r.rejections_clean) << "seed " << seed;
        EXPECT_GT(r.applied, 100u) << "seed " << seed;
    }
}

TEST(Property, RoleGatesRejectEveryOutsider)
{
    for (const auto& c : gen::role_gate_matrix()) {
        auto ledger = gen::population();
        const auto req = c.make(gen::actor_for(c.actor));
        if (c.allowed)
            EXPECT_NO_THROW(ledger.apply(req)) << c.operation << " by " << c.actor.to_string();
        else
            EXPECT_ETS_ERROR(ledger.apply(req), ErrorCode::Unauthorized);
    }
}

TEST(Property, ReplayMatchesLiveRunAndJournalAlwaysBalances)
{
    gen::Rng rng(99);
    auto ledger = gen::population();
    const auto genesis = ledger.snapshot();
    ChainLog log(ledger.hash_algorithm(), ledger.digest());
    Journal journal;
    gen::run_sequence(ledger, rng, 400, [&](const Transaction& t) {
        log.append(t);
        journal.apply(t);
    });
    EXPECT_EQ(replay(log, genesis).digest(), ledger.digest());
    EXPECT_EQ(journal_from_log(log), journal);
    for (const auto& e : journal.entries())
        EXPECT_TRUE(e.balanced()) << "event " << e.event_ref;
    EXPECT_TRUE(trial_balance_closes(journal.trial_balance()));
    for (const auto& [id, org] : ledger.state().registry.orgs())
        EXPECT_EQ(journal.holdings(id), org.permit) << id.str();
}

TEST(Property, LotsFollowBalancesAndPricesAfterEveryEvent)
{
    gen::Rng rng(2024);
    auto ledger = gen::population();
    Journal journal;
    Money price;
    int checked = 0;
    gen::run_sequence(ledger, rng, 400, [&](const Transaction& t) {
        journal.apply(t);
        for (const auto& [id, org] : ledger.state().registry.orgs())
            ASSERT_EQ(journal.holdings(id), org.permit) << "after seq " << t.seq << ", " << id.str();
        if (t.request.kind == TxKind::SetPrice) {
            price = t.request.money;
            for (const auto& [id, lots] : journal.all_lots())
                for (const auto& lot : lots)
                    ASSERT_EQ(lot.carrying_price, price) << "after seq " << t.seq;
            ++checked;
        }
    });
    EXPECT_GT(checked, 10);
}

TEST(Property, ReserveTracksTheCurveAtFixedFraction)
{
    gen::Rng rng(4242);
    auto st = open_exchange(0.4, Quantity::from_units(1000), Money::from_units(10'000));
    std::uniform_int_distribution<std::int64_t> amount(-50'000'000, 50'000'000);
    int trades = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto e = Quantity::from_raw(amount(rng));
        if (e.is_zero() || (st.supply + e).raw() < 1'000'000)
            continue;
        try {
            st = settle(st, quote_buy_tokens(st, e));
            ++trades;
        } catch (const Error&) {
            continue;
        }
        ASSERT_FALSE(st.reserve.is_negative());
    }
    const double drift = std::fabs(st.reserve.to_double() - curve_reserve(st, st.supply));
    EXPECT_LE(drift, trades * 1e-6);
}
