#include "ofd/disagg.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace ofd;

namespace
{

Scenario pv_scenario(int T, double r)
{
    Scenario s;
    DeviceExternality e;
    e.kind = DeviceKind::PV;
    e.irradiance = Eigen::VectorXd::Constant(4 * T, r);
    s.devices.push_back(e);
    return s;
}

Fleet pv_fleet(double p_cap)
{
    DeviceSpec d;
    d.kind = DeviceKind::PV;
    d.p_cap = p_cap;
    return {d};
}

DisaggResult zero_result(bool zero, double g = 0.0)
{
    DisaggResult r;
    r.zero = zero;
    r.g_value = zero ? 0.0 : g;
    r.p_hat = Eigen::VectorXd::Zero(1);
    return r;
}

} // namespace

TEST_CASE("single pv meets a saturating schedule exactly")
{
    const HorizonConfig h{2, 1.0, 12};
    const DisaggModel model(pv_fleet(4.0), pv_scenario(2, 1.0), h);
    DisaggOptions o;
    o.verify = true;
    const DisaggResult r = model.solve(Eigen::Vector2d(-4.0, -4.0), o);
    CHECK(r.zero);
    CHECK(r.g_value == doctest::Approx(0.0).epsilon(1e-9));
    REQUIRE(r.schedules.size() == 1);
    for (Eigen::Index k = 0; k < 8; ++k)
        CHECK(r.schedules[0].loads[k] == doctest::Approx(-4.0));
}

TEST_CASE("pv cannot consume")
{
    const HorizonConfig h{2, 1.0, 12};
    const DisaggModel model(pv_fleet(4.0), pv_scenario(2, 1.0), h);
    DisaggOptions o;
    o.zero_test = false;
    const DisaggResult r = model.solve(Eigen::Vector2d(1.0, 0.0), o);
    CHECK_FALSE(r.zero);
    CHECK(r.g_value == doctest::Approx(1.0));
    CHECK((r.p_hat.array() <= 1e-12).all());

    // mismatch is 1-homogeneous
    const DisaggResult r2 = model.solve(Eigen::Vector2d(2.0, 0.0), o);
    CHECK(r2.g_value == doctest::Approx(2.0 * r.g_value));
}

TEST_CASE("branch and bound agrees with enumeration on two batteries")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const HorizonConfig h{1, 1.0, 0};
    for (int trial = 0; trial < 15; ++trial)
    {
        Fleet fleet;
        Scenario s;
        for (int b = 0; b < 2; ++b)
        {
            DeviceSpec d;
            d.kind = DeviceKind::Battery;
            d.p_cap = 1.0 + 4.0 * U(rng);
            d.s_cap = 0.5 + 3.0 * U(rng);
            fleet.push_back(d);
            DeviceExternality e;
            e.kind = DeviceKind::Battery;
            e.s0 = d.s_cap * U(rng);
            s.devices.push_back(e);
        }
        const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 12.0 * U(rng) - 6.0);
        DisaggOptions o;
        o.zero_test = false;
        o.verify = true;
        const DisaggResult r = DisaggModel(fleet, s, h).solve(p, o);
        const double brute = oracle::disagg_enumerate(fleet, s, h, p);
        CAPTURE(trial);
        CHECK(r.g_value == doctest::Approx(brute).epsilon(1e-6).scale(1.0));
        CHECK(r.g_value == doctest::Approx((p - r.p_hat).lpNorm<1>()).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("projection disaggregates under its own scenario")
{
    const HorizonConfig h{2, 1.0, 13};
    const Fleet fleet = generate_fleet({1, 1, 1, 1}, 4);
    const BaseProfiles base = synthetic_profiles(h);
    const Scenario s = sample_scenario(fleet, h, base, 8);
    const DisaggModel model(fleet, s, h);
    DisaggOptions o;
    o.zero_test = false;
    o.verify = true;
    const DisaggResult r = model.solve(Eigen::Vector2d(40.0, -30.0), o);
    REQUIRE_FALSE(r.zero);
    const DisaggResult again = model.solve(r.p_hat, o);
    CHECK(again.zero);
}

TEST_CASE("node limit never counts as disaggregatable")
{
    const HorizonConfig h{2, 1.0, 13};
    const Fleet fleet = generate_fleet({1, 2, 2, 2}, 9);
    const BaseProfiles base = synthetic_profiles(h);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-20.0, 20.0);
    for (int i = 0; i < 10; ++i)
    {
        const Scenario s = sample_scenario(fleet, h, base, static_cast<std::uint64_t>(i));
        DisaggOptions o;
        o.node_limit = 1;
        const DisaggResult r = DisaggModel(fleet, s, h).solve(Eigen::Vector2d(U(rng), U(rng)), o);
        if (r.status == opt::SolveStatus::NodeLimit)
            CHECK_FALSE(r.zero);
    }
}

TEST_CASE("chance statistic thresholds")
{
    std::vector<DisaggResult> results(25, zero_result(true));
    const Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
    CHECK(label_from_results(p, results, 0.0).c == 1.0);
    CHECK(label_from_results(p, results, 0.0).y == -1);

    results[3] = zero_result(false, 2.0);
    const LabelResult one_miss = label_from_results(p, results, 0.04);
    CHECK(one_miss.c == doctest::Approx(0.96));
    CHECK(one_miss.y == -1);
    CHECK(label_from_results(p, results, 0.0).y == 1);

    results[4] = zero_result(false, 1.0);
    results[5] = zero_result(false, 1.0);
    CHECK(label_from_results(p, results, 0.12).y == -1);       // c = 0.88
    results[6] = zero_result(false, 1.0);
    CHECK(label_from_results(p, results, 0.12).y == 1);        // c = 0.84

    CHECK(chance_feasible(0.96, 0.04));
    CHECK_FALSE(chance_feasible(0.92, 0.04));
}

TEST_CASE("fleet oracle draws are reproducible and monotone in epsilon")
{
    const HorizonConfig h{2, 1.0, 13};
    const Fleet fleet = generate_fleet({2, 2, 2, 2}, 11);
    const BaseProfiles base = synthetic_profiles(h);
    std::vector<Scenario> pool;
    for (std::uint64_t i = 0; i < 30; ++i)
        pool.push_back(sample_scenario(fleet, h, base, 100 + i));
    const FleetOracle strict(fleet, h, pool, 10, 0.0);
    const FleetOracle loose(fleet, h, pool, 10, 0.2);

    const auto idx = strict.draw_indices(42);
    CHECK(idx.size() == 10);
    CHECK(std::set<int>(idx.begin(), idx.end()).size() == 10);
    CHECK(idx == strict.draw_indices(42));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-25.0, 25.0);
    for (int i = 0; i < 8; ++i)
    {
        const Eigen::Vector2d p(U(rng), U(rng));
        const LabelResult a = strict.label(p, static_cast<std::uint64_t>(i));
        const LabelResult b = loose.label(p, static_cast<std::uint64_t>(i));
        CHECK(a.c == b.c);
        CHECK(a.y == strict.label(p, static_cast<std::uint64_t>(i)).y);
        if (a.y < 0)
            CHECK(b.y < 0);
    }
}
