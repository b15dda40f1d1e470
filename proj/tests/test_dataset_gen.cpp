#include "ofd/dataset_gen.hpp"

#include <doctest.h>

#include <filesystem>

using namespace ofd;

namespace
{

HPolytope unit_model(const HorizonConfig& h)
{
    AggregatorModelVars v;
    v.p_max = Eigen::VectorXd::Ones(h.T);
    v.p_min = -Eigen::VectorXd::Ones(h.T);
    v.s0 = 0.5;
    v.s_max = Eigen::VectorXd::Ones(h.T);
    v.s_min = Eigen::VectorXd::Zero(h.T);
    v.ramp_up = Eigen::VectorXd::Ones(h.T - 1);
    v.ramp_dn = -Eigen::VectorXd::Ones(h.T - 1);
    return market_polytope(build_G(h), build_x(v, h));
}

LabeledDataset synthetic_dataset(std::uint64_t seed, int n = 200)
{
    const HorizonConfig h{2, 1.0, 0};
    const PolytopeOracle oracle(unit_model(h));
    DatasetOptions o;
    o.n_target = n;
    o.seed = seed;
    return generate(oracle, box_polytope(Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2)), o);
}

} // namespace

TEST_CASE("interpolation formula")
{
    const Eigen::Vector2d p1(1.0, 1.0), p2(0.0, 0.0);
    const double kappa = 0.2;
    const Eigen::Vector2d p3 = kappa * p1 + (1.0 - kappa) * p2;
    CHECK(p3[0] == doctest::Approx(0.2));
    CHECK(p3[1] == doctest::Approx(0.2));
}

TEST_CASE("hyper-rectangle of simple fleets")
{
    const HorizonConfig h{3, 1.0, 12};
    DeviceSpec pv;
    pv.kind = DeviceKind::PV;
    pv.p_cap = 4.0;
    Scenario s;
    DeviceExternality e;
    e.kind = DeviceKind::PV;
    e.irradiance = Eigen::VectorXd::Ones(12);
    s.devices.push_back(e);
    const HPolytope H = estimate_H({pv}, {s}, h);
    Eigen::VectorXd lo, hi;
    box_bounds(H, lo, hi);
    for (int t = 0; t < 3; ++t)
    {
        CHECK(lo[t] == doctest::Approx(-4.0));
        CHECK(hi[t] == doctest::Approx(0.0));
    }

    // add a battery whose energy limits never bind within one hour
    const HorizonConfig h1{1, 1.0, 12};
    DeviceSpec bat;
    bat.kind = DeviceKind::Battery;
    bat.p_cap = 2.0;
    bat.s_cap = 100.0;
    DeviceExternality be;
    be.kind = DeviceKind::Battery;
    be.s0 = 50.0;
    Scenario s1;
    e.irradiance = Eigen::VectorXd::Ones(4);
    s1.devices = {e, be};
    const HPolytope H1 = estimate_H({pv, bat}, {s1}, h1);
    box_bounds(H1, lo, hi);
    CHECK(lo[0] == doctest::Approx(-6.0));
    CHECK(hi[0] == doctest::Approx(2.0));
}

TEST_CASE("feasible fleet points lie inside the estimated box")
{
    const HorizonConfig h{2, 1.0, 13};
    const Fleet fleet = generate_fleet({1, 1, 1, 1}, 21);
    const BaseProfiles base = synthetic_profiles(h);
    std::vector<Scenario> pool;
    for (std::uint64_t i = 0; i < 20; ++i)
        pool.push_back(sample_scenario(fleet, h, base, i));
    const HPolytope H = estimate_H(fleet, pool, h);
    const FleetOracle oracle(fleet, h, pool, 5, 0.0);
    DatasetOptions o;
    o.n_target = 40;
    o.seed = 3;
    const LabeledDataset D = generate(oracle, H, o);
    for (const auto& q : D.points)
        if (q.y < 0)
            CHECK(membership(H, q.p, 1e-7));
}

TEST_CASE("generated dataset invariants")
{
    const LabeledDataset D = synthetic_dataset(5);
    const HorizonConfig h{2, 1.0, 0};
    const PolytopeOracle oracle(unit_model(h));
    const HPolytope H = box_polytope(Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2));

    REQUIRE(D.points.size() >= 200);
    const double share = static_cast<double>(D.feasible_count()) / static_cast<double>(D.points.size());
    CHECK(share >= 0.35);
    CHECK(share <= 0.65);

    int interpolated = 0, combos = 0;
    for (const auto& q : D.points)
    {
        CHECK(membership(H, q.p, 1e-12));
        CHECK(oracle.label(q.p, q.draw).y == q.y);
        CHECK((q.y < 0) == (q.c >= 1.0));
        if (q.origin == PointOrigin::Interpolated)
        {
            ++interpolated;
            REQUIRE(q.parents.size() == 2);
            const Eigen::VectorXd expect = q.weights[0] * D.points[q.parents[0]].p +
                q.weights[1] * D.points[q.parents[1]].p;
            CHECK(q.weights[0] == D.kappa);
            CHECK((q.p - expect).lpNorm<Eigen::Infinity>() == 0.0);
        }
        if (q.origin == PointOrigin::ConvexCombo)
        {
            ++combos;
            double total = 0.0;
            for (std::size_t i = 0; i < q.weights.size(); ++i)
            {
                CHECK(q.weights[i] >= 0.0);
                CHECK(D.points[q.parents[i]].y < 0);
                total += q.weights[i];
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK(interpolated > 0);
}

TEST_CASE("generation is reproducible and round-trips through jsonl")
{
    const LabeledDataset a = synthetic_dataset(8, 60);
    const LabeledDataset b = synthetic_dataset(8, 60);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
    {
        CHECK(a.points[i].p == b.points[i].p);
        CHECK(a.points[i].y == b.points[i].y);
    }

    const auto path = std::filesystem::temp_directory_path() / "ofd_dataset_roundtrip.jsonl";
    write_dataset(path, a);
    const LabeledDataset c = read_dataset(path);
    REQUIRE(c.points.size() == a.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
    {
        CHECK(c.points[i].p == a.points[i].p);
        CHECK(c.points[i].c == a.points[i].c);
        CHECK(c.points[i].origin == a.points[i].origin);
        CHECK(c.points[i].parents == a.points[i].parents);
        CHECK(c.points[i].weights == a.points[i].weights);
    }
}

TEST_CASE("labeling budget and argument checks")
{
    const HorizonConfig h{2, 1.0, 0};
    const PolytopeOracle oracle(unit_model(h));
    const HPolytope H = box_polytope(Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2));
    DatasetOptions o;
    o.n_target = 100;
    o.label_budget = 5;
    CHECK_THROWS_AS(generate(oracle, H, o), BudgetExhausted);
    o.label_budget = 0;
    o.kappa = 1.0;
    CHECK_THROWS_AS(generate(oracle, H, o), std::invalid_argument);
}

TEST_CASE("seed mixing separates streams")
{
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
    CHECK(mix_seed(1, 2) != mix_seed(1, 3));
}
