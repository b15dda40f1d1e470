#include "ofd/milp.hpp"

#include <doctest.h>

#include <random>

using namespace ofd::opt;

namespace
{

// exhaustive oracle: one LP per binary pattern
double enumerate(const MilpProgram& milp)
{
    const int k = static_cast<int>(milp.binary_indices.size());
    double best = kInf;
    for (long mask = 0; mask < (1L << k); ++mask)
    {
        LinearProgram lp = milp.base;
        for (int i = 0; i < k; ++i)
        {
            const double v = (mask >> i) & 1L ? 1.0 : 0.0;
            lp.lower[milp.binary_indices[i]] = v;
            lp.upper[milp.binary_indices[i]] = v;
        }
        const SolveResult r = solve_lp(lp);
        if (r.optimal())
            best = std::min(best, r.objective);
    }
    return best;
}

// battery-like pieces: charge/discharge linked to a binary mode, plus a
// random target the sum should track in l1
MilpProgram random_instance(std::mt19937_64& rng, int binaries)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int periods = binaries;
    // vars: per period (plus, minus, b), then e+, e- per period
    const int n = 5 * periods;
    MilpProgram m;
    m.base = LinearProgram::nonnegative(n);
    m.base.objective = Eigen::VectorXd::Zero(n);
    const double cap = 1.0 + 2.0 * u(rng);
    const double energy0 = cap * u(rng);
    for (int t = 0; t < periods; ++t)
    {
        const int plus = 3 * t, minus = 3 * t + 1, b = 3 * t + 2;
        m.base.upper[b] = 1.0;
        m.binary_indices.push_back(b);
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
        row[plus] = 1.0;
        row[b] = -cap;
        m.base.add_row(row, Sense::LessEqual, 0.0);
        row.setZero();
        row[minus] = 1.0;
        row[b] = cap;
        m.base.add_row(row, Sense::LessEqual, cap);
        // cumulative energy within [0, cap]
        row.setZero();
        for (int k = 0; k <= t; ++k)
        {
            row[3 * k] = 0.9;
            row[3 * k + 1] = -1.1;
        }
        m.base.add_row(row, Sense::LessEqual, cap - energy0);
        m.base.add_row(row, Sense::GreaterEqual, -energy0);
        // plus - minus + e+ - e- = target
        const int ep = 3 * periods + 2 * t, em = ep + 1;
        row.setZero();
        row[plus] = 1.0;
        row[minus] = -1.0;
        row[ep] = 1.0;
        row[em] = -1.0;
        m.base.add_row(row, Sense::Equal, cap * (2.0 * u(rng) - 1.0) * 1.2);
        m.base.objective[ep] = 1.0;
        m.base.objective[em] = 1.0;
    }
    return m;
}

} // namespace

TEST_CASE("small textbook instances")
{
    MilpProgram m;
    m.base = LinearProgram::nonnegative(2);
    m.base.upper = Eigen::Vector2d::Ones();
    m.base.objective = Eigen::Vector2d(-1.0, -2.0);
    m.base.add_row(Eigen::RowVector2d(1.0, 1.0), Sense::LessEqual, 1.0);
    m.binary_indices = {0, 1};
    const SolveResult r = solve_milp(m);
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(-2.0));
    CHECK(r.solution[0] == doctest::Approx(0.0));
    CHECK(r.solution[1] == doctest::Approx(1.0));

    MilpProgram up;
    up.base = LinearProgram::nonnegative(1);
    up.base.upper[0] = 1.0;
    up.base.objective = Eigen::VectorXd::Ones(1);
    up.base.add_row(Eigen::RowVectorXd::Ones(1), Sense::GreaterEqual, 0.3);
    up.binary_indices = {0};
    const SolveResult forced = solve_milp(up);
    REQUIRE(forced.optimal());
    CHECK(forced.objective == doctest::Approx(1.0));
    CHECK(forced.root_bound == doctest::Approx(0.3));
}

TEST_CASE("binary bounds outside [0,1] are malformed")
{
    MilpProgram m;
    m.base = LinearProgram::nonnegative(1);
    m.binary_indices = {0};
    CHECK_THROWS_AS(solve_milp(m), MalformedProblem);
    m.base.upper[0] = 1.0;
    m.binary_indices = {3};
    CHECK_THROWS_AS(solve_milp(m), MalformedProblem);
}

TEST_CASE("infeasible integer program")
{
    MilpProgram m;
    m.base = LinearProgram::nonnegative(1);
    m.base.upper[0] = 1.0;
    m.base.add_row(Eigen::RowVectorXd::Ones(1), Sense::Equal, 0.5);
    m.binary_indices = {0};
    CHECK(solve_milp(m).status == SolveStatus::Infeasible);
}

TEST_CASE("branch and bound matches exhaustive enumeration")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial)
    {
        const int k = 2 + trial % 9;
        const MilpProgram m = random_instance(rng, k);
        const double oracle = enumerate(m);
        const SolveResult r = solve_milp(m);
        REQUIRE(r.optimal());
        CHECK(r.objective == doctest::Approx(oracle).epsilon(1e-9).scale(1.0));
        CHECK(r.root_bound <= r.objective + 1e-9);
        const SolveResult again = solve_milp(m);
        CHECK(again.objective == r.objective);
    }
}

TEST_CASE("zero-test cutoff stops early on a zero incumbent")
{
    std::mt19937_64 rng(99);
    MilpProgram m = random_instance(rng, 8);
    // make the target trivially trackable: all zeros
    for (int i = 0; i < m.base.num_rows(); ++i)
        if (m.base.senses[i] == Sense::Equal)
            m.base.rhs[i] = 0.0;
    MilpOptions opts;
    opts.stop_at_or_below = 1e-9;
    opts.prune_above = 1e-9;
    const SolveResult r = solve_milp(m, opts);
    REQUIRE(r.has_solution());
    CHECK(r.objective <= 1e-9);
}
