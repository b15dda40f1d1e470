#include "ofd/lp.hpp"

#include <doctest.h>

#include <random>

using namespace ofd::opt;

TEST_CASE("box vertex maximizes x1 + x2")
{
    LinearProgram lp = LinearProgram::nonnegative(2);
    lp.objective = Eigen::Vector2d(-1.0, -1.0);
    lp.add_row(Eigen::RowVector2d(1.0, 0.0), Sense::LessEqual, 1.0);
    lp.add_row(Eigen::RowVector2d(0.0, 1.0), Sense::LessEqual, 1.0);
    const SolveResult r = solve_lp(lp);
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(-2.0));
    CHECK(r.solution[0] == doctest::Approx(1.0));
    CHECK(r.solution[1] == doctest::Approx(1.0));
}

TEST_CASE("empty interval is infeasible")
{
    LinearProgram lp = LinearProgram::free(1);
    lp.add_row(Eigen::RowVectorXd::Constant(1, 1.0), Sense::LessEqual, -1.0);
    lp.add_row(Eigen::RowVectorXd::Constant(1, 1.0), Sense::GreaterEqual, 0.0);
    CHECK(solve_lp(lp).status == SolveStatus::Infeasible);
}

TEST_CASE("free ray is unbounded")
{
    LinearProgram lp = LinearProgram::nonnegative(1);
    lp.objective = Eigen::VectorXd::Constant(1, -1.0);
    CHECK(solve_lp(lp).status == SolveStatus::Unbounded);
}

TEST_CASE("malformed programs are rejected")
{
    LinearProgram lp = LinearProgram::nonnegative(2);
    lp.rhs = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(solve_lp(lp), MalformedProblem);

    LinearProgram bad_bounds = LinearProgram::nonnegative(1);
    bad_bounds.lower[0] = 2.0;
    bad_bounds.upper[0] = 1.0;
    CHECK_THROWS_AS(solve_lp(bad_bounds), MalformedProblem);
}

namespace
{

LinearProgram random_lp(std::mt19937_64& rng, int m, int n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
    lp.A = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return u(rng); });
    // a known interior point keeps the instance feasible
    const Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(n, [&] { return 0.5 * u(rng); });
    const Eigen::VectorXd ax = lp.A * x0;
    lp.rhs.resize(m);
    for (int i = 0; i < m; ++i)
    {
        const int kind = static_cast<int>(rng() % 3);
        lp.senses.push_back(kind == 0 ? Sense::LessEqual : kind == 1 ? Sense::GreaterEqual : Sense::Equal);
        const double slack = kind == 2 ? 0.0 : 0.3 * (u(rng) + 1.0);
        lp.rhs[i] = kind == 0 ? ax[i] + slack : ax[i] - slack;
    }
    lp.lower = Eigen::VectorXd::Constant(n, -1.0);
    lp.upper = Eigen::VectorXd::Constant(n, 1.0);
    for (int j = 0; j < n; j += 3)
        lp.upper[j] = kInf;
    for (int j = 1; j < n; j += 4)
        lp.lower[j] = -kInf;
    // keep it bounded: every variable box-limited by a row
    for (int j = 0; j < n; ++j)
    {
        Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
        e[j] = 1.0;
        lp.add_row(e, Sense::LessEqual, 2.0);
        lp.add_row(e, Sense::GreaterEqual, -2.0);
    }
    return lp;
}

} // namespace

TEST_CASE("optimal solutions are feasible and carry a tight dual certificate")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial)
    {
        const int m = 1 + static_cast<int>(rng() % 8);
        const int n = 1 + static_cast<int>(rng() % 8);
        const LinearProgram lp = random_lp(rng, m, n);
        const SolveResult r = solve_lp(lp);
        REQUIRE(r.optimal());
        const double tol = feasibility_tolerance(lp);
        const Eigen::VectorXd ax = lp.A * r.solution;
        for (int i = 0; i < lp.num_rows(); ++i)
        {
            if (lp.senses[i] != Sense::GreaterEqual)
                CHECK(ax[i] <= lp.rhs[i] + tol);
            if (lp.senses[i] != Sense::LessEqual)
                CHECK(ax[i] >= lp.rhs[i] - tol);
        }
        CHECK((r.solution - lp.lower).minCoeff() >= -tol);
        CHECK((lp.upper - r.solution).minCoeff() >= -tol);
        CHECK(std::abs(r.objective - r.dual_objective) <= 1e-6 * (1.0 + std::abs(r.objective)));

        // dual sign conventions: y <= 0 on <= rows, y >= 0 on >= rows (minimization)
        for (int i = 0; i < lp.num_rows(); ++i)
        {
            if (lp.senses[i] == Sense::LessEqual)
                CHECK(r.duals[i] <= 1e-7);
            if (lp.senses[i] == Sense::GreaterEqual)
                CHECK(r.duals[i] >= -1e-7);
        }

        // determinism
        const SolveResult again = solve_lp(lp);
        CHECK(again.status == r.status);
        CHECK(again.objective == r.objective);
    }
}

TEST_CASE("random feasible points never beat the optimum")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        // box-constrained so that random sampling covers the feasible set
        const int n = 2 + static_cast<int>(rng() % 3);
        LinearProgram lp;
        lp.objective = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
        lp.A = Eigen::MatrixXd::NullaryExpr(3, n, [&] { return u(rng); });
        lp.rhs = Eigen::VectorXd::Constant(3, 0.5);
        lp.senses.assign(3, Sense::LessEqual);
        lp.lower = Eigen::VectorXd::Constant(n, -1.0);
        lp.upper = Eigen::VectorXd::Constant(n, 1.0);
        const SolveResult r = solve_lp(lp);
        REQUIRE(r.optimal());
        for (int s = 0; s < 2000; ++s)
        {
            const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
            if (((lp.A * x - lp.rhs).array() <= 0.0).all())
                CHECK(lp.objective.dot(x) >= r.objective - 1e-9);
        }
    }
}

TEST_CASE("inequality LP through the dual")
{
    // maximize v1 + v2 over the unit box
    Eigen::MatrixXd A(4, 2);
    A << 1, 0, 0, 1, -1, 0, 0, -1;
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(4);
    const SolveResult r = solve_inequality_lp(Eigen::Vector2d(-1.0, -1.0), A, b);
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(-2.0));
    CHECK(r.solution[0] == doctest::Approx(1.0));
    CHECK(r.solution[1] == doctest::Approx(1.0));

    Eigen::MatrixXd halfplane(1, 2);
    halfplane << 1, 0;
    CHECK(solve_inequality_lp(Eigen::Vector2d(-1.0, 0.0), halfplane, Eigen::VectorXd::Ones(1)).optimal());
    CHECK(solve_inequality_lp(Eigen::Vector2d(1.0, 0.0), halfplane, Eigen::VectorXd::Ones(1)).status ==
        SolveStatus::Unbounded);

    Eigen::MatrixXd clash(2, 1);
    clash << 1, -1;
    CHECK(solve_inequality_lp(Eigen::VectorXd::Ones(1), clash, Eigen::Vector2d(-1.0, 0.0)).status ==
        SolveStatus::Infeasible);
    CHECK_FALSE(inequality_system_feasible(clash, Eigen::Vector2d(-1.0, 0.0)));
    CHECK(inequality_system_feasible(A, b));
}

TEST_CASE("inequality LP agrees with the primal simplex")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial)
    {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int m = n + 1 + static_cast<int>(rng() % 20);
        Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return u(rng); });
        Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(m, [&] { return u(rng) + 0.2; });
        const Eigen::VectorXd c = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });

        LinearProgram lp = LinearProgram::free(n);
        lp.objective = c;
        for (int i = 0; i < m; ++i)
            lp.add_row(A.row(i), Sense::LessEqual, b[i]);
        const SolveResult primal = solve_lp(lp);
        const SolveResult tall = solve_inequality_lp(c, A, b);
        REQUIRE(primal.status == tall.status);
        if (primal.optimal())
        {
            CHECK(tall.objective == doctest::Approx(primal.objective).epsilon(1e-7));
            CHECK(((A * tall.solution - b).array() <= 1e-7).all());
        }
    }
}
