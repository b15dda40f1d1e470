#include "ofd/psd.hpp"

#include <doctest.h>

#include <random>

using namespace ofd::opt;

TEST_CASE("projection of PSD and diagonal matrices")
{
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
    CHECK((project_psd(I) - I).norm() < 1e-14);
    const Eigen::Matrix2d D = Eigen::Vector2d(1.0, -2.0).asDiagonal();
    const Eigen::Matrix2d expected = Eigen::Vector2d(1.0, 0.0).asDiagonal();
    CHECK((project_psd(D) - expected).norm() < 1e-14);
}

TEST_CASE("non-finite input is rejected")
{
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2, 2);
    S(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(project_psd(S), NonFiniteEntries);
}

TEST_CASE("projection is a Frobenius minimizer over the PSD cone")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 30; ++trial)
    {
        const int n = 2 + trial % 4;
        Eigen::MatrixXd S = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return n01(rng); });
        S = (0.5 * (S + S.transpose())).eval();
        const Eigen::MatrixXd R = project_psd(S);
        CHECK(min_eigenvalue(R) >= -1e-10);
        const double base = (S - R).norm();
        // perturbations that stay in the cone never get closer
        for (int k = 0; k < 200; ++k)
        {
            Eigen::MatrixXd E = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return n01(rng); });
            E = (0.5 * (E + E.transpose())).eval();
            for (double t : {1e-3, 1e-2, 1e-1})
            {
                const Eigen::MatrixXd cand = R + t * E;
                if (min_eigenvalue(cand) >= 0.0)
                    CHECK((S - cand).norm() >= base - 1e-12);
            }
        }
    }
}

TEST_CASE("square roots")
{
    Eigen::Matrix2d A;
    A << 4, 1, 1, 3;
    const Eigen::MatrixXd root = sqrt_psd(A);
    CHECK((root * root - A).norm() < 1e-12);
    const Eigen::MatrixXd inv_root = inv_sqrt_pd(A);
    CHECK((inv_root * root - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
    CHECK_THROWS(inv_sqrt_pd(Eigen::Matrix2d(Eigen::Vector2d(1.0, 0.0).asDiagonal())));
}
