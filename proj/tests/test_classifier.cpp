#include "ofd/classifier.hpp"
#include "ofd/psd.hpp"

#include <doctest.h>

#include <random>

using namespace ofd;

namespace
{

LabeledPoint point(std::initializer_list<double> p, int y)
{
    LabeledPoint q;
    q.p = Eigen::VectorXd(static_cast<Eigen::Index>(p.size()));
    Eigen::Index i = 0;
    for (double v : p)
        q.p[i++] = v;
    q.y = y;
    q.c = y < 0 ? 1.0 : 0.0;
    return q;
}

Ellipsoid unit_ball(int T)
{
    Ellipsoid E;
    E.W2 = Eigen::MatrixXd::Identity(T, T);
    E.w1 = Eigen::VectorXd::Zero(T);
    E.w0 = -1.0;
    return E;
}

// feasible inside the disc of radius 1 around (0.5, -0.3), infeasible in an annulus outside
LabeledDataset disc_dataset(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-2.5, 2.5);
    LabeledDataset D;
    const Eigen::Vector2d c(0.5, -0.3);
    while (static_cast<int>(D.points.size()) < n)
    {
        const Eigen::Vector2d p(U(rng), U(rng));
        const double r = (p - c).norm();
        if (r > 0.9 && r < 1.2)
            continue;
        LabeledPoint q;
        q.p = p;
        q.y = r <= 0.9 ? -1 : 1;
        D.points.push_back(q);
    }
    return D;
}

} // namespace

TEST_CASE("classify sign convention")
{
    const Ellipsoid E = unit_ball(3);
    CHECK(E.margin(Eigen::VectorXd::Zero(3)) == -1.0);
    CHECK(classify(E, Eigen::VectorXd::Zero(3)) == -1);
    CHECK(E.margin(Eigen::Vector3d(2, 0, 0)) == 3.0);
    CHECK(classify(E, Eigen::Vector3d(2, 0, 0)) == 1);
    CHECK(classify(E, Eigen::Vector3d(1, 0, 0)) == -1);
}

TEST_CASE("ball form of axis-aligned ellipsoids")
{
    const BallForm unit = to_ball_form(unit_ball(2));
    CHECK((unit.M - Eigen::Matrix2d::Identity()).norm() < 1e-12);
    CHECK(unit.m.norm() < 1e-12);
    CHECK(unit.r == doctest::Approx(1.0));

    Ellipsoid E = unit_ball(2);
    E.W2 = Eigen::Vector2d(4.0, 1.0).asDiagonal();
    E.w0 = -4.0;
    const BallForm B = to_ball_form(E);
    CHECK((B.M - Eigen::Matrix2d(Eigen::Vector2d(2.0, 1.0).asDiagonal())).norm() < 1e-12);
    CHECK(B.r == doctest::Approx(2.0));

    E.w0 = 1.0;
    CHECK_THROWS_AS(to_ball_form(E), DegenerateEllipsoid);
}

TEST_CASE("ball form agrees with the quadratic on random ellipsoids")
{
    std::mt19937_64 rng(77);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial)
    {
        const int T = 2 + trial % 3;
        Eigen::MatrixXd A(T, T);
        for (int i = 0; i < T; ++i)
            for (int j = 0; j < T; ++j)
                A(i, j) = N(rng);
        Ellipsoid E;
        E.W2 = A * A.transpose() + 0.5 * Eigen::MatrixXd::Identity(T, T);
        E.w1 = Eigen::VectorXd(T);
        for (int t = 0; t < T; ++t)
            E.w1[t] = N(rng);
        E.w0 = -1.0 - std::abs(N(rng));
        const BallForm B = to_ball_form(E);
        int disagree = 0;
        for (int s = 0; s < 2000; ++s)
        {
            Eigen::VectorXd p(T);
            for (int t = 0; t < T; ++t)
                p[t] = 2.0 * N(rng);
            const double d = E.margin(p);
            if (std::abs(d) < 1e-9)
                continue;
            disagree += ((B.M * p + B.m).norm() <= B.r) != (d <= 0.0) ? 1 : 0;
        }
        CHECK(disagree == 0);
    }
}

TEST_CASE("one-dimensional toy is separated")
{
    LabeledDataset D;
    for (double v : {-0.5, 0.0, 0.5})
        D.points.push_back(point({v}, -1));
    for (double v : {-2.0, 2.0})
        D.points.push_back(point({v}, 1));
    TrainOptions o;
    o.train_fraction = 1.0;
    const TrainResult R = train(D, o);
    CHECK(R.report.train_accuracy == 1.0);
    for (const auto& q : D.points)
        CHECK(classify(R.ellipsoid, q.p) == q.y);
}

TEST_CASE("training invariants on a disc")
{
    const LabeledDataset D = disc_dataset(300, 4);
    TrainOptions o;
    o.epochs = 200;
    o.train_fraction = 1.0;
    const TrainResult R = train(D, o);
    CHECK(R.report.best_objective <= R.report.initial_objective);
    CHECK(opt::min_eigenvalue(R.ellipsoid.W2) >= R.report.pd_floor * (1.0 - 1e-9));
    CHECK(R.report.train_accuracy >= 0.95);

    // accuracy over the split reproduces with classify in original coordinates
    TrainOptions split;
    const TrainResult S = train(D, split);
    int correct = 0;
    for (const auto& q : D.points)
        correct += classify(S.ellipsoid, q.p) == q.y ? 1 : 0;
    const double combined = S.report.train_accuracy * S.report.train_size +
        S.report.validation_accuracy * S.report.validation_size;
    CHECK(static_cast<double>(correct) == doctest::Approx(combined).epsilon(1e-9));
    CHECK(S.report.train_size + S.report.validation_size == static_cast<int>(D.points.size()));
    CHECK(S.report.train_size == 240);
}

TEST_CASE("training rejects single-class data")
{
    LabeledDataset D;
    D.points = {point({0.0, 0.0}, -1), point({1.0, 0.0}, -1)};
    CHECK_THROWS_AS(train(D), SingleClassDataset);
}

TEST_CASE("ellipsoid json round trip")
{
    const TrainResult R = train(disc_dataset(80, 9));
    const Ellipsoid E = ellipsoid_from_json(to_json(R.ellipsoid));
    CHECK(E.W2 == R.ellipsoid.W2);
    CHECK(E.w1 == R.ellipsoid.w1);
    CHECK(E.w0 == R.ellipsoid.w0);
}
