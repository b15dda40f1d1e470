#include "ofd/disagg.hpp"
#include "ofd/eval.hpp"
#include "ofd/flex_design.hpp"

#include <doctest.h>

#include <cmath>

using namespace ofd;

namespace
{

HPolytope unit_cube(int T)
{
    return box_polytope(Eigen::VectorXd::Zero(T), Eigen::VectorXd::Ones(T));
}

HPolytope simplex(int T)
{
    HPolytope P;
    P.A.resize(T + 1, T);
    P.A.topRows(T) = -Eigen::MatrixXd::Identity(T, T);
    P.A.row(T).setOnes();
    P.b = Eigen::VectorXd::Zero(T + 1);
    P.b[T] = 1.0;
    return P;
}

LabeledPoint labeled(double a, double b, int y)
{
    LabeledPoint q;
    q.p = Eigen::Vector2d(a, b);
    q.y = y;
    q.c = y < 0 ? 1.0 : 0.0;
    return q;
}

} // namespace

TEST_CASE("bounding boxes")
{
    const Box cube = bounding_box(unit_cube(3));
    CHECK(cube.lo.isZero(1e-12));
    CHECK((cube.hi.array() - 1.0).abs().maxCoeff() < 1e-12);

    const Box tri = bounding_box(simplex(3));
    CHECK(tri.lo.isZero(1e-12));
    CHECK((tri.hi.array() - 1.0).abs().maxCoeff() < 1e-12);

    // symmetric unit limits with s0 = 0.5: the SoC and ramp rows bind
    AggregatorModelVars v;
    v.p_max = Eigen::Vector2d::Ones();
    v.p_min = -Eigen::Vector2d::Ones();
    v.s0 = 0.5;
    v.s_max = Eigen::Vector2d::Ones();
    v.s_min = Eigen::Vector2d::Zero();
    v.ramp_up = Eigen::VectorXd::Ones(1);
    v.ramp_dn = -Eigen::VectorXd::Ones(1);
    const HorizonConfig h{2, 1.0, 0};
    const Box b = bounding_box(market_polytope(build_G(h), build_x(v, h)));
    CHECK(b.lo[0] == doctest::Approx(-0.5));
    CHECK(b.hi[0] == doctest::Approx(0.5));
    CHECK(b.lo[1] == doctest::Approx(-0.75));
    CHECK(b.hi[1] == doctest::Approx(0.75));
}

TEST_CASE("volume estimates")
{
    const VolumeEstimate cube = mc_volume(unit_cube(3), 10000, 1);
    CHECK(cube.estimate == 1.0);
    CHECK(cube.hits == cube.samples);

    for (int T : {2, 3, 4})
    {
        const VolumeEstimate s = mc_volume(simplex(T), 1000000, 7);
        const double exact = 1.0 / std::tgamma(T + 1.0);
        CAPTURE(T);
        CHECK(std::abs(s.estimate - exact) <= 3.0 * s.std_error);
    }

    const Box unit{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
    for (double t : {0.25, 0.5, 0.75})
    {
        HPolytope slice = unit_cube(2);
        slice.b[0] = t;
        const VolumeEstimate e = mc_volume_in_box(slice, unit, 200000, 3);
        CHECK(std::abs(e.estimate - t) <= 3.0 * e.std_error);
    }

    CHECK(mc_volume(simplex(3), 5000, 9, 1).hits == mc_volume(simplex(3), 5000, 9, 4).hits);
    CHECK_THROWS_AS(mc_volume(unit_cube(2), 0, 1), InvalidCount);
}

TEST_CASE("scaled replica volume")
{
    const HorizonConfig h{2, 1.0, 0};
    const Eigen::MatrixXd G = build_G(h);
    const std::vector<Eigen::VectorXd> pts = {Eigen::Vector2d(0.4, -0.2), Eigen::Vector2d(-0.1, 0.3),
        Eigen::Vector2d(-0.3, -0.3), Eigen::Vector2d(0.2, 0.5)};
    const Eigen::VectorXd x_bar = compute_prototype(pts, G);
    const HPolytope PD = box_polytope(Eigen::Vector2d(-0.2, -0.2), Eigen::Vector2d(0.2, 0.2));
    const DesignResult r = farkas_design(x_bar, G, PD);
    const VolumeEstimate proto = mc_volume(market_polytope(G, x_bar), 1000000, 21);
    const VolumeEstimate star = mc_volume(market_polytope(G, r.x_star), 1000000, 22);
    const double predicted = volume_scale(proto.estimate, r.beta, 2);
    const double sigma = std::hypot(star.std_error, proto.std_error / std::pow(r.beta, 2));
    CHECK(std::abs(star.estimate - predicted) <= 3.0 * sigma);
}

TEST_CASE("convexity metric on datasets")
{
    LabeledDataset D;
    D.points = {labeled(0, 0, -1), labeled(1, 0, -1), labeled(0, 1, -1), labeled(0.3, 0.3, 1)};
    CHECK(metric_M1(D) == 1.0);

    D.points.back() = labeled(1, 1, 1);
    CHECK(metric_M1(D) == 0.0);

    D.points.push_back(labeled(0.2, 0.1, 1));
    CHECK(metric_M1(D) == 0.5);
    LabeledDataset dup = D;
    for (int i = 0; i < 3; ++i)
        dup.points.push_back(D.points[static_cast<std::size_t>(i)]);
    CHECK(metric_M1(dup) == metric_M1(D));

    LabeledDataset copies;
    copies.points = {labeled(0, 0, -1), labeled(1, 0, -1), labeled(0, 0, 1), labeled(1, 0, 1)};
    CHECK(metric_M1(copies) == 1.0);

    LabeledDataset single;
    single.points = {labeled(0, 0, -1)};
    CHECK_THROWS_AS(metric_M1(single), SingleClassDataset);

    CHECK(in_convex_hull({Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 0), Eigen::Vector2d(0, 2)},
        Eigen::Vector2d(1, 1)));
}

TEST_CASE("hull sampling metric")
{
    const PolytopeOracle oracle(box_polytope(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1)));
    LabeledDataset D;
    D.points = {labeled(-1, -1, -1), labeled(1, -1, -1), labeled(0, 1, -1), labeled(3, 3, 1)};
    M2Options o;
    o.samples = 50;
    const M2Result inside = metric_M2(D, oracle, o);
    CHECK(inside.fraction == 0.0);
    CHECK(inside.points.size() == 50);
    for (const auto& p : inside.points)
        CHECK(in_convex_hull({D.points[0].p, D.points[1].p, D.points[2].p}, p, 1e-7));

    LabeledDataset one;
    one.points = {labeled(2, 2, -1), labeled(0, 0, 1)};
    CHECK(metric_M2(one, oracle, o).fraction == 1.0);
    one.points[0] = labeled(0.5, 0.5, -1);
    CHECK(metric_M2(one, oracle, o).fraction == 0.0);

    o.samples = 0;
    CHECK_THROWS_AS(metric_M2(D, oracle, o), InvalidCount);
}

TEST_CASE("polygon vertices of a box")
{
    const auto v = polygon_vertices(box_polytope(Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 1)));
    REQUIRE(v.size() == 4);
    double area = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        area += a.x() * b.y() - a.y() * b.x();
    }
    CHECK(area / 2.0 == doctest::Approx(2.0));
}
