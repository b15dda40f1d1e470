#include "ofd/eval.hpp"

#include "ofd/lp.hpp"
#include "ofd/parallel.hpp"
#include "ofd/poly_geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace ofd
{

Box bounding_box(const HPolytope& P, int workers)
{
    P.validate();
    const int T = P.dim();
    std::vector<double> values(static_cast<std::size_t>(2 * T));
    parallel_for(values.size(), workers, [&](std::size_t k) {
        const int t = static_cast<int>(k) / 2;
        Eigen::VectorXd u = Eigen::VectorXd::Zero(T);
        u[t] = (k % 2 == 0) ? -1.0 : 1.0;
        values[k] = support(P, u);
    });
    Box box{Eigen::VectorXd(T), Eigen::VectorXd(T)};
    for (int t = 0; t < T; ++t)
    {
        box.lo[t] = -values[static_cast<std::size_t>(2 * t)];
        box.hi[t] = values[static_cast<std::size_t>(2 * t + 1)];
    }
    return box;
}

namespace
{

constexpr int kShards = 64;

} // namespace

VolumeEstimate mc_volume_in_box(const HPolytope& P, const Box& box, long samples, std::uint64_t seed, int workers)
{
    if (samples <= 0)
        throw InvalidCount("mc_volume: sample count must be positive");
    if (box.lo.size() != P.dim())
        throw DimensionMismatch("mc_volume: box dimension differs from the polytope");
    std::vector<long> hits(kShards, 0);
    parallel_for(kShards, workers, [&](std::size_t s) {
        const long n = samples / kShards + (static_cast<long>(s) < samples % kShards ? 1 : 0);
        std::mt19937_64 rng(mix_seed(seed, s));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        Eigen::VectorXd x(P.dim());
        long h = 0;
        for (long i = 0; i < n; ++i)
        {
            for (Eigen::Index t = 0; t < x.size(); ++t)
                x[t] = box.lo[t] + (box.hi[t] - box.lo[t]) * U(rng);
            if (membership(P, x, 1e-12))
                ++h;
        }
        hits[s] = h;
    });
    VolumeEstimate v;
    v.samples = samples;
    v.seed = seed;
    v.box_volume = box.volume();
    for (long h : hits)
        v.hits += h;
    const double ratio = static_cast<double>(v.hits) / static_cast<double>(samples);
    v.estimate = ratio * v.box_volume;
    v.std_error = v.box_volume * std::sqrt(ratio * (1.0 - ratio) / static_cast<double>(samples));
    return v;
}

VolumeEstimate mc_volume(const HPolytope& P, long samples, std::uint64_t seed, int workers)
{
    return mc_volume_in_box(P, bounding_box(P, workers), samples, seed, workers);
}

std::vector<Eigen::VectorXd> sample_polytope(const HPolytope& P, int count, std::uint64_t seed)
{
    if (count < 0)
        throw InvalidCount("sample_polytope: negative count");
    const Box box = bounding_box(P);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Eigen::VectorXd> out;
    Eigen::VectorXd x(P.dim());
    long tries = 0;
    while (static_cast<int>(out.size()) < count)
    {
        if (++tries > 1000000L * std::max(count, 1))
            throw std::runtime_error("sample_polytope: rejection sampling made no progress");
        for (Eigen::Index t = 0; t < x.size(); ++t)
            x[t] = box.lo[t] + (box.hi[t] - box.lo[t]) * U(rng);
        if (membership(P, x, 0.0))
            out.push_back(x);
    }
    return out;
}

bool in_convex_hull(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& p, double tol)
{
    if (points.empty())
        return false;
    const int n = static_cast<int>(points.size());
    const int T = static_cast<int>(p.size());
    opt::LinearProgram lp = opt::LinearProgram::nonnegative(n);
    lp.A.resize(T + 1, n);
    for (int k = 0; k < n; ++k)
    {
        lp.A.col(k).head(T) = points[static_cast<std::size_t>(k)];
        lp.A(T, k) = 1.0;
    }
    lp.rhs.resize(T + 1);
    lp.rhs.head(T) = p;
    lp.rhs[T] = 1.0;
    lp.senses.assign(static_cast<std::size_t>(T + 1), opt::Sense::Equal);
    opt::LpOptions o;
    o.feasibility_tol = tol;
    return opt::solve_lp(lp, o).optimal();
}

double metric_M1(const LabeledDataset& D, int workers)
{
    const auto feasible = D.feasible_points();
    const auto infeasible = D.infeasible_points();
    if (feasible.empty() || infeasible.empty())
        throw SingleClassDataset("metric_M1: both classes are required");
    std::vector<char> inside(infeasible.size(), 0);
    parallel_for(infeasible.size(), workers, [&](std::size_t i) {
        inside[i] = in_convex_hull(feasible, infeasible[i]) ? 1 : 0;
    });
    const long count = std::count(inside.begin(), inside.end(), 1);
    return static_cast<double>(count) / static_cast<double>(infeasible.size());
}

namespace
{

// largest t with x + t u in conv(points)
double chord_end(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& x, const Eigen::VectorXd& u)
{
    const int n = static_cast<int>(points.size());
    const int T = static_cast<int>(x.size());
    opt::LinearProgram lp = opt::LinearProgram::nonnegative(n + 1);
    lp.lower[n] = -opt::kInf;
    lp.objective[n] = -1.0;
    lp.A.resize(T + 1, n + 1);
    for (int k = 0; k < n; ++k)
    {
        lp.A.col(k).head(T) = points[static_cast<std::size_t>(k)];
        lp.A(T, k) = 1.0;
    }
    lp.A.col(n).head(T) = -u;
    lp.A(T, n) = 0.0;
    lp.rhs.resize(T + 1);
    lp.rhs.head(T) = x;
    lp.rhs[T] = 1.0;
    lp.senses.assign(static_cast<std::size_t>(T + 1), opt::Sense::Equal);
    const opt::SolveResult r = opt::solve_lp(lp);
    if (!r.optimal())
        return 0.0;
    return std::max(0.0, r.solution[n]);
}

} // namespace

std::vector<Eigen::VectorXd> sample_hull(const std::vector<Eigen::VectorXd>& points, const M2Options& options)
{
    if (options.samples <= 0)
        throw InvalidCount("sample_hull: sample count must be positive");
    if (points.empty())
        throw InvalidCount("sample_hull: no points span the hull");
    const int T = static_cast<int>(points.front().size());
    std::mt19937_64 rng(options.seed);
    std::vector<Eigen::VectorXd> out;

    if (options.sampler == HullSampler::Dirichlet)
    {
        std::exponential_distribution<double> Exp(1.0);
        for (int s = 0; s < options.samples; ++s)
        {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(T);
            double total = 0.0;
            for (const auto& p : points)
            {
                const double w = Exp(rng);
                x += w * p;
                total += w;
            }
            out.push_back(x / total);
        }
        return out;
    }

    const int steps = options.steps > 0 ? options.steps : 5 * T * T;
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(T);
    for (const auto& p : points)
        x += p;
    x /= static_cast<double>(points.size());

    auto step = [&] {
        Eigen::VectorXd u(T);
        for (int t = 0; t < T; ++t)
            u[t] = N(rng);
        u /= u.norm();
        const double hi = chord_end(points, x, u);
        const double lo = -chord_end(points, x, -u);
        x += (lo + (hi - lo) * U(rng)) * u;
    };
    for (int k = 0; k < steps; ++k)
        step();
    for (int s = 0; s < options.samples; ++s)
    {
        for (int k = 0; k < steps; ++k)
            step();
        out.push_back(x);
    }
    return out;
}

M2Result metric_M2(const LabeledDataset& D, const FeasibilityOracle& oracle, const M2Options& options)
{
    if (options.samples <= 0)
        throw InvalidCount("metric_M2: sample count must be positive");
    M2Result out;
    out.points = sample_hull(D.feasible_points(), options);
    long infeasible = 0;
    for (std::size_t i = 0; i < out.points.size(); ++i)
    {
        const LabelResult L = oracle.label(out.points[i], mix_seed(options.seed, 1000 + i));
        out.labels.push_back(L.y);
        if (L.y > 0)
            ++infeasible;
    }
    out.fraction = static_cast<double>(infeasible) / static_cast<double>(out.points.size());
    return out;
}

std::vector<Eigen::Vector2d> polygon_vertices(const HPolytope& P)
{
    if (P.dim() != 2)
        throw DimensionMismatch("polygon_vertices: needs a 2-D polytope");
    std::vector<Eigen::Vector2d> vertices;
    for (int i = 0; i < P.rows(); ++i)
    {
        for (int j = i + 1; j < P.rows(); ++j)
        {
            Eigen::Matrix2d A;
            A.row(0) = P.A.row(i);
            A.row(1) = P.A.row(j);
            if (std::abs(A.determinant()) < 1e-12)
                continue;
            const Eigen::Vector2d v = A.partialPivLu().solve(Eigen::Vector2d(P.b[i], P.b[j]));
            if (!membership(P, v, 1e-9))
                continue;
            const bool seen = std::any_of(vertices.begin(), vertices.end(),
                [&](const Eigen::Vector2d& w) { return (w - v).norm() < 1e-9; });
            if (!seen)
                vertices.push_back(v);
        }
    }
    if (vertices.empty())
        return vertices;
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& v : vertices)
        c += v;
    c /= static_cast<double>(vertices.size());
    std::sort(vertices.begin(), vertices.end(), [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return std::atan2(a.y() - c.y(), a.x() - c.x()) < std::atan2(b.y() - c.y(), b.x() - c.x());
    });
    return vertices;
}

std::string polygon_csv(const std::string& series, const HPolytope& P)
{
    std::ostringstream out;
    out.precision(17);
    const auto vertices = polygon_vertices(P);
    for (std::size_t k = 0; k <= vertices.size() && !vertices.empty(); ++k)
    {
        const auto& v = vertices[k % vertices.size()];
        out << series << ',' << v.x() << ',' << v.y() << '\n';
    }
    return out.str();
}

std::string ellipse_csv(const std::string& series, const Ellipsoid& E, int points)
{
    if (E.dim() != 2)
        throw DimensionMismatch("ellipse_csv: needs a 2-D ellipsoid");
    const BallForm B = to_ball_form(E);
    const Eigen::Matrix2d Minv = B.M.inverse();
    std::ostringstream out;
    out.precision(17);
    for (int k = 0; k <= points; ++k)
    {
        const double a = 2.0 * std::numbers::pi * k / points;
        const Eigen::Vector2d p = Minv * (B.r * Eigen::Vector2d(std::cos(a), std::sin(a)) - B.m);
        out << series << ',' << p.x() << ',' << p.y() << '\n';
    }
    return out.str();
}

std::string dataset_csv(const LabeledDataset& D)
{
    std::ostringstream out;
    out.precision(17);
    for (const auto& pt : D.points)
    {
        if (pt.p.size() != 2)
            throw DimensionMismatch("dataset_csv: needs 2-D points");
        out << (pt.y < 0 ? "feasible" : "infeasible") << ',' << pt.p[0] << ',' << pt.p[1] << '\n';
    }
    return out.str();
}

} // namespace ofd
