#include "ofd/poly_geom.hpp"

#include "ofd/lp.hpp"
#include "ofd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

namespace ofd
{

void LiftedPolytope::validate() const
{
    if (E2.rows() != E1.rows() || d.size() != E1.rows())
        throw DimensionMismatch("lifted polytope: E1, E2 and d disagree on the row count");
}

bool LiftedPolytope::contains(const Eigen::VectorXd& y, double tol) const
{
    if (y.size() != E1.cols())
        throw DimensionMismatch("lifted polytope: point has the wrong dimension");
    const Eigen::VectorXd slack = d - E1 * y;
    if (aux() == 0)
        return rows() == 0 || slack.minCoeff() >= -tol;
    return opt::inequality_system_feasible(E2, slack, tol);
}

double rotation_accuracy(int nu)
{
    return 1.0 / std::cos(std::numbers::pi / std::pow(2.0, nu + 1)) - 1.0;
}

namespace
{

int tree_levels(int T)
{
    int levels = 0;
    while ((1 << levels) < T)
        ++levels;
    return levels;
}

using Expr = std::map<int, double>;

class Builder
{
    public:
        explicit Builder(int T) : next_(T) {}

        int new_var() { return next_++; }

        void row(const Expr& e, double rhs)
        {
            rows_.push_back(e);
            rhs_.push_back(rhs);
        }

        // rows for |e| <= v
        void abs_bound(const Expr& e, int v)
        {
            Expr plus = e, minus;
            for (const auto& [k, c] : e)
                minus[k] = -c;
            plus[v] -= 1.0;
            minus[v] -= 1.0;
            row(plus, 0.0);
            row(minus, 0.0);
        }

        LiftedPolytope finish(int T) const
        {
            LiftedPolytope L;
            const int m = static_cast<int>(rows_.size());
            const int q = next_ - T;
            L.E1 = Eigen::MatrixXd::Zero(m, T);
            L.E2 = Eigen::MatrixXd::Zero(m, q);
            L.d = Eigen::VectorXd::Zero(m);
            for (int i = 0; i < m; ++i)
            {
                for (const auto& [k, c] : rows_[i])
                {
                    if (k < T)
                        L.E1(i, k) += c;
                    else
                        L.E2(i, k - T) += c;
                }
                L.d[i] = rhs_[i];
            }
            return L;
        }

    private:
        int next_;
        std::vector<Expr> rows_;
        std::vector<double> rhs_;
};

Expr combine(double a, const Expr& x, double b, const Expr& y)
{
    Expr out;
    for (const auto& [k, c] : x)
        out[k] += a * c;
    for (const auto& [k, c] : y)
        out[k] += b * c;
    return out;
}

// 2-D gadget: returns xi_nu with ||(a, b)|| <= xi_nu <= (1 + acc) ||(a, b)|| attainable
Expr disk_node(Builder& B, const Expr& a, const Expr& b, int nu)
{
    const int x0 = B.new_var();
    const int e0 = B.new_var();
    B.abs_bound(a, x0);
    B.abs_bound(b, e0);
    Expr xi{{x0, 1.0}};
    Expr eta{{e0, 1.0}};
    double theta = 0.0;
    for (int j = 1; j <= nu; ++j)
    {
        theta = std::numbers::pi / std::pow(2.0, j + 1);
        const double c = std::cos(theta), s = std::sin(theta);
        const Expr rotated = combine(-s, xi, c, eta);
        const int ej = B.new_var();
        B.abs_bound(rotated, ej);
        xi = combine(c, xi, s, eta);
        eta = Expr{{ej, 1.0}};
    }
    B.row(combine(1.0, eta, -std::tan(theta), xi), 0.0);
    return xi;
}

Expr build_tree(Builder& B, int lo, int hi, int nu)
{
    if (hi - lo == 1)
        return Expr{{lo, 1.0}};
    const int mid = lo + (hi - lo + 1) / 2;
    const Expr left = build_tree(B, lo, mid, nu);
    const Expr right = build_tree(B, mid, hi, nu);
    return disk_node(B, left, right, nu);
}

} // namespace

int rotations_for(int T, double delta)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw InvalidDelta("ball approximation: delta must lie in (0, 1)");
    const int levels = tree_levels(T);
    if (levels == 0)
        return 0;
    for (int nu = 1; nu < 60; ++nu)
        if (std::pow(1.0 + rotation_accuracy(nu), levels) <= 1.0 + delta)
            return nu;
    throw InvalidDelta("ball approximation: delta too small");
}

LiftedPolytope ball_approximation(int T, double r, double delta)
{
    if (T < 1)
        throw DimensionMismatch("ball approximation: T must be positive");
    if (!(r > 0.0))
        throw std::invalid_argument("ball approximation: radius must be positive");
    const int nu = rotations_for(T, delta);
    Builder B(T);
    if (T == 1)
    {
        B.row(Expr{{0, 1.0}}, r);
        B.row(Expr{{0, -1.0}}, r);
        return B.finish(T);
    }
    const Expr root = build_tree(B, 0, T, nu);
    const double inflation = std::pow(1.0 + rotation_accuracy(nu), tree_levels(T));
    B.row(root, r / inflation);
    return B.finish(T);
}

LiftedPolytope map_to_p(const LiftedPolytope& L, const Eigen::MatrixXd& M, const Eigen::VectorXd& m)
{
    L.validate();
    if (M.rows() != L.dim() || M.cols() != L.dim() || m.size() != L.dim())
        throw DimensionMismatch("map_to_p: M and m must match the lifted dimension");
    LiftedPolytope out;
    out.E1 = L.E1 * M;
    out.E2 = L.E2;
    out.d = L.d - L.E1 * m;
    return out;
}

namespace
{

constexpr double kZero = 1e-11;

// Scales rows to unit max-norm and drops trivially satisfied zero rows.
// A zero row with negative rhs is kept: it marks the set as empty.
void normalize(Eigen::MatrixXd& A, Eigen::VectorXd& b)
{
    std::vector<int> keep;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
    {
        const double s = A.row(i).cwiseAbs().maxCoeff();
        if (s <= kZero)
        {
            A.row(i).setZero();
            if (b[i] >= -1e-9)
                continue;
            b[i] = -1.0;
        }
        else
        {
            A.row(i) /= s;
            b[i] /= s;
            for (Eigen::Index k = 0; k < A.cols(); ++k)
                if (std::abs(A(i, k)) <= kZero)
                    A(i, k) = 0.0;
        }
        keep.push_back(static_cast<int>(i));
    }
    Eigen::MatrixXd A2(static_cast<Eigen::Index>(keep.size()), A.cols());
    Eigen::VectorXd b2(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
    {
        A2.row(static_cast<Eigen::Index>(i)) = A.row(keep[i]);
        b2[static_cast<Eigen::Index>(i)] = b[keep[i]];
    }
    A = std::move(A2);
    b = std::move(b2);
}

// Among rows with the same normalized normal keep the tightest.
void drop_parallel(Eigen::MatrixXd& A, Eigen::VectorXd& b)
{
    std::map<std::vector<long long>, int> best;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
    {
        std::vector<long long> key(static_cast<std::size_t>(A.cols()));
        for (Eigen::Index k = 0; k < A.cols(); ++k)
            key[static_cast<std::size_t>(k)] = std::llround(A(i, k) * 1e9);
        auto [it, inserted] = best.emplace(std::move(key), static_cast<int>(i));
        if (!inserted && b[i] < b[it->second])
            it->second = static_cast<int>(i);
    }
    std::vector<int> keep;
    for (const auto& [key, i] : best)
        keep.push_back(i);
    std::sort(keep.begin(), keep.end());
    Eigen::MatrixXd A2(static_cast<Eigen::Index>(keep.size()), A.cols());
    Eigen::VectorXd b2(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
    {
        A2.row(static_cast<Eigen::Index>(i)) = A.row(keep[i]);
        b2[static_cast<Eigen::Index>(i)] = b[keep[i]];
    }
    A = std::move(A2);
    b = std::move(b2);
}

// Sequential LP redundancy removal; each test is against the rows still kept.
void drop_redundant(Eigen::MatrixXd& A, Eigen::VectorXd& b, long budget, long* tests, long* removed)
{
    const Eigen::Index m = A.rows();
    if (m <= 1 || budget <= 0)
        return;
    std::vector<char> alive(static_cast<std::size_t>(m), 1);
    long live = m;
    long used = 0;
    for (Eigen::Index i = 0; i < m && used < budget; ++i)
    {
        if (A.row(i).cwiseAbs().maxCoeff() <= kZero)
            continue;
        Eigen::MatrixXd others(live - 1, A.cols());
        Eigen::VectorXd rhs(live - 1);
        Eigen::Index r = 0;
        for (Eigen::Index j = 0; j < m; ++j)
        {
            if (j == i || !alive[static_cast<std::size_t>(j)])
                continue;
            others.row(r) = A.row(j);
            rhs[r] = b[j];
            ++r;
        }
        ++used;
        const opt::SolveResult s = opt::solve_inequality_lp(-A.row(i).transpose(), others, rhs);
        if (s.optimal() && -s.objective <= b[i] + 1e-9)
        {
            alive[static_cast<std::size_t>(i)] = 0;
            --live;
            if (removed)
                ++*removed;
        }
    }
    if (tests)
        *tests += used;
    Eigen::MatrixXd A2(live, A.cols());
    Eigen::VectorXd b2(live);
    Eigen::Index r = 0;
    for (Eigen::Index j = 0; j < m; ++j)
    {
        if (!alive[static_cast<std::size_t>(j)])
            continue;
        A2.row(r) = A.row(j);
        b2[r] = b[j];
        ++r;
    }
    A = std::move(A2);
    b = std::move(b2);
}

void drop_column(Eigen::MatrixXd& A, Eigen::Index k)
{
    Eigen::MatrixXd out(A.rows(), A.cols() - 1);
    out.leftCols(k) = A.leftCols(k);
    out.rightCols(A.cols() - k - 1) = A.rightCols(A.cols() - k - 1);
    A = std::move(out);
}

} // namespace

HPolytope prune_rows(const HPolytope& P, long lp_budget, long* lp_tests)
{
    P.validate();
    Eigen::MatrixXd A = P.A;
    Eigen::VectorXd b = P.b;
    normalize(A, b);
    drop_parallel(A, b);
    drop_redundant(A, b, lp_budget, lp_tests, nullptr);
    HPolytope out;
    out.A = std::move(A);
    out.b = std::move(b);
    for (int i = 0; i < out.rows(); ++i)
        out.tags.push_back("row" + std::to_string(i));
    return out;
}

HPolytope fourier_motzkin(const LiftedPolytope& L, const FmOptions& options, FmStats* stats)
{
    L.validate();
    const int T = L.dim();
    Eigen::MatrixXd A(L.rows(), T + L.aux());
    A << L.E1, L.E2;
    Eigen::VectorXd b = L.d;
    FmStats local;
    local.peak_rows = A.rows();
    normalize(A, b);
    drop_parallel(A, b);

    while (A.cols() > T)
    {
        // greedy: the auxiliary producing the fewest combinations
        Eigen::Index pick = T;
        long best = std::numeric_limits<long>::max();
        for (Eigen::Index k = T; k < A.cols(); ++k)
        {
            long pos = 0, neg = 0;
            for (Eigen::Index i = 0; i < A.rows(); ++i)
            {
                if (A(i, k) > kZero)
                    ++pos;
                else if (A(i, k) < -kZero)
                    ++neg;
            }
            const long cost = pos * neg - pos - neg;
            if (cost < best)
            {
                best = cost;
                pick = k;
            }
        }

        std::vector<Eigen::Index> pos, neg, zero;
        for (Eigen::Index i = 0; i < A.rows(); ++i)
        {
            if (A(i, pick) > kZero)
                pos.push_back(i);
            else if (A(i, pick) < -kZero)
                neg.push_back(i);
            else
                zero.push_back(i);
        }
        const long count = static_cast<long>(zero.size() + pos.size() * neg.size());
        if (count > options.row_cap)
            throw RowExplosion("fourier_motzkin: " + std::to_string(count) + " rows exceed the cap of "
                + std::to_string(options.row_cap));

        Eigen::MatrixXd next(count, A.cols());
        Eigen::VectorXd rhs(count);
        Eigen::Index r = 0;
        for (Eigen::Index i : zero)
        {
            next.row(r) = A.row(i);
            rhs[r] = b[i];
            ++r;
        }
        for (Eigen::Index i : pos)
        {
            for (Eigen::Index j : neg)
            {
                const double ci = A(i, pick), cj = -A(j, pick);
                next.row(r) = cj * A.row(i) + ci * A.row(j);
                rhs[r] = cj * b[i] + ci * b[j];
                next(r, pick) = 0.0;
                ++r;
            }
        }
        drop_column(next, pick);
        A = std::move(next);
        b = std::move(rhs);
        local.peak_rows = std::max<long>(local.peak_rows, A.rows());
        ++local.eliminated;

        normalize(A, b);
        drop_parallel(A, b);
        drop_redundant(A, b, options.prune_budget, &local.lp_tests, &local.lp_removed);
    }

    HPolytope out;
    out.A = std::move(A);
    out.b = std::move(b);
    for (int i = 0; i < out.rows(); ++i)
        out.tags.push_back("pd" + std::to_string(i));
    if (stats)
        *stats = local;
    return out;
}

double support(const HPolytope& P, const Eigen::VectorXd& u)
{
    if (u.size() != P.dim())
        throw DimensionMismatch("support: direction has the wrong dimension");
    const opt::SolveResult r = opt::solve_inequality_lp(-u, P.A, P.b);
    switch (r.status)
    {
        case opt::SolveStatus::Optimal:
            return -r.objective;
        case opt::SolveStatus::Unbounded:
            throw UnboundedPolytope("support: polytope is unbounded in the given direction");
        default:
            throw EmptyPolytope("support: polytope is empty");
    }
}

ContainmentCertificate certify_containment(const HPolytope& inner, const HPolytope& outer, double tol, int workers)
{
    if (inner.dim() != outer.dim())
        throw DimensionMismatch("certify_containment: dimension mismatch");
    if (!opt::inequality_system_feasible(inner.A, inner.b))
        throw EmptyInner("certify_containment: inner polytope is empty");

    std::vector<double> slack(static_cast<std::size_t>(outer.rows()));
    parallel_for(slack.size(), workers, [&](std::size_t i) {
        const auto row = static_cast<Eigen::Index>(i);
        try
        {
            slack[i] = outer.b[row] - support(inner, outer.A.row(row).transpose());
        }
        catch (const UnboundedPolytope&)
        {
            slack[i] = -opt::kInf;
        }
    });

    ContainmentCertificate cert;
    cert.worst_slack = opt::kInf;
    for (std::size_t i = 0; i < slack.size(); ++i)
    {
        if (slack[i] < cert.worst_slack)
        {
            cert.worst_slack = slack[i];
            cert.worst_row = static_cast<int>(i);
        }
    }
    cert.contained = cert.worst_slack >= -tol;
    return cert;
}

} // namespace ofd
