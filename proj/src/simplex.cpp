#include "simplex.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace ofd::opt::detail
{

BoundedSimplex::BoundedSimplex(const LinearProgram& lp, const LpOptions& options, bool validated)
    : options_(options)
{
    if (!validated)
        lp.validate();
    m_ = lp.num_rows();
    n_ = lp.num_vars();
    total_ = n_ + m_;

    col_start_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j)
    {
        for (int i = 0; i < m_; ++i)
        {
            const double a = lp.A(i, j);
            if (a != 0.0)
            {
                row_index_.push_back(i);
                values_.push_back(a);
            }
        }
        col_start_[j + 1] = static_cast<int>(row_index_.size());
    }

    b_ = lp.rhs;
    cost_ = Eigen::VectorXd::Zero(total_);
    cost_.head(n_) = lp.objective;
    lo_.resize(total_);
    hi_.resize(total_);
    lo_.head(n_) = lp.lower;
    hi_.head(n_) = lp.upper;
    for (int i = 0; i < m_; ++i)
    {
        switch (lp.senses[i])
        {
            case Sense::LessEqual: lo_[n_ + i] = 0.0; hi_[n_ + i] = kInf; break;
            case Sense::GreaterEqual: lo_[n_ + i] = -kInf; hi_[n_ + i] = 0.0; break;
            case Sense::Equal: lo_[n_ + i] = 0.0; hi_[n_ + i] = 0.0; break;
        }
    }

    feas_tol_ = feasibility_tolerance(lp, options_);
    iteration_limit_ = options_.iteration_limit > 0 ? options_.iteration_limit
                                                    : 50L * (m_ + n_) + 10000L;

    x_ = Eigen::VectorXd::Zero(total_);
    state_.assign(total_, State::Lower);
    head_.resize(m_);
    for (int i = 0; i < m_; ++i)
    {
        head_[i] = n_ + i;
        state_[n_ + i] = State::Basic;
    }
    for (int j = 0; j < n_; ++j)
    {
        state_[j] = State::Lower;
        place_nonbasic(j);
    }
    binv_.setIdentity(m_, m_);
    if (options_.warm_start && load_basis(*options_.warm_start))
        return;
    compute_basic_values();
}

Basis BoundedSimplex::basis() const
{
    Basis out;
    out.head = head_;
    out.status.resize(static_cast<std::size_t>(total_));
    for (int j = 0; j < total_; ++j)
        out.status[static_cast<std::size_t>(j)] = static_cast<signed char>(state_[j]);
    out.inverse = binv_;
    return out;
}

bool BoundedSimplex::load_basis(const Basis& basis)
{
    if (static_cast<int>(basis.head.size()) != m_ || static_cast<int>(basis.status.size()) != total_)
        return false;
    int basic = 0;
    for (int j = 0; j < total_; ++j)
    {
        const signed char s = basis.status[static_cast<std::size_t>(j)];
        if (s < 0 || s > 3)
            return false;
        basic += s == 0 ? 1 : 0;
    }
    if (basic != m_)
        return false;
    for (int i = 0; i < m_; ++i)
    {
        const int k = basis.head[static_cast<std::size_t>(i)];
        if (k < 0 || k >= total_ || basis.status[static_cast<std::size_t>(k)] != 0)
            return false;
    }
    head_ = basis.head;
    for (int j = 0; j < total_; ++j)
    {
        state_[j] = static_cast<State>(basis.status[static_cast<std::size_t>(j)]);
        if (state_[j] != State::Basic)
            place_nonbasic(j);
    }
    if (basis.inverse.rows() == m_ && basis.inverse.cols() == m_)
    {
        binv_ = basis.inverse;
        compute_basic_values();
        if (residual() <= feas_tol_)
            return true;
    }
    reinvert();
    return true;
}

void BoundedSimplex::place_nonbasic(int j)
{
    const bool lo_finite = std::isfinite(lo_[j]);
    const bool hi_finite = std::isfinite(hi_[j]);
    if (state_[j] == State::Upper && hi_finite)
    {
        x_[j] = hi_[j];
    }
    else if (lo_finite)
    {
        state_[j] = State::Lower;
        x_[j] = lo_[j];
    }
    else if (hi_finite)
    {
        state_[j] = State::Upper;
        x_[j] = hi_[j];
    }
    else
    {
        state_[j] = State::Zero;
        x_[j] = 0.0;
    }
}

void BoundedSimplex::set_bounds(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper)
{
    if (lower.size() != n_ || upper.size() != n_)
        throw MalformedProblem("set_bounds: dimension mismatch");
    lo_.head(n_) = lower;
    hi_.head(n_) = upper;
    for (int j = 0; j < n_; ++j)
    {
        if (state_[j] != State::Basic)
            place_nonbasic(j);
    }
    compute_basic_values();
}

void BoundedSimplex::compute_basic_values()
{
    if (m_ == 0)
        return;
    Eigen::VectorXd r = b_;
    for (int j = 0; j < total_; ++j)
    {
        if (state_[j] == State::Basic || x_[j] == 0.0)
            continue;
        const double xj = x_[j];
        for_column(j, [&](int i, double a) { r[i] -= a * xj; });
    }
    const Eigen::VectorXd xb = binv_ * r;
    for (int i = 0; i < m_; ++i)
        x_[head_[i]] = xb[i];
    pivots_since_check_ = 0;
}

double BoundedSimplex::residual() const
{
    Eigen::VectorXd r = -b_;
    for (int j = 0; j < total_; ++j)
    {
        const double xj = x_[j];
        if (xj == 0.0)
            continue;
        for_column(j, [&](int i, double a) { r[i] += a * xj; });
    }
    return m_ > 0 ? r.lpNorm<Eigen::Infinity>() : 0.0;
}

bool BoundedSimplex::primal_feasible(double tol) const
{
    for (int j = 0; j < total_; ++j)
    {
        if (x_[j] < lo_[j] - tol || x_[j] > hi_[j] + tol)
            return false;
    }
    return true;
}

void BoundedSimplex::reinvert()
{
    if (m_ == 0)
        return;
    std::vector<Eigen::Triplet<double>> triplets;
    for (int p = 0; p < m_; ++p)
        for_column(head_[p], [&](int i, double a) { triplets.emplace_back(i, p, a); });
    Eigen::SparseMatrix<double> basis(m_, m_);
    basis.setFromTriplets(triplets.begin(), triplets.end());
    basis.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(basis);
    if (lu.info() != Eigen::Success)
    {
        // fall back to the slack basis; phase 1 recovers feasibility
        for (int j = 0; j < n_; ++j)
        {
            if (state_[j] == State::Basic)
            {
                state_[j] = State::Lower;
                place_nonbasic(j);
            }
        }
        for (int i = 0; i < m_; ++i)
        {
            head_[i] = n_ + i;
            state_[n_ + i] = State::Basic;
        }
        binv_.setIdentity(m_, m_);
    }
    else
    {
        const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(m_, m_);
        const Eigen::MatrixXd inverse = lu.solve(identity);
        binv_ = inverse;
    }
    compute_basic_values();
}

SolveResult BoundedSimplex::solve()
{
    SolveResult result;
    const double opt_tol = options_.optimality_tol;
    const double piv_tol = options_.pivot_tol;

    Eigen::VectorXd cb(m_);
    Eigen::VectorXd y(m_);
    Eigen::VectorXd alpha(m_);
    std::vector<int> alpha_nz;
    alpha_nz.reserve(m_);

    long iterations = 0;
    int degenerate_streak = 0;
    int recoveries = 0;

    while (true)
    {
        if (++iterations > iteration_limit_)
            throw CycleLimit("simplex: iteration limit exceeded");

        if (pivots_since_check_ >= 100)
        {
            compute_basic_values();
            if (residual() > feas_tol_)
                reinvert();
        }

        bool phase1 = false;
        for (int i = 0; i < m_; ++i)
        {
            const int k = head_[i];
            if (x_[k] < lo_[k] - feas_tol_)
            {
                cb[i] = -1.0;
                phase1 = true;
            }
            else if (x_[k] > hi_[k] + feas_tol_)
            {
                cb[i] = 1.0;
                phase1 = true;
            }
            else
            {
                cb[i] = 0.0;
            }
        }
        if (!phase1)
        {
            for (int i = 0; i < m_; ++i)
                cb[i] = cost_[head_[i]];
        }

        y.setZero();
        for (int i = 0; i < m_; ++i)
        {
            if (cb[i] != 0.0)
                y.noalias() += cb[i] * binv_.row(i).transpose();
        }

        // pricing
        const bool bland = degenerate_streak >= options_.bland_after_degenerate;
        int q = -1;
        double dq = 0.0;
        double best = 0.0;
        for (int j = 0; j < total_; ++j)
        {
            const State s = state_[j];
            if (s == State::Basic || lo_[j] == hi_[j])
                continue;
            double dj = phase1 ? 0.0 : cost_[j];
            for_column(j, [&](int i, double a) { dj -= a * y[i]; });
            bool eligible = false;
            switch (s)
            {
                case State::Lower: eligible = dj < -opt_tol; break;
                case State::Upper: eligible = dj > opt_tol; break;
                case State::Zero: eligible = std::abs(dj) > opt_tol; break;
                case State::Basic: break;
            }
            if (!eligible)
                continue;
            if (bland)
            {
                q = j;
                dq = dj;
                break;
            }
            if (std::abs(dj) > best)
            {
                best = std::abs(dj);
                q = j;
                dq = dj;
            }
        }

        if (q < 0)
        {
            if (phase1)
            {
                result.status = SolveStatus::Infeasible;
                result.iterations = iterations;
                return result;
            }
            if (residual() > feas_tol_ && recoveries < 3)
            {
                ++recoveries;
                reinvert();
                continue;
            }
            result.status = SolveStatus::Optimal;
            result.iterations = iterations;
            fill_result(result);
            return result;
        }

        const double dir = dq < 0.0 ? 1.0 : -1.0;

        // ftran
        alpha.setZero();
        for_column(q, [&](int k, double a) { alpha.noalias() += a * binv_.col(k); });
        alpha_nz.clear();
        for (int i = 0; i < m_; ++i)
        {
            if (std::abs(alpha[i]) > piv_tol)
                alpha_nz.push_back(i);
            else
                alpha[i] = 0.0;
        }

        // ratio test; `target` is the bound a leaving variable lands on
        auto limit_for = [&](int i, double rate, double& dist, bool& to_upper) -> bool
        {
            const int k = head_[i];
            const double v = x_[k];
            if (rate < 0.0)
            {
                if (phase1 && v > hi_[k] + feas_tol_)
                {
                    dist = v - hi_[k];
                    to_upper = true;
                    return true;
                }
                if (phase1 && v < lo_[k] - feas_tol_)
                    return false;
                if (!std::isfinite(lo_[k]))
                    return false;
                dist = v - lo_[k];
                to_upper = false;
                return true;
            }
            if (phase1 && v < lo_[k] - feas_tol_)
            {
                dist = lo_[k] - v;
                to_upper = false;
                return true;
            }
            if (phase1 && v > hi_[k] + feas_tol_)
                return false;
            if (!std::isfinite(hi_[k]))
                return false;
            dist = hi_[k] - v;
            to_upper = true;
            return true;
        };

        int r = -1;
        bool r_to_upper = false;
        double theta = kInf;
        if (!bland)
        {
            double theta_max = kInf;
            for (int i : alpha_nz)
            {
                const double rate = -dir * alpha[i];
                double dist = 0.0;
                bool up = false;
                if (!limit_for(i, rate, dist, up))
                    continue;
                theta_max = std::min(theta_max, (std::max(dist, 0.0) + feas_tol_) / std::abs(rate));
            }
            double best_rate = 0.0;
            for (int i : alpha_nz)
            {
                const double rate = -dir * alpha[i];
                double dist = 0.0;
                bool up = false;
                if (!limit_for(i, rate, dist, up))
                    continue;
                const double ratio = std::max(dist, 0.0) / std::abs(rate);
                if (ratio <= theta_max && std::abs(rate) > best_rate)
                {
                    best_rate = std::abs(rate);
                    r = i;
                    r_to_upper = up;
                    theta = ratio;
                }
            }
        }
        else
        {
            for (int i : alpha_nz)
            {
                const double rate = -dir * alpha[i];
                double dist = 0.0;
                bool up = false;
                if (!limit_for(i, rate, dist, up))
                    continue;
                const double ratio = std::max(dist, 0.0) / std::abs(rate);
                if (ratio < theta - 1e-12 ||
                    (std::abs(ratio - theta) <= 1e-12 && r >= 0 && head_[i] < head_[r]))
                {
                    r = i;
                    r_to_upper = up;
                    theta = ratio;
                }
            }
        }

        const double range = hi_[q] - lo_[q];
        const bool flip = std::isfinite(range) && (r < 0 || range <= theta);

        if (r < 0 && !flip)
        {
            if (!phase1)
            {
                result.status = SolveStatus::Unbounded;
                result.iterations = iterations;
                return result;
            }
            if (recoveries++ >= 3)
                throw CycleLimit("simplex: no limiting row in phase 1");
            reinvert();
            continue;
        }

        if (flip)
        {
            theta = range;
            for (int i : alpha_nz)
                x_[head_[i]] += -dir * alpha[i] * theta;
            x_[q] = dir > 0.0 ? hi_[q] : lo_[q];
            state_[q] = dir > 0.0 ? State::Upper : State::Lower;
        }
        else
        {
            for (int i : alpha_nz)
                x_[head_[i]] += -dir * alpha[i] * theta;
            x_[q] += dir * theta;

            const int leaving = head_[r];
            if (r_to_upper)
            {
                x_[leaving] = hi_[leaving];
                state_[leaving] = State::Upper;
            }
            else
            {
                x_[leaving] = lo_[leaving];
                state_[leaving] = State::Lower;
            }
            head_[r] = q;
            state_[q] = State::Basic;

            const double pivot = alpha[r];
            binv_.row(r) /= pivot;
            for (int i : alpha_nz)
            {
                if (i != r)
                    binv_.row(i) -= alpha[i] * binv_.row(r);
            }
            ++pivots_since_check_;
        }

        // a step that barely moves the (phase) objective counts as degenerate too
        if (theta <= 1e-12 || std::abs(dq) * theta <= 1e-12)
            ++degenerate_streak;
        else
            degenerate_streak = 0;
        ++total_iterations_;
    }
}

void BoundedSimplex::fill_result(SolveResult& result) const
{
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i)
        cb[i] = cost_[head_[i]];
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    if (m_ > 0)
        y = binv_.transpose() * cb;

    result.solution = x_.head(n_);
    result.objective = cost_.head(n_).dot(result.solution);
    result.duals = y;
    result.reduced_costs.resize(n_);

    double dual_obj = b_.dot(y);
    for (int j = 0; j < total_; ++j)
    {
        double dj = cost_[j];
        for_column(j, [&](int i, double a) { dj -= a * y[i]; });
        if (j < n_)
            result.reduced_costs[j] = state_[j] == State::Basic ? 0.0 : dj;
        if (state_[j] == State::Basic || dj == 0.0)
            continue;
        dual_obj += dj * x_[j];
    }
    result.dual_objective = dual_obj;
    result.bound = result.objective;
    if (options_.export_basis)
        result.basis = std::make_shared<const Basis>(basis());
}

} // namespace ofd::opt::detail
