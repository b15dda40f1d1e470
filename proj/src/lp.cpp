#include "ofd/lp.hpp"

#include "simplex.hpp"

#include <cmath>
#include <string>

namespace ofd::opt
{

const char* to_string(SolveStatus status)
{
    switch (status)
    {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::Unbounded: return "Unbounded";
        case SolveStatus::NodeLimit: return "NodeLimit";
        case SolveStatus::Cutoff: return "Cutoff";
    }
    return "Unknown";
}

LinearProgram LinearProgram::nonnegative(int n)
{
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::Zero(n);
    lp.A.resize(0, n);
    lp.rhs.resize(0);
    lp.lower = Eigen::VectorXd::Zero(n);
    lp.upper = Eigen::VectorXd::Constant(n, kInf);
    return lp;
}

LinearProgram LinearProgram::free(int n)
{
    LinearProgram lp = nonnegative(n);
    lp.lower.setConstant(-kInf);
    return lp;
}

int LinearProgram::add_row(const Eigen::RowVectorXd& coefficients, Sense sense, double value)
{
    if (coefficients.size() != A.cols())
        throw MalformedProblem("add_row: coefficient count does not match variable count");
    const Eigen::Index m = A.rows();
    A.conservativeResize(m + 1, Eigen::NoChange);
    A.row(m) = coefficients;
    rhs.conservativeResize(m + 1);
    rhs[m] = value;
    senses.push_back(sense);
    return static_cast<int>(m);
}

void LinearProgram::validate() const
{
    const Eigen::Index n = A.cols();
    if (objective.size() != n)
        throw MalformedProblem("objective length " + std::to_string(objective.size()) +
            " does not match " + std::to_string(n) + " columns");
    if (rhs.size() != A.rows() || static_cast<Eigen::Index>(senses.size()) != A.rows())
        throw MalformedProblem("row count mismatch between A, rhs and senses");
    if (lower.size() != n || upper.size() != n)
        throw MalformedProblem("bound vectors do not match column count");
    if (!A.allFinite() || !rhs.allFinite() || !objective.allFinite())
        throw MalformedProblem("non-finite coefficient");
    for (Eigen::Index j = 0; j < n; ++j)
    {
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
            throw MalformedProblem("invalid bounds on variable " + std::to_string(j));
        if (lower[j] == kInf || upper[j] == -kInf)
            throw MalformedProblem("infinite bound on the wrong side for variable " + std::to_string(j));
    }
}

double feasibility_tolerance(const LinearProgram& lp, const LpOptions& options)
{
    const double scale = lp.rhs.size() > 0 ? lp.rhs.lpNorm<Eigen::Infinity>() : 0.0;
    return options.feasibility_tol * (1.0 + scale);
}

SolveResult solve_lp(const LinearProgram& lp, const LpOptions& options)
{
    detail::BoundedSimplex simplex(lp, options);
    SolveResult result = simplex.solve();
    result.root_bound = result.optimal() ? result.objective : -kInf;
    return result;
}

SolveResult solve_inequality_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
    const Eigen::VectorXd& b, const LpOptions& options)
{
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (c.size() != n || b.size() != m)
        throw MalformedProblem("solve_inequality_lp: dimension mismatch");

    LinearProgram dual = LinearProgram::nonnegative(m);
    dual.objective = b;
    dual.A = A.transpose();
    dual.rhs = -c;
    dual.senses.assign(n, Sense::Equal);

    SolveResult d = solve_lp(dual, options);
    SolveResult result;
    result.iterations = d.iterations;
    switch (d.status)
    {
        case SolveStatus::Optimal:
            result.status = SolveStatus::Optimal;
            result.solution = d.duals;
            result.objective = -d.objective;
            result.duals = d.solution;
            result.dual_objective = -d.objective;
            result.bound = result.objective;
            result.root_bound = result.objective;
            break;
        case SolveStatus::Unbounded:
            result.status = SolveStatus::Infeasible;
            break;
        default:
            result.status = inequality_system_feasible(A, b) ? SolveStatus::Unbounded
                                                             : SolveStatus::Infeasible;
            break;
    }
    return result;
}

bool inequality_system_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol)
{
    // Farkas: {A v <= b} is empty iff some l >= 0 has A'l = 0 and b'l < 0
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (m == 0)
        return true;
    LinearProgram lp = LinearProgram::nonnegative(m);
    lp.objective = b;
    lp.A.resize(n + 1, m);
    lp.A.topRows(n) = A.transpose();
    lp.A.row(n).setOnes();
    lp.rhs = Eigen::VectorXd::Zero(n + 1);
    lp.rhs[n] = 1.0;
    lp.senses.assign(n, Sense::Equal);
    lp.senses.push_back(Sense::LessEqual);
    const SolveResult r = solve_lp(lp);
    return !(r.optimal() && r.objective < -tol);
}

} // namespace ofd::opt
