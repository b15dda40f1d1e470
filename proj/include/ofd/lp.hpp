#pragma once

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofd::opt
{

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense : char
{
    LessEqual,
    Equal,
    GreaterEqual
};

// Cutoff: the search stopped on a caller-supplied objective cutoff; the
// carried solution is the incumbent and `bound` the proven lower bound.
enum class SolveStatus : char
{
    Optimal,
    Infeasible,
    Unbounded,
    NodeLimit,
    Cutoff
};

const char* to_string(SolveStatus status);

class MalformedProblem : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

class CycleLimit : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

// minimize objective'x  s.t.  A x (senses) rhs,  lower <= x <= upper
struct LinearProgram
{
    Eigen::VectorXd objective;
    Eigen::MatrixXd A;
    std::vector<Sense> senses;
    Eigen::VectorXd rhs;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    // n variables with bounds [0, +inf), zero objective, no rows
    static LinearProgram nonnegative(int n);
    // n variables with bounds (-inf, +inf), zero objective, no rows
    static LinearProgram free(int n);

    int num_rows() const { return static_cast<int>(A.rows()); }
    int num_vars() const { return static_cast<int>(A.cols()); }

    // appends a row and returns its index
    int add_row(const Eigen::RowVectorXd& coefficients, Sense sense, double value);

    // throws MalformedProblem
    void validate() const;
};

// Basis snapshot: the basic variable of every row and the bound status of
// every structural and slack variable (0 basic, 1 lower, 2 upper, 3 free).
struct Basis
{
    std::vector<int> head;
    std::vector<signed char> status;
    Eigen::MatrixXd inverse;    // B^-1 for `head` when exported; empty means refactor on load
};

struct SolveResult
{
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;
    Eigen::VectorXd solution;       // empty unless a point is carried
    Eigen::VectorXd duals;          // row multipliers y, reduced cost d = c - A'y
    Eigen::VectorXd reduced_costs;
    double dual_objective = 0.0;    // b'y + sum_j d_j * (active bound of x_j)
    double bound = -kInf;           // proven lower bound (branch and bound)
    double root_bound = -kInf;      // LP relaxation value at the root node
    long iterations = 0;
    long nodes = 0;
    std::shared_ptr<const Basis> basis;   // final (LP) or root (MILP) basis when requested

    bool optimal() const { return status == SolveStatus::Optimal; }
    bool has_solution() const { return solution.size() > 0; }
};

struct LpOptions
{
    double feasibility_tol = 1e-8;   // scaled by (1 + ||rhs||_inf)
    double optimality_tol = 1e-7;
    double pivot_tol = 1e-9;
    int bland_after_degenerate = 50;
    long iteration_limit = 0;        // 0: 50 * (rows + cols) + 10000
    // starting basis; ignored when its shape does not match the problem
    std::shared_ptr<const Basis> warm_start;
    bool export_basis = false;
};

double feasibility_tolerance(const LinearProgram& lp, const LpOptions& options = {});

SolveResult solve_lp(const LinearProgram& lp, const LpOptions& options = {});

// minimize c'v  s.t.  A v <= b  with v free.
// Meant for tall systems (many rows, few columns); solved through the dual
//   minimize b'l  s.t.  A'l = -c,  l >= 0
// whose equality multipliers give v. `duals` carries l (the Farkas weights).
SolveResult solve_inequality_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
    const Eigen::VectorXd& b, const LpOptions& options = {});

// true iff {v : A v <= b + tol} is nonempty
bool inequality_system_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
    double tol = 1e-9);

} // namespace ofd::opt
