#pragma once

#include "ofd/market_model.hpp"

#include <stdexcept>
#include <vector>

namespace ofd
{

class InvalidDelta : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

class RowExplosion : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

class EmptyPolytope : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

class UnboundedPolytope : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

class EmptyInner : public EmptyPolytope
{
    public:
        using EmptyPolytope::EmptyPolytope;
};

// {y : E1 y + E2 q <= d for some q}
struct LiftedPolytope
{
    Eigen::MatrixXd E1;
    Eigen::MatrixXd E2;
    Eigen::VectorXd d;

    int dim() const { return static_cast<int>(E1.cols()); }
    int aux() const { return static_cast<int>(E2.cols()); }
    int rows() const { return static_cast<int>(E1.rows()); }
    void validate() const;

    // existential check: an LP over q
    bool contains(const Eigen::VectorXd& y, double tol = 1e-9) const;
};

// per-node accuracy of a nu-rotation disk approximation
double rotation_accuracy(int nu);

// smallest nu with (1 + rotation_accuracy(nu))^levels <= 1 + delta
int rotations_for(int T, double delta);

// Polyhedral approximation of {||y|| <= r} built from a balanced binary tree
// of 2-D rotation gadgets. The result lies inside the r-ball and contains
// the r/(1+delta) ball.
LiftedPolytope ball_approximation(int T, double r, double delta);

// substitutes y = M p + m
LiftedPolytope map_to_p(const LiftedPolytope& L, const Eigen::MatrixXd& M, const Eigen::VectorXd& m);

struct FmOptions
{
    long prune_budget = 4000;     // redundancy LPs per elimination round
    long row_cap = 1000000;
    int workers = 1;
};

struct FmStats
{
    int eliminated = 0;
    long peak_rows = 0;
    long lp_tests = 0;
    long lp_removed = 0;
};

HPolytope fourier_motzkin(const LiftedPolytope& L, const FmOptions& options = {}, FmStats* stats = nullptr);

// Drops rows that are exact duplicates or dominated by a parallel row, then
// rows whose removal leaves the set unchanged (at most `lp_budget` LP tests).
HPolytope prune_rows(const HPolytope& P, long lp_budget, long* lp_tests = nullptr);

// max u'p over P
double support(const HPolytope& P, const Eigen::VectorXd& u);

struct ContainmentCertificate
{
    bool contained = false;
    double worst_slack = 0.0;    // min over outer rows of b_i - support(inner, a_i)
    int worst_row = -1;
};

ContainmentCertificate certify_containment(const HPolytope& inner, const HPolytope& outer,
    double tol = 1e-6, int workers = 1);

} // namespace ofd
