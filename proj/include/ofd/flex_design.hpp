#pragma once

#include "ofd/io.hpp"
#include "ofd/market_model.hpp"

#include <stdexcept>
#include <vector>

namespace ofd
{

class NoFeasiblePoints : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

class RowInfeasible : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

class DegenerateBeta : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

class NonpositiveBeta : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

// Componentwise smallest x >= 0 with G p <= x for every given point.
Eigen::VectorXd compute_prototype(const std::vector<Eigen::VectorXd>& feasible, const Eigen::MatrixXd& G);

struct DesignOptions
{
    int workers = 1;
    double beta_floor = 1e-9;
};

struct DesignResult
{
    Eigen::VectorXd x_star;
    double beta = 0.0;
    Eigen::VectorXd z;
    Eigen::VectorXd h;                 // per E-row certificate values
    Eigen::VectorXd x_bar;
    std::vector<int> dropped_rows;     // E-rows outside the cone of G, certified redundant
    int stage1_lps = 0;
    int stage2_rows = 0;
    double seconds = 0.0;             // wall clock, not serialized
};

// Largest shifted, scaled replica (x_bar - G z) / beta of the prototype
// contained in P_D, via per-row Farkas multipliers then one LP in (z, beta).
DesignResult farkas_design(const Eigen::VectorXd& x_bar, const Eigen::MatrixXd& G, const HPolytope& PD,
    const DesignOptions& options = {});

double volume_scale(double v_prototype, double beta, int T);

json to_json(const DesignResult& r);
DesignResult design_result_from_json(const json& j);

} // namespace ofd
