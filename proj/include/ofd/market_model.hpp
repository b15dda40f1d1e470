#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace ofd
{

class DimensionMismatch : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

struct HorizonConfig
{
    int T = 1;
    double delta_hours = 1.0;   // market interval duration
    int start_hour = 0;         // wall-clock hour of the first interval (device models)

    void validate() const;
    int quarter_hours() const { return 4 * T; }
};

// Battery-with-ramping bidding model limits.
struct AggregatorModelVars
{
    Eigen::VectorXd p_max;
    Eigen::VectorXd p_min;
    double s0 = 0.0;
    Eigen::VectorXd s_max;
    Eigen::VectorXd s_min;
    Eigen::VectorXd ramp_up;    // T-1
    Eigen::VectorXd ramp_dn;    // T-1
};

// {p : A p <= b}; tags name each row's origin
struct HPolytope
{
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<std::string> tags;

    int dim() const { return static_cast<int>(A.cols()); }
    int rows() const { return static_cast<int>(A.rows()); }
    void validate() const;
};

// [I; -I; dL; -dL; K; -K], (6T-2) x T
Eigen::MatrixXd build_G(const HorizonConfig& h);

// (p_max, -p_min, s0 - s_min, s_max - s0, ramp_up, -ramp_dn), aligned with build_G
Eigen::VectorXd build_x(const AggregatorModelVars& v, const HorizonConfig& h);

// [I; -I], 2T x T
Eigen::MatrixXd build_reduced_G(const HorizonConfig& h);

std::vector<std::string> market_row_tags(const HorizonConfig& h, bool reduced = false);

// P(x) = {p : G p <= x}
HPolytope market_polytope(const Eigen::MatrixXd& G, const Eigen::VectorXd& x,
    std::vector<std::string> tags = {});

bool membership(const HPolytope& P, const Eigen::VectorXd& p, double tol = 1e-9);

} // namespace ofd
