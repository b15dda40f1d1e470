#include "ofd/market_model.hpp"

namespace ofd
{

void HorizonConfig::validate() const
{
    if (T < 1)
        throw std::invalid_argument("horizon: T must be at least 1");
    if (!(delta_hours > 0.0))
        throw std::invalid_argument("horizon: delta_hours must be positive");
}

void HPolytope::validate() const
{
    if (A.rows() != b.size())
        throw DimensionMismatch("polytope: A has " + std::to_string(A.rows()) + " rows but b has " +
            std::to_string(b.size()) + " entries");
    if (!tags.empty() && static_cast<Eigen::Index>(tags.size()) != b.size())
        throw DimensionMismatch("polytope: tag count does not match row count");
    if (!A.allFinite() || !b.allFinite())
        throw std::invalid_argument("polytope: non-finite entry");
}

Eigen::MatrixXd build_G(const HorizonConfig& h)
{
    h.validate();
    const int T = h.T;
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(T, T);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(T, T);
    L.triangularView<Eigen::Lower>().setOnes();
    L *= h.delta_hours;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(T - 1, T);
    for (int t = 0; t + 1 < T; ++t)
    {
        K(t, t) = -1.0;
        K(t, t + 1) = 1.0;
    }

    Eigen::MatrixXd G(6 * T - 2, T);
    G << I, -I, L, -L, K, -K;
    return G;
}

Eigen::VectorXd build_x(const AggregatorModelVars& v, const HorizonConfig& h)
{
    h.validate();
    const int T = h.T;
    auto check = [](const Eigen::VectorXd& vec, int n, const char* name) {
        if (vec.size() != n)
            throw DimensionMismatch(std::string("aggregator model: ") + name + " must have length " +
                std::to_string(n));
    };
    check(v.p_max, T, "p_max");
    check(v.p_min, T, "p_min");
    check(v.s_max, T, "s_max");
    check(v.s_min, T, "s_min");
    check(v.ramp_up, T - 1, "ramp_up");
    check(v.ramp_dn, T - 1, "ramp_dn");

    const Eigen::VectorXd s0 = Eigen::VectorXd::Constant(T, v.s0);
    Eigen::VectorXd x(6 * T - 2);
    x << v.p_max, -v.p_min, s0 - v.s_min, v.s_max - s0, v.ramp_up, -v.ramp_dn;
    return x;
}

Eigen::MatrixXd build_reduced_G(const HorizonConfig& h)
{
    h.validate();
    Eigen::MatrixXd G(2 * h.T, h.T);
    G << Eigen::MatrixXd::Identity(h.T, h.T), -Eigen::MatrixXd::Identity(h.T, h.T);
    return G;
}

std::vector<std::string> market_row_tags(const HorizonConfig& h, bool reduced)
{
    std::vector<std::string> tags;
    auto block = [&](const std::string& name, int count) {
        for (int t = 0; t < count; ++t)
            tags.push_back(name + "[" + std::to_string(t + 1) + "]");
    };
    block("p_max", h.T);
    block("p_min", h.T);
    if (!reduced)
    {
        block("s_min", h.T);
        block("s_max", h.T);
        block("ramp_up", h.T - 1);
        block("ramp_dn", h.T - 1);
    }
    return tags;
}

HPolytope market_polytope(const Eigen::MatrixXd& G, const Eigen::VectorXd& x, std::vector<std::string> tags)
{
    if (G.rows() != x.size())
        throw DimensionMismatch("market polytope: G and x disagree on row count");
    HPolytope P{G, x, std::move(tags)};
    P.validate();
    return P;
}

bool membership(const HPolytope& P, const Eigen::VectorXd& p, double tol)
{
    if (p.size() != P.dim())
        throw DimensionMismatch("membership: point has dimension " + std::to_string(p.size()) +
            ", polytope has " + std::to_string(P.dim()));
    return ((P.A * p - P.b).array() <= tol).all();
}

} // namespace ofd
