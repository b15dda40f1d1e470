#include "ofd/flex_design.hpp"

#include "ofd/lp.hpp"
#include "ofd/parallel.hpp"
#include "ofd/poly_geom.hpp"

#include <chrono>
#include <cmath>

namespace ofd
{

Eigen::VectorXd compute_prototype(const std::vector<Eigen::VectorXd>& feasible, const Eigen::MatrixXd& G)
{
    if (feasible.empty())
        throw NoFeasiblePoints("compute_prototype: the dataset has no feasible points");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(G.rows());
    for (const Eigen::VectorXd& p : feasible)
    {
        if (p.size() != G.cols())
            throw DimensionMismatch("compute_prototype: point dimension differs from G");
        x = x.cwiseMax(G * p);
    }
    return x;
}

namespace
{

// h = min f'x_bar  s.t.  f'G = e', f >= 0
opt::SolveResult row_certificate(const Eigen::VectorXd& x_bar, const Eigen::MatrixXd& G, const Eigen::VectorXd& e)
{
    opt::LinearProgram lp = opt::LinearProgram::nonnegative(static_cast<int>(G.rows()));
    lp.objective = x_bar;
    lp.A = G.transpose();
    lp.rhs = e;
    lp.senses.assign(static_cast<std::size_t>(G.cols()), opt::Sense::Equal);
    return opt::solve_lp(lp);
}

HPolytope without_row(const HPolytope& P, int row)
{
    HPolytope out;
    out.A.resize(P.rows() - 1, P.dim());
    out.b.resize(P.rows() - 1);
    for (int i = 0, k = 0; i < P.rows(); ++i)
    {
        if (i == row)
            continue;
        out.A.row(k) = P.A.row(i);
        out.b[k] = P.b[i];
        ++k;
    }
    return out;
}

} // namespace

DesignResult farkas_design(const Eigen::VectorXd& x_bar, const Eigen::MatrixXd& G, const HPolytope& PD,
    const DesignOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    PD.validate();
    if (x_bar.size() != G.rows() || PD.dim() != G.cols())
        throw DimensionMismatch("farkas_design: x_bar, G and P_D disagree");
    if (x_bar.minCoeff() < 0.0)
        throw std::invalid_argument("farkas_design: x_bar must be nonnegative");
    const int T = static_cast<int>(G.cols());
    const int m = PD.rows();

    std::vector<opt::SolveResult> stage1(static_cast<std::size_t>(m));
    parallel_for(stage1.size(), options.workers, [&](std::size_t i) {
        stage1[i] = row_certificate(x_bar, G, PD.A.row(static_cast<Eigen::Index>(i)).transpose());
    });

    DesignResult out;
    out.x_bar = x_bar;
    out.stage1_lps = m;
    std::vector<int> kept;
    for (int i = 0; i < m; ++i)
    {
        const opt::SolveResult& r = stage1[static_cast<std::size_t>(i)];
        if (r.optimal())
        {
            kept.push_back(i);
            continue;
        }
        if (r.status == opt::SolveStatus::Unbounded)
            throw RowInfeasible("farkas_design: row " + std::to_string(i) + " certificate is unbounded");
        // direction not representable by G: acceptable only if the row is redundant
        bool redundant = false;
        try
        {
            redundant = support(without_row(PD, i), PD.A.row(i).transpose()) <= PD.b[i] + 1e-9;
        }
        catch (const UnboundedPolytope&)
        {
        }
        if (!redundant)
            throw RowInfeasible("farkas_design: row " + std::to_string(i)
                + " of P_D is not in the cone spanned by the rows of G");
        out.dropped_rows.push_back(i);
    }

    // min beta  s.t.  -E_i z - d_i beta <= -h_i,  -beta <= 0   over v = (z, beta)
    const int rows = static_cast<int>(kept.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows + 1, T + 1);
    Eigen::VectorXd b(rows + 1);
    out.h.resize(rows);
    for (int k = 0; k < rows; ++k)
    {
        const int i = kept[static_cast<std::size_t>(k)];
        out.h[k] = stage1[static_cast<std::size_t>(i)].objective;
        A.row(k).head(T) = -PD.A.row(i);
        A(k, T) = -PD.b[i];
        b[k] = -out.h[k];
    }
    A(rows, T) = -1.0;
    b[rows] = 0.0;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(T + 1);
    c[T] = 1.0;
    out.stage2_rows = rows;

    const opt::SolveResult s2 = opt::solve_inequality_lp(c, A, b);
    if (!s2.optimal())
        throw DegenerateBeta(std::string("farkas_design: scaling LP is ") + opt::to_string(s2.status));
    out.z = s2.solution.head(T);
    out.beta = s2.solution[T];
    if (!(out.beta > options.beta_floor))
        throw DegenerateBeta("farkas_design: optimal beta is zero; P_D does not bound the replica");
    out.x_star = (x_bar - G * out.z) / out.beta;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

double volume_scale(double v_prototype, double beta, int T)
{
    if (!(beta > 0.0))
        throw NonpositiveBeta("volume_scale: beta must be positive");
    return v_prototype / std::pow(beta, T);
}

json to_json(const DesignResult& r)
{
    json j;
    j["x_star"] = to_json(r.x_star);
    j["beta"] = r.beta;
    j["z"] = to_json(r.z);
    j["h"] = to_json(r.h);
    j["x_bar"] = to_json(r.x_bar);
    j["dropped_rows"] = r.dropped_rows;
    j["stage1_lps"] = r.stage1_lps;
    j["stage2_rows"] = r.stage2_rows;
    return j;
}

DesignResult design_result_from_json(const json& j)
{
    try
    {
        DesignResult r;
        r.x_star = vector_from_json(j.at("x_star"));
        r.beta = j.at("beta").get<double>();
        r.z = vector_from_json(j.at("z"));
        if (j.contains("h"))
            r.h = vector_from_json(j.at("h"));
        if (j.contains("x_bar"))
            r.x_bar = vector_from_json(j.at("x_bar"));
        if (j.contains("dropped_rows"))
            r.dropped_rows = j.at("dropped_rows").get<std::vector<int>>();
        r.stage1_lps = j.value("stage1_lps", 0);
        r.stage2_rows = j.value("stage2_rows", 0);
        return r;
    }
    catch (const json::exception& e)
    {
        throw ParseError(std::string("design result: ") + e.what());
    }
}

} // namespace ofd
