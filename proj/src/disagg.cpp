#include "ofd/disagg.hpp"
#include "ofd/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace ofd
{

double g_tolerance(const Eigen::VectorXd& p)
{
    return 1e-6 * (1.0 + p.lpNorm<1>());
}

bool chance_feasible(double c, double epsilon)
{
    return c >= 1.0 - epsilon - 1e-12;
}

DisaggModel::DisaggModel(const Fleet& fleet, const Scenario& scenario, const HorizonConfig& h)
    : fleet_(fleet), scenario_(scenario), h_(h)
{
    if (fleet.empty())
        throw EmptyFleet("disaggregation needs at least one device");
    scenario.validate(fleet, h);
    fragments_.reserve(fleet.size());
    for (std::size_t d = 0; d < fleet.size(); ++d)
    {
        fragments_.push_back(device_constraints(fleet[d], scenario.devices[d], h));
        offsets_.push_back(num_vars_);
        for (int b : fragments_.back().binaries)
            binaries_.push_back(num_vars_ + b);
        num_vars_ += fragments_.back().num_vars();
        num_rows_ += static_cast<int>(fragments_.back().rows.size());
    }

    const int T = h_.T;
    // variables: device blocks, then (e+_t, e-_t) per hour
    const int n = num_vars_ + 2 * T;
    const int m = num_rows_ + T;
    opt::LinearProgram& lp = program_.base;
    lp.objective = Eigen::VectorXd::Zero(n);
    lp.A = Eigen::MatrixXd::Zero(m, n);
    lp.rhs.resize(m);
    lp.senses.reserve(m);
    lp.lower.resize(n);
    lp.upper.resize(n);

    int row = 0;
    for (std::size_t d = 0; d < fragments_.size(); ++d)
    {
        const ModelFragment& f = fragments_[d];
        const int off = offsets_[d];
        for (int j = 0; j < f.num_vars(); ++j)
        {
            lp.lower[off + j] = f.lower[j];
            lp.upper[off + j] = f.upper[j];
        }
        for (const FragmentRow& r : f.rows)
        {
            for (const Term& t : r.terms)
                lp.A(row, off + t.var) += t.coef;
            lp.senses.push_back(r.sense);
            lp.rhs[row++] = r.rhs;
        }
    }
    // sum_d 1/4 sum_{tau in t} l + e+ - e- = p_t
    for (int t = 0; t < T; ++t, ++row)
    {
        for (std::size_t d = 0; d < fragments_.size(); ++d)
            for (int k = 4 * t; k < 4 * t + 4; ++k)
                for (const Term& term : fragments_[d].load[k])
                    lp.A(row, offsets_[d] + term.var) += kQuarterHour * term.coef;
        const int ep = num_vars_ + 2 * t;
        lp.A(row, ep) = 1.0;
        lp.A(row, ep + 1) = -1.0;
        lp.senses.push_back(opt::Sense::Equal);
        lp.rhs[row] = 0.0;
    }
    for (int j = num_vars_; j < n; ++j)
    {
        lp.lower[j] = 0.0;
        lp.upper[j] = opt::kInf;
        lp.objective[j] = 1.0;
    }
    program_.binary_indices = binaries_;
}

DisaggResult DisaggModel::solve(const Eigen::VectorXd& p, const DisaggOptions& options) const
{
    const int T = h_.T;
    if (p.size() != T)
        throw DimensionMismatch("schedule has " + std::to_string(p.size()) + " entries, horizon has " +
            std::to_string(T));

    opt::MilpProgram milp = program_;
    milp.base.rhs.tail(T) = p;
    std::call_once(basis_once_, [&] {
        opt::MilpProgram root = program_;
        root.binary_indices.clear();
        opt::MilpOptions ro;
        ro.lp.export_basis = true;
        ro.rounding_dive = false;
        const opt::SolveResult r = opt::solve_milp(root, ro);
        basis_ = r.basis;
    });

    const double gtol = g_tolerance(p);
    opt::MilpOptions mo;
    mo.node_limit = options.node_limit;
    mo.lp.warm_start = basis_;
    if (options.zero_test)
    {
        mo.stop_at_or_below = gtol;
        mo.prune_above = gtol;
    }
    const opt::SolveResult r = opt::solve_milp(milp, mo);
    if (!r.has_solution())
    {
        if (r.status == opt::SolveStatus::NodeLimit)
        {
            DisaggResult none;
            none.status = r.status;
            none.g_value = opt::kInf;
            none.g_lower = std::max(0.0, r.bound);
            none.p_hat = p;
            none.nodes = r.nodes;
            return none;
        }
        throw InfeasibleScenario("device constraints admit no schedule for scenario " +
            std::to_string(scenario_.seed));
    }

    DisaggResult out;
    out.status = r.status;
    out.nodes = r.nodes;
    out.g_value = std::max(0.0, r.objective);
    out.g_lower = r.status == opt::SolveStatus::Optimal ? out.g_value : std::max(0.0, std::min(r.bound, out.g_value));
    out.zero = out.g_value <= gtol;
    out.p_hat = Eigen::VectorXd::Zero(T);
    for (std::size_t d = 0; d < fragments_.size(); ++d)
    {
        const ModelFragment& f = fragments_[d];
        DeviceSchedule s = extract_schedule(f, r.solution.segment(offsets_[d], f.num_vars()));
        out.p_hat += s.hourly();
        if (options.verify)
        {
            std::string why;
            if (!check_schedule(fleet_[d], scenario_.devices[d], h_, s, 1e-6, &why))
                throw std::logic_error("disaggregation returned an infeasible device schedule: " + why);
        }
        out.schedules.push_back(std::move(s));
    }
    return out;
}

DisaggResult solve_disaggregation(const Eigen::VectorXd& p, const Scenario& scenario, const Fleet& fleet,
    const HorizonConfig& h, const DisaggOptions& options)
{
    return DisaggModel(fleet, scenario, h).solve(p, options);
}

LabelResult label_from_results(const Eigen::VectorXd& p, const std::vector<DisaggResult>& results, double epsilon)
{
    if (results.empty())
        throw std::invalid_argument("label needs at least one scenario");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw std::invalid_argument("epsilon must lie in [0, 1)");
    LabelResult out;
    int zeros = 0;
    std::size_t worst = 0;
    for (std::size_t k = 0; k < results.size(); ++k)
    {
        zeros += results[k].zero ? 1 : 0;
        out.g_values.push_back(results[k].g_value);
        if (results[k].g_value > results[worst].g_value)
            worst = k;
    }
    out.c = static_cast<double>(zeros) / static_cast<double>(results.size());
    out.y = chance_feasible(out.c, epsilon) ? -1 : 1;
    out.best_projection = results[worst].zero ? p : results[worst].p_hat;
    return out;
}

FleetOracle::FleetOracle(Fleet fleet, HorizonConfig h, std::vector<Scenario> pool, int K, double epsilon,
    DisaggOptions options, int workers)
    : fleet_(std::move(fleet)), h_(h), pool_(std::move(pool)), K_(K), epsilon_(epsilon), options_(options),
      workers_(workers)
{
    if (K_ < 1 || K_ > static_cast<int>(pool_.size()))
        throw std::invalid_argument("K must lie in [1, pool size]");
    if (!(epsilon_ >= 0.0 && epsilon_ < 1.0))
        throw std::invalid_argument("epsilon must lie in [0, 1)");
    models_.resize(pool_.size());
    parallel_for(pool_.size(), workers_, [&](std::size_t i) {
        models_[i] = std::make_unique<DisaggModel>(fleet_, pool_[i], h_);
    });
}

std::vector<int> FleetOracle::draw_indices(std::uint64_t draw) const
{
    std::vector<int> idx(pool_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(draw);
    // partial Fisher-Yates keeps the draw independent of the standard library's shuffle
    for (int k = 0; k < K_; ++k)
    {
        const auto j = k + static_cast<int>(rng() % static_cast<std::uint64_t>(idx.size() - k));
        std::swap(idx[k], idx[j]);
    }
    idx.resize(K_);
    return idx;
}

LabelResult FleetOracle::label(const Eigen::VectorXd& p, std::uint64_t draw) const
{
    const std::vector<int> idx = draw_indices(draw);
    std::vector<DisaggResult> results(idx.size());
    parallel_for(idx.size(), workers_, [&](std::size_t k) { results[k] = models_[idx[k]]->solve(p, options_); });
    return label_from_results(p, results, epsilon_);
}

double FleetOracle::chance_statistic(const Eigen::VectorXd& p, std::uint64_t draw) const
{
    return label(p, draw).c;
}

PolytopeOracle::PolytopeOracle(HPolytope F, double tol) : F_(std::move(F)), tol_(tol)
{
    F_.validate();
}

Eigen::VectorXd PolytopeOracle::project_l1(const Eigen::VectorXd& p) const
{
    // min sum(u) s.t. F q <= b, -u <= q - p <= u ; variables (q, u)
    const int T = F_.dim();
    const int m = F_.rows();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 2 * T, 2 * T);
    Eigen::VectorXd b(m + 2 * T);
    A.topLeftCorner(m, T) = F_.A;
    b.head(m) = F_.b;
    for (int t = 0; t < T; ++t)
    {
        A(m + t, t) = 1.0;
        A(m + t, T + t) = -1.0;
        b[m + t] = p[t];
        A(m + T + t, t) = -1.0;
        A(m + T + t, T + t) = -1.0;
        b[m + T + t] = -p[t];
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * T);
    c.tail(T).setOnes();
    const opt::SolveResult r = opt::solve_inequality_lp(c, A, b);
    if (!r.optimal())
        throw std::runtime_error("projection onto the reference polytope failed: " +
            std::string(opt::to_string(r.status)));
    return r.solution.head(T);
}

LabelResult PolytopeOracle::label(const Eigen::VectorXd& p, std::uint64_t) const
{
    LabelResult out;
    const bool inside = membership(F_, p, tol_);
    out.c = inside ? 1.0 : 0.0;
    out.y = inside ? -1 : 1;
    out.best_projection = inside ? p : project_l1(p);
    out.g_values = {inside ? 0.0 : (p - out.best_projection).lpNorm<1>()};
    return out;
}

} // namespace ofd
