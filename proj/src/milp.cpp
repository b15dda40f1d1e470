#include "ofd/milp.hpp"

#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace ofd::opt
{

void MilpProgram::validate() const
{
    base.validate();
    const int n = base.num_vars();
    for (int j : binary_indices)
    {
        if (j < 0 || j >= n)
            throw MalformedProblem("binary index " + std::to_string(j) + " out of range");
        if (base.lower[j] < 0.0 || base.upper[j] > 1.0)
            throw MalformedProblem("binary variable " + std::to_string(j) + " has bounds outside [0,1]");
    }
}

namespace
{

struct Node
{
    std::vector<std::pair<int, char>> fixings;
    double bound = -kInf;
};

bool is_fractional(double v, double tol)
{
    return std::min(v - std::floor(v), std::ceil(v) - v) > tol;
}

// First fixes every binary (fractional ones up), then falls back to fixing
// only the fractional ones up, one round at a time.
SolveResult rounding_dive(detail::BoundedSimplex& simplex, const MilpProgram& milp, Eigen::VectorXd x,
    Eigen::VectorXd lo, Eigen::VectorXd hi, const MilpOptions& options)
{
    SolveResult failed;
    failed.status = SolveStatus::Infeasible;
    long iterations = 0;
    {
        Eigen::VectorXd l = lo, h = hi;
        for (int j : milp.binary_indices)
        {
            const double v = is_fractional(x[j], options.integrality_tol) ? 1.0 : std::round(x[j]);
            l[j] = v;
            h[j] = v;
        }
        simplex.set_bounds(l, h);
        SolveResult r = simplex.solve();
        iterations += r.iterations;
        if (r.optimal())
        {
            r.iterations = iterations;
            return r;
        }
    }
    for (int round = 0; round < options.dive_rounds; ++round)
    {
        bool any = false;
        for (int j : milp.binary_indices)
        {
            if (is_fractional(x[j], options.integrality_tol))
            {
                lo[j] = 1.0;
                hi[j] = 1.0;
                any = true;
            }
        }
        if (!any)
        {
            SolveResult r;
            r.status = SolveStatus::Optimal;
            r.solution = x;
            r.objective = milp.base.objective.dot(x);
            r.iterations = iterations;
            return r;
        }
        simplex.set_bounds(lo, hi);
        const SolveResult r = simplex.solve();
        iterations += r.iterations;
        if (!r.optimal())
            break;
        x = r.solution;
    }
    failed.iterations = iterations;
    return failed;
}

} // namespace

SolveResult solve_milp(const MilpProgram& milp, const MilpOptions& options)
{
    milp.validate();
    if (options.node_limit < 1)
        throw MalformedProblem("node_limit must be at least 1");

    LpOptions node_options = options.lp;
    node_options.export_basis = false;
    detail::BoundedSimplex simplex(milp.base, node_options, true);
    const Eigen::VectorXd lo0 = milp.base.lower;
    const Eigen::VectorXd hi0 = milp.base.upper;

    std::vector<Node> open;
    open.push_back(Node{});

    SolveResult result;
    double incumbent = kInf;
    Eigen::VectorXd best_x;
    double cutoff_bound = kInf;
    bool stopped_early = false;
    bool hit_node_limit = false;
    long nodes = 0;
    long iterations = 0;

    auto gap = [&](double inc) { return options.gap_tol * (1.0 + std::abs(inc)); };
    auto cutoff_applies = [&](double bound) {
        return options.prune_above && std::isfinite(incumbent) && bound > *options.prune_above;
    };

    Eigen::VectorXd lo = lo0;
    Eigen::VectorXd hi = hi0;

    while (!open.empty())
    {
        if (nodes >= options.node_limit)
        {
            hit_node_limit = true;
            break;
        }
        if (nodes > 0 && options.restart_interval > 0 && nodes % options.restart_interval == 0)
        {
            auto best = std::min_element(open.begin(), open.end(),
                [](const Node& a, const Node& b) { return a.bound < b.bound; });
            std::iter_swap(best, open.end() - 1);
        }

        Node node = std::move(open.back());
        open.pop_back();
        if (node.bound >= incumbent - gap(incumbent))
            continue;
        if (cutoff_applies(node.bound))
        {
            cutoff_bound = std::min(cutoff_bound, node.bound);
            continue;
        }

        lo = lo0;
        hi = hi0;
        for (const auto& [j, v] : node.fixings)
        {
            lo[j] = v;
            hi[j] = v;
        }
        simplex.set_bounds(lo, hi);
        const SolveResult relax = simplex.solve();
        ++nodes;
        iterations += relax.iterations;

        if (relax.status == SolveStatus::Unbounded)
        {
            result.status = SolveStatus::Unbounded;
            result.nodes = nodes;
            result.iterations = iterations;
            return result;
        }
        if (relax.status != SolveStatus::Optimal)
            continue;
        if (nodes == 1)
        {
            result.root_bound = relax.objective;
            if (options.lp.export_basis && relax.optimal())
                result.basis = std::make_shared<const Basis>(simplex.basis());
        }
        if (relax.objective >= incumbent - gap(incumbent))
            continue;
        if (cutoff_applies(relax.objective))
        {
            cutoff_bound = std::min(cutoff_bound, relax.objective);
            continue;
        }

        int branch = -1;
        double most = options.integrality_tol;
        for (int j : milp.binary_indices)
        {
            const double v = relax.solution[j];
            const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac > most)
            {
                most = frac;
                branch = j;
            }
        }

        if (branch >= 0 && nodes == 1 && options.rounding_dive)
        {
            const SolveResult dive = rounding_dive(simplex, milp, relax.solution, lo, hi, options);
            iterations += dive.iterations;
            if (dive.optimal() && dive.objective < incumbent)
            {
                incumbent = dive.objective;
                best_x = dive.solution;
                for (int j : milp.binary_indices)
                    best_x[j] = std::round(best_x[j]);
                if (options.stop_at_or_below && incumbent <= *options.stop_at_or_below)
                {
                    stopped_early = true;
                    break;
                }
                if (relax.objective >= incumbent - gap(incumbent))
                    continue;
                if (cutoff_applies(relax.objective))
                {
                    cutoff_bound = std::min(cutoff_bound, relax.objective);
                    continue;
                }
            }
        }

        if (branch < 0)
        {
            incumbent = relax.objective;
            best_x = relax.solution;
            for (int j : milp.binary_indices)
                best_x[j] = std::round(best_x[j]);
            if (options.stop_at_or_below && incumbent <= *options.stop_at_or_below)
            {
                stopped_early = true;
                break;
            }
            continue;
        }

        const char near = relax.solution[branch] >= 0.5 ? 1 : 0;
        Node far_child{node.fixings, relax.objective};
        far_child.fixings.emplace_back(branch, static_cast<char>(1 - near));
        Node near_child{std::move(node.fixings), relax.objective};
        near_child.fixings.emplace_back(branch, near);
        open.push_back(std::move(far_child));
        open.push_back(std::move(near_child));
    }

    result.nodes = nodes;
    result.iterations = iterations;

    double open_bound = kInf;
    for (const Node& node : open)
        open_bound = std::min(open_bound, node.bound);

    if (std::isfinite(incumbent))
    {
        result.solution = best_x;
        result.objective = incumbent;
    }

    if (stopped_early)
    {
        result.status = SolveStatus::Cutoff;
        result.bound = std::min({incumbent, open_bound, cutoff_bound});
    }
    else if (hit_node_limit)
    {
        result.status = SolveStatus::NodeLimit;
        result.bound = std::min({incumbent, open_bound, cutoff_bound});
    }
    else if (std::isfinite(incumbent))
    {
        result.status = std::isfinite(cutoff_bound) ? SolveStatus::Cutoff : SolveStatus::Optimal;
        result.bound = std::min(incumbent, cutoff_bound);
    }
    else
    {
        result.status = SolveStatus::Infeasible;
    }
    return result;
}

} // namespace ofd::opt
