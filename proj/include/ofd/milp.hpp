#pragma once

#include "ofd/lp.hpp"

#include <optional>
#include <vector>

namespace ofd::opt
{

struct MilpProgram
{
    LinearProgram base;
    std::vector<int> binary_indices;

    void validate() const;
};

struct MilpOptions
{
    long node_limit = 50000;
    // stop as soon as an incumbent with objective <= this value is found
    std::optional<double> stop_at_or_below;
    // once an incumbent exists, discard nodes whose bound exceeds this value
    std::optional<double> prune_above;
    long restart_interval = 1000;
    double integrality_tol = 1e-6;
    double gap_tol = 1e-9;
    // at the root, round fractional binaries up and re-solve to seed an incumbent
    bool rounding_dive = true;
    int dive_rounds = 20;
    LpOptions lp;      // export_basis: return the root relaxation basis
};

// Depth-first branch and bound over binaries, most-fractional branching,
// best-bound restarts every `restart_interval` nodes. Node LPs reuse the
// previous basis (only bounds change between nodes).
SolveResult solve_milp(const MilpProgram& milp, const MilpOptions& options = {});

} // namespace ofd::opt
