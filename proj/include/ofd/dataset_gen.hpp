#pragma once

#include "ofd/disagg.hpp"
#include "ofd/io.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace ofd
{

class BudgetExhausted : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

enum class PointOrigin : char
{
    Uniform,
    Projection,
    Interpolated,
    ConvexCombo
};

const char* to_string(PointOrigin origin);
PointOrigin point_origin_from_string(const std::string& name);

struct LabeledPoint
{
    Eigen::VectorXd p;
    int y = 1;
    double c = 0.0;
    PointOrigin origin = PointOrigin::Uniform;
    std::uint64_t draw = 0;          // scenario draw used for the label
    std::vector<int> parents;        // dataset indices (Interpolated, ConvexCombo)
    std::vector<double> weights;
};

struct LabeledDataset
{
    std::vector<LabeledPoint> points;
    double epsilon = 0.0;
    double kappa = 0.2;
    std::uint64_t seed = 0;
    long labels_used = 0;

    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().p.size()); }
    int feasible_count() const;
    std::vector<Eigen::VectorXd> feasible_points() const;
    std::vector<Eigen::VectorXd> infeasible_points() const;
};

struct DatasetOptions
{
    int n_target = 500;
    double kappa = 0.2;
    std::uint64_t seed = 1;
    int max_proj_iters = 5;
    int max_p3_repeats = 5;
    double feasible_share = 0.4;
    long label_budget = 0;           // 0: 20 * n_target
    int batch = 16;
    int workers = 1;
};

// Sum over devices of the per-device hourly extremes, worst case over the pool.
HPolytope estimate_H(const Fleet& fleet, const std::vector<Scenario>& pool, const HorizonConfig& h, int workers = 1);

// axis-aligned box {lo <= p <= hi}
HPolytope box_polytope(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
// throws unless H is an axis-aligned box in the form produced by box_polytope
void box_bounds(const HPolytope& H, Eigen::VectorXd& lo, Eigen::VectorXd& hi);

// D1-D4 triplets followed by interior convex combinations of feasible points
LabeledDataset generate(const FeasibilityOracle& oracle, const HPolytope& H, const DatasetOptions& options);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

json to_json(const LabeledPoint& point);
LabeledPoint labeled_point_from_json(const json& j);
void write_dataset(const std::filesystem::path& path, const LabeledDataset& D);
LabeledDataset read_dataset(const std::filesystem::path& path);

} // namespace ofd
