#pragma once

#include "ofd/classifier.hpp"
#include "ofd/dataset_gen.hpp"
#include "ofd/disagg.hpp"
#include "ofd/market_model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofd
{

class InvalidCount : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

struct Box
{
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    double volume() const { return (hi - lo).prod(); }
};

// 2T support LPs; throws UnboundedPolytope / EmptyPolytope
Box bounding_box(const HPolytope& P, int workers = 1);

struct VolumeEstimate
{
    double estimate = 0.0;
    double std_error = 0.0;
    long samples = 0;
    long hits = 0;
    std::uint64_t seed = 0;
    double box_volume = 0.0;
};

// Hit ratio of uniform samples from the bounding box, times the box volume.
// Samples are drawn in fixed shards so the result does not depend on `workers`.
VolumeEstimate mc_volume(const HPolytope& P, long samples, std::uint64_t seed, int workers = 1);
VolumeEstimate mc_volume_in_box(const HPolytope& P, const Box& box, long samples, std::uint64_t seed, int workers = 1);

// uniform samples from P by rejection from its bounding box
std::vector<Eigen::VectorXd> sample_polytope(const HPolytope& P, int count, std::uint64_t seed);

// p in conv(points), via a barycentric feasibility LP
bool in_convex_hull(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& p, double tol = 1e-9);

// share of infeasible dataset points inside the hull of the feasible ones
double metric_M1(const LabeledDataset& D, int workers = 1);

enum class HullSampler : char
{
    HitAndRun,     // approximately uniform
    Dirichlet      // cheap, not uniform
};

struct M2Options
{
    int samples = 100;
    std::uint64_t seed = 11;
    HullSampler sampler = HullSampler::HitAndRun;
    int steps = 0;       // hit-and-run steps between samples; 0: 5 T^2
};

struct M2Result
{
    double fraction = 0.0;
    std::vector<Eigen::VectorXd> points;
    std::vector<int> labels;
};

std::vector<Eigen::VectorXd> sample_hull(const std::vector<Eigen::VectorXd>& points, const M2Options& options);

// share of hull samples the oracle labels infeasible
M2Result metric_M2(const LabeledDataset& D, const FeasibilityOracle& oracle, const M2Options& options = {});

// CSV helpers for 2-D figures: "series,x,y" rows
std::string polygon_csv(const std::string& series, const HPolytope& P);
std::string ellipse_csv(const std::string& series, const Ellipsoid& E, int points = 200);
std::string dataset_csv(const LabeledDataset& D);

// vertices of a bounded 2-D polytope in counter-clockwise order
std::vector<Eigen::Vector2d> polygon_vertices(const HPolytope& P);

} // namespace ofd
