#pragma once

#include "ofd/dataset_gen.hpp"
#include "ofd/io.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ofd
{

class SingleClassDataset : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

class Diverged : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

class DegenerateEllipsoid : public std::domain_error
{
    public:
        using std::domain_error::domain_error;
};

// d(p) = p'W2 p + w1'p + w0 ; the set E = {d(p) <= 0}
struct Ellipsoid
{
    Eigen::MatrixXd W2;
    Eigen::VectorXd w1;
    double w0 = 0.0;
    Eigen::VectorXd mean;    // standardization used in training: z = (p - mean) ./ scale
    Eigen::VectorXd scale;

    int dim() const { return static_cast<int>(w1.size()); }
    double margin(const Eigen::VectorXd& p) const;
};

struct TrainOptions
{
    double lambda = 1e-5;
    std::uint64_t split_seed = 7;
    double train_fraction = 0.8;
    double alpha0 = 10.0;
    int epochs = 2000;
    int trace_every = 10;
    int workers = 1;
};

struct TrainReport
{
    double train_accuracy = 0.0;
    double validation_accuracy = 0.0;
    std::vector<double> objective_trace;    // training objective every `trace_every` epochs
    double initial_objective = 0.0;         // at (I, 0, 0) in standardized coordinates
    double best_objective = 0.0;            // training objective of the returned iterate
    double best_validation_objective = 0.0;
    int best_epoch = 0;
    double condition_number = 0.0;
    double pd_floor = 0.0;
    double lambda = 0.0;
    int epochs = 0;
    int train_size = 0;
    int validation_size = 0;
};

struct TrainResult
{
    Ellipsoid ellipsoid;
    TrainReport report;
};

TrainResult train(const LabeledDataset& D, const TrainOptions& options = {});

// +1 infeasible / -1 feasible, ties feasible
int classify(const Ellipsoid& E, const Eigen::VectorXd& p);

struct BallForm
{
    Eigen::MatrixXd M;
    Eigen::VectorXd m;
    double r = 0.0;
};

// E = {p : ||M p + m|| <= r}
BallForm to_ball_form(const Ellipsoid& E);

json to_json(const Ellipsoid& E);
Ellipsoid ellipsoid_from_json(const json& j);
json to_json(const TrainReport& R);

} // namespace ofd
