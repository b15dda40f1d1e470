#include "ofd/classifier.hpp"
#include "ofd/psd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ofd
{

double Ellipsoid::margin(const Eigen::VectorXd& p) const
{
    if (p.size() != w1.size())
        throw DimensionMismatch("classifier: point dimension does not match");
    return p.dot(W2 * p) + w1.dot(p) + w0;
}

int classify(const Ellipsoid& E, const Eigen::VectorXd& p)
{
    return E.margin(p) <= 0.0 ? -1 : 1;
}

namespace
{

struct Params
{
    Eigen::MatrixXd W;
    Eigen::VectorXd w;
    double w0 = 0.0;
};

double hinge_objective(const Params& q, const std::vector<Eigen::VectorXd>& Z, const std::vector<int>& y,
    const std::vector<int>& idx, double lambda)
{
    double loss = 0.0;
    for (int n : idx)
    {
        const double d = Z[n].dot(q.W * Z[n]) + q.w.dot(Z[n]) + q.w0;
        loss += std::max(0.0, 1.0 - y[n] * d);
    }
    loss /= std::max<std::size_t>(idx.size(), 1);
    return loss + lambda * (q.W.squaredNorm() + q.w.squaredNorm());
}

double accuracy(const Ellipsoid& E, const LabeledDataset& D, const std::vector<int>& idx)
{
    if (idx.empty())
        return 1.0;
    int hits = 0;
    for (int n : idx)
        hits += classify(E, D.points[n].p) == D.points[n].y ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(idx.size());
}

} // namespace

TrainResult train(const LabeledDataset& D, const TrainOptions& opt)
{
    if (!(opt.lambda > 0.0))
        throw std::invalid_argument("lambda must be positive");
    const int N = static_cast<int>(D.points.size());
    const int feasible = D.feasible_count();
    if (feasible == 0 || feasible == N)
        throw SingleClassDataset("training needs both feasible and infeasible points");
    const int T = D.dim();

    // standardization
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(T);
    for (const auto& q : D.points)
        mean += q.p;
    mean /= N;
    Eigen::VectorXd scale = Eigen::VectorXd::Zero(T);
    for (const auto& q : D.points)
        scale += (q.p - mean).cwiseAbs2();
    scale = (scale / N).cwiseSqrt();
    for (Eigen::Index t = 0; t < T; ++t)
        if (!(scale[t] > 1e-12))
            scale[t] = 1.0;
    std::vector<Eigen::VectorXd> Z(N);
    std::vector<int> y(N);
    for (int n = 0; n < N; ++n)
    {
        Z[n] = (D.points[n].p - mean).cwiseQuotient(scale);
        y[n] = D.points[n].y;
    }

    // split, stratified so both classes appear in training
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(opt.split_seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> train_idx, val_idx;
    const int n_train = std::clamp(static_cast<int>(std::lround(opt.train_fraction * N)), 1, N);
    for (int i = 0; i < N; ++i)
        (i < n_train ? train_idx : val_idx).push_back(order[i]);
    const std::vector<int>& select_idx = val_idx.empty() ? train_idx : val_idx;

    Params cur{Eigen::MatrixXd::Identity(T, T), Eigen::VectorXd::Zero(T), 0.0};
    Params best = cur;
    TrainReport report;
    report.lambda = opt.lambda;
    report.epochs = opt.epochs;
    report.train_size = static_cast<int>(train_idx.size());
    report.validation_size = static_cast<int>(val_idx.size());
    report.initial_objective = hinge_objective(cur, Z, y, train_idx, opt.lambda);
    double best_select = hinge_objective(cur, Z, y, select_idx, opt.lambda);
    report.best_epoch = 0;

    const double inv_n = 1.0 / static_cast<double>(train_idx.size());
    for (int k = 1; k <= opt.epochs; ++k)
    {
        Eigen::MatrixXd gW = 2.0 * opt.lambda * cur.W;
        Eigen::VectorXd gw = 2.0 * opt.lambda * cur.w;
        double g0 = 0.0;
        for (int n : train_idx)
        {
            const Eigen::VectorXd& z = Z[n];
            const double d = z.dot(cur.W * z) + cur.w.dot(z) + cur.w0;
            if (1.0 - y[n] * d > 0.0)
            {
                gW.noalias() -= (y[n] * inv_n) * z * z.transpose();
                gw.noalias() -= (y[n] * inv_n) * z;
                g0 -= y[n] * inv_n;
            }
        }
        const double step = opt.alpha0 / std::sqrt(static_cast<double>(k));
        cur.W = opt::project_psd(cur.W - step * gW);
        cur.w -= step * gw;
        cur.w0 -= step * g0;
        if (!cur.W.allFinite() || !cur.w.allFinite() || !std::isfinite(cur.w0))
            throw Diverged("classifier training produced non-finite parameters at epoch " + std::to_string(k));

        const double sel = hinge_objective(cur, Z, y, select_idx, opt.lambda);
        if (sel < best_select)
        {
            best_select = sel;
            best = cur;
            report.best_epoch = k;
        }
        if (opt.trace_every > 0 && k % opt.trace_every == 0)
            report.objective_trace.push_back(hinge_objective(cur, Z, y, train_idx, opt.lambda));
    }
    report.best_validation_objective = best_select;
    report.best_objective = hinge_objective(best, Z, y, train_idx, opt.lambda);

    // back to original coordinates: z = S (p - mean)
    const Eigen::VectorXd s = scale.cwiseInverse();
    const Eigen::MatrixXd SWS = s.asDiagonal() * best.W * s.asDiagonal();
    Ellipsoid E;
    E.W2 = 0.5 * (SWS + SWS.transpose());
    E.w1 = -2.0 * E.W2 * mean + s.cwiseProduct(best.w);
    E.w0 = mean.dot(E.W2 * mean) - best.w.dot(s.cwiseProduct(mean)) + best.w0;
    E.mean = mean;
    E.scale = scale;

    report.pd_floor = std::max(1e-6 * E.W2.trace() / T, 1e-12);
    E.W2.diagonal().array() += report.pd_floor;
    report.condition_number = opt::condition_number(E.W2);
    report.train_accuracy = accuracy(E, D, train_idx);
    report.validation_accuracy = val_idx.empty() ? report.train_accuracy : accuracy(E, D, val_idx);
    return {E, report};
}

BallForm to_ball_form(const Ellipsoid& E)
{
    const int T = E.dim();
    if (E.W2.rows() != T || E.W2.cols() != T)
        throw DimensionMismatch("ellipsoid: W2 shape does not match w1");
    const double floor = 1e-12 * std::max(1.0, E.W2.trace() / std::max(T, 1));
    if (opt::min_eigenvalue(E.W2) <= floor)
        throw DegenerateEllipsoid("W2 is not positive definite");
    const Eigen::MatrixXd inv_root = opt::inv_sqrt_pd(E.W2);
    // d(p) = ||W2^{1/2} p + W2^{-1/2} w1 / 2||^2 - w1' W2^{-1} w1 / 4 + w0
    const Eigen::VectorXd half = 0.5 * (inv_root * E.w1);
    const double r2 = half.squaredNorm() - E.w0;
    if (!(r2 > 0.0))
        throw DegenerateEllipsoid("ellipsoid is empty or a single point");
    return {opt::sqrt_psd(E.W2), half, std::sqrt(r2)};
}

json to_json(const Ellipsoid& E)
{
    json j;
    j["W2"] = to_json(E.W2);
    j["w1"] = to_json(E.w1);
    j["w0"] = E.w0;
    j["standardization"] = {{"mean", to_json(E.mean)}, {"scale", to_json(E.scale)}};
    return j;
}

Ellipsoid ellipsoid_from_json(const json& j)
{
    try
    {
        Ellipsoid E;
        E.W2 = matrix_from_json(j.at("W2"));
        E.w1 = vector_from_json(j.at("w1"));
        E.w0 = j.at("w0").get<double>();
        if (j.contains("standardization"))
        {
            E.mean = vector_from_json(j.at("standardization").at("mean"));
            E.scale = vector_from_json(j.at("standardization").at("scale"));
        }
        if (E.W2.rows() != E.w1.size() || E.W2.cols() != E.w1.size())
            throw DimensionMismatch("ellipsoid: W2 shape does not match w1");
        return E;
    }
    catch (const json::exception& e)
    {
        throw ParseError(std::string("ellipsoid: ") + e.what());
    }
}

json to_json(const TrainReport& R)
{
    json j;
    j["train_accuracy"] = R.train_accuracy;
    j["validation_accuracy"] = R.validation_accuracy;
    j["initial_objective"] = R.initial_objective;
    j["best_objective"] = R.best_objective;
    j["best_validation_objective"] = R.best_validation_objective;
    j["best_epoch"] = R.best_epoch;
    j["condition_number"] = R.condition_number;
    j["pd_floor"] = R.pd_floor;
    j["lambda"] = R.lambda;
    j["epochs"] = R.epochs;
    j["train_size"] = R.train_size;
    j["validation_size"] = R.validation_size;
    j["objective_trace"] = R.objective_trace;
    return j;
}

} // namespace ofd
