#include "ofd/dataset_gen.hpp"
#include "ofd/parallel.hpp"

#include <algorithm>
#include <fstream>
#include <random>

namespace ofd
{

const char* to_string(PointOrigin origin)
{
    switch (origin)
    {
        case PointOrigin::Uniform: return "Uniform";
        case PointOrigin::Projection: return "Projection";
        case PointOrigin::Interpolated: return "Interpolated";
        case PointOrigin::ConvexCombo: return "ConvexCombo";
    }
    return "?";
}

PointOrigin point_origin_from_string(const std::string& name)
{
    for (PointOrigin o : {PointOrigin::Uniform, PointOrigin::Projection, PointOrigin::Interpolated,
             PointOrigin::ConvexCombo})
        if (name == to_string(o))
            return o;
    throw ParseError("unknown point origin '" + name + "'");
}

int LabeledDataset::feasible_count() const
{
    return static_cast<int>(std::count_if(points.begin(), points.end(), [](const LabeledPoint& q) { return q.y < 0; }));
}

std::vector<Eigen::VectorXd> LabeledDataset::feasible_points() const
{
    std::vector<Eigen::VectorXd> out;
    for (const auto& q : points)
        if (q.y < 0)
            out.push_back(q.p);
    return out;
}

std::vector<Eigen::VectorXd> LabeledDataset::infeasible_points() const
{
    std::vector<Eigen::VectorXd> out;
    for (const auto& q : points)
        if (q.y > 0)
            out.push_back(q.p);
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finalizer over the combined words
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

HPolytope box_polytope(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
{
    if (lo.size() != hi.size())
        throw DimensionMismatch("box bounds disagree in length");
    const auto T = lo.size();
    HPolytope H;
    H.A.resize(2 * T, T);
    H.A << Eigen::MatrixXd::Identity(T, T), -Eigen::MatrixXd::Identity(T, T);
    H.b.resize(2 * T);
    H.b << hi, -lo;
    for (Eigen::Index t = 0; t < T; ++t)
        H.tags.push_back("upper[" + std::to_string(t + 1) + "]");
    for (Eigen::Index t = 0; t < T; ++t)
        H.tags.push_back("lower[" + std::to_string(t + 1) + "]");
    return H;
}

void box_bounds(const HPolytope& H, Eigen::VectorXd& lo, Eigen::VectorXd& hi)
{
    const int T = H.dim();
    Eigen::MatrixXd expected(2 * T, T);
    expected << Eigen::MatrixXd::Identity(T, T), -Eigen::MatrixXd::Identity(T, T);
    if (H.rows() != 2 * T || H.A != expected)
        throw std::invalid_argument("H must be an axis-aligned box [I; -I] p <= (hi, -lo)");
    hi = H.b.head(T);
    lo = -H.b.tail(T);
}

HPolytope estimate_H(const Fleet& fleet, const std::vector<Scenario>& pool, const HorizonConfig& h, int workers)
{
    if (fleet.empty())
        throw EmptyFleet("estimate_H needs a fleet");
    if (pool.empty())
        throw std::invalid_argument("estimate_H needs at least one scenario");
    const int T = h.T;

    // per (scenario, device): hourly min and max of the LP relaxation
    std::vector<Eigen::MatrixXd> extremes(pool.size());
    parallel_for(pool.size(), workers, [&](std::size_t s) {
        Eigen::MatrixXd ext(2 * T, static_cast<Eigen::Index>(fleet.size()));
        for (std::size_t d = 0; d < fleet.size(); ++d)
        {
            const ModelFragment f = device_constraints(fleet[d], pool[s].devices[d], h);
            opt::LinearProgram lp = f.to_milp().base;
            for (int t = 0; t < T; ++t)
            {
                Eigen::VectorXd c = Eigen::VectorXd::Zero(f.num_vars());
                for (int k = 4 * t; k < 4 * t + 4; ++k)
                    for (const Term& term : f.load[k])
                        c[term.var] += kQuarterHour * term.coef;
                for (int sign : {1, -1})
                {
                    lp.objective = sign * c;
                    const opt::SolveResult r = opt::solve_lp(lp);
                    if (!r.optimal())
                        throw InfeasibleScenario("device " + std::to_string(d) + " has no feasible schedule in scenario " +
                            std::to_string(pool[s].seed));
                    ext(sign > 0 ? t : T + t, static_cast<Eigen::Index>(d)) = sign * r.objective;
                }
            }
        }
        extremes[s] = std::move(ext);
    });

    Eigen::VectorXd lo = Eigen::VectorXd::Zero(T);
    Eigen::VectorXd hi = Eigen::VectorXd::Zero(T);
    for (std::size_t d = 0; d < fleet.size(); ++d)
    {
        for (int t = 0; t < T; ++t)
        {
            double dmin = opt::kInf, dmax = -opt::kInf;
            for (const auto& ext : extremes)
            {
                dmin = std::min(dmin, ext(t, static_cast<Eigen::Index>(d)));
                dmax = std::max(dmax, ext(T + t, static_cast<Eigen::Index>(d)));
            }
            lo[t] += dmin;
            hi[t] += dmax;
        }
    }
    return box_polytope(lo, hi);
}

namespace
{

// Parent references inside a task are local (negative: -1 - local index);
// they are rewritten to dataset indices when the task output is merged.
struct TaskOutput
{
    std::vector<LabeledPoint> points;
    long labels = 0;
};

LabeledPoint make_point(const Eigen::VectorXd& p, const LabelResult& L, PointOrigin origin, std::uint64_t draw)
{
    LabeledPoint q;
    q.p = p;
    q.y = L.y;
    q.c = L.c;
    q.origin = origin;
    q.draw = draw;
    return q;
}

TaskOutput triplet_task(const FeasibilityOracle& oracle, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
    const DatasetOptions& opt, std::uint64_t task_seed)
{
    TaskOutput out;
    std::mt19937_64 rng(task_seed);
    std::uint64_t counter = 0;
    auto next_draw = [&] { return mix_seed(task_seed, ++counter); };
    auto label = [&](const Eigen::VectorXd& p, std::uint64_t draw) {
        ++out.labels;
        return oracle.label(p, draw);
    };

    // D1
    Eigen::VectorXd p1(lo.size());
    for (Eigen::Index t = 0; t < lo.size(); ++t)
        p1[t] = std::uniform_real_distribution<double>(lo[t], hi[t])(rng);
    const std::uint64_t d1 = next_draw();
    const LabelResult L1 = label(p1, d1);
    out.points.push_back(make_point(p1, L1, PointOrigin::Uniform, d1));
    if (L1.y < 0)
        return out;

    // D2: walk projections until a feasible point appears
    Eigen::VectorXd p2 = L1.best_projection;
    bool found = false;
    for (int it = 0; it < opt.max_proj_iters; ++it)
    {
        const std::uint64_t d2 = next_draw();
        const LabelResult L2 = label(p2, d2);
        if (L2.y < 0)
        {
            out.points.push_back(make_point(p2, L2, PointOrigin::Projection, d2));
            found = true;
            break;
        }
        p2 = L2.best_projection;
    }
    if (!found)
        return out;

    // D3: interpolate toward p1, moving the anchor while the result stays feasible
    int anchor = 1;
    for (int rep = 0; rep < opt.max_p3_repeats; ++rep)
    {
        const Eigen::VectorXd p3 = opt.kappa * p1 + (1.0 - opt.kappa) * out.points[anchor].p;
        const std::uint64_t d3 = next_draw();
        const LabelResult L3 = label(p3, d3);
        LabeledPoint q = make_point(p3, L3, PointOrigin::Interpolated, d3);
        q.parents = {-1, -1 - anchor};
        q.weights = {opt.kappa, 1.0 - opt.kappa};
        out.points.push_back(std::move(q));
        if (L3.y > 0)
            break;
        anchor = static_cast<int>(out.points.size()) - 1;
    }
    return out;
}

TaskOutput combo_task(const FeasibilityOracle& oracle, const LabeledDataset& D, const std::vector<int>& feasible,
    std::uint64_t task_seed)
{
    TaskOutput out;
    std::mt19937_64 rng(task_seed);
    const int available = static_cast<int>(feasible.size());
    const int k = std::min(available, std::uniform_int_distribution<int>(2, 4)(rng));
    std::vector<int> pick(feasible);
    for (int i = 0; i < k; ++i)
        std::swap(pick[i], pick[i + static_cast<int>(rng() % static_cast<std::uint64_t>(available - i))]);
    pick.resize(k);

    std::exponential_distribution<double> gamma1(1.0);
    std::vector<double> w(k);
    double total = 0.0;
    for (double& wi : w)
        total += (wi = gamma1(rng));
    Eigen::VectorXd p = Eigen::VectorXd::Zero(D.points[pick[0]].p.size());
    for (int i = 0; i < k; ++i)
    {
        w[i] /= total;
        p += w[i] * D.points[pick[i]].p;
    }
    const std::uint64_t draw = mix_seed(task_seed, 1);
    ++out.labels;
    LabeledPoint q = make_point(p, oracle.label(p, draw), PointOrigin::ConvexCombo, draw);
    q.parents = pick;
    q.weights = w;
    out.points.push_back(std::move(q));
    return out;
}

void merge(LabeledDataset& D, TaskOutput&& task)
{
    const int base = static_cast<int>(D.points.size());
    for (LabeledPoint& q : task.points)
    {
        for (int& parent : q.parents)
            if (parent < 0)
                parent = base + (-1 - parent);
        D.points.push_back(std::move(q));
    }
    D.labels_used += task.labels;
}

} // namespace

LabeledDataset generate(const FeasibilityOracle& oracle, const HPolytope& H, const DatasetOptions& opt)
{
    if (!(opt.kappa > 0.0 && opt.kappa < 1.0))
        throw std::invalid_argument("kappa must lie in (0, 1)");
    if (opt.n_target < 10)
        throw std::invalid_argument("n_target must be at least 10");
    Eigen::VectorXd lo, hi;
    box_bounds(H, lo, hi);
    if (lo.size() != oracle.dim())
        throw DimensionMismatch("H and the oracle disagree on the horizon length");

    const long budget = opt.label_budget > 0 ? opt.label_budget : 20L * opt.n_target;
    const int batch = std::max(opt.batch, 1);
    LabeledDataset D;
    D.epsilon = oracle.epsilon();
    D.kappa = opt.kappa;
    D.seed = opt.seed;

    std::uint64_t task_counter = 0;
    auto share = [&] {
        return D.points.empty() ? 0.0 : static_cast<double>(D.feasible_count()) / static_cast<double>(D.points.size());
    };

    while (static_cast<int>(D.points.size()) < opt.n_target || share() < opt.feasible_share)
    {
        if (D.labels_used >= budget)
            throw BudgetExhausted("labeling budget of " + std::to_string(budget) + " exhausted with " +
                std::to_string(D.points.size()) + " points (" + std::to_string(D.feasible_count()) + " feasible)");

        std::vector<int> feasible;
        for (int i = 0; i < static_cast<int>(D.points.size()); ++i)
            if (D.points[i].y < 0)
                feasible.push_back(i);

        std::vector<TaskOutput> outputs(static_cast<std::size_t>(batch));
        const std::uint64_t first = task_counter;
        task_counter += static_cast<std::uint64_t>(batch);
        if (share() < opt.feasible_share && feasible.size() >= 2)
        {
            parallel_for(outputs.size(), opt.workers, [&](std::size_t i) {
                outputs[i] = combo_task(oracle, D, feasible, mix_seed(opt.seed, first + i));
            });
        }
        else
        {
            parallel_for(outputs.size(), opt.workers, [&](std::size_t i) {
                outputs[i] = triplet_task(oracle, lo, hi, opt, mix_seed(opt.seed, first + i));
            });
        }
        for (auto& o : outputs)
            merge(D, std::move(o));
    }
    return D;
}

json to_json(const LabeledPoint& q)
{
    json j;
    j["p"] = to_json(q.p);
    j["y"] = q.y;
    j["c"] = q.c;
    j["origin"] = to_string(q.origin);
    j["draw"] = q.draw;
    if (!q.parents.empty())
    {
        j["parents"] = q.parents;
        j["weights"] = q.weights;
    }
    return j;
}

LabeledPoint labeled_point_from_json(const json& j)
{
    try
    {
        LabeledPoint q;
        q.p = vector_from_json(j.at("p"));
        q.y = j.at("y").get<int>();
        if (q.y != -1 && q.y != 1)
            throw ParseError("label must be -1 or +1");
        q.c = j.at("c").get<double>();
        q.origin = j.contains("origin") ? point_origin_from_string(j.at("origin").get<std::string>()) : PointOrigin::Uniform;
        q.draw = j.value("draw", std::uint64_t{0});
        if (j.contains("parents"))
        {
            q.parents = j.at("parents").get<std::vector<int>>();
            q.weights = j.at("weights").get<std::vector<double>>();
        }
        return q;
    }
    catch (const json::exception& e)
    {
        throw ParseError(std::string("dataset record: ") + e.what());
    }
}

void write_dataset(const std::filesystem::path& path, const LabeledDataset& D)
{
    std::string text;
    for (const auto& q : D.points)
        text += to_json(q).dump() + "\n";
    write_text_file(path, text);
    json meta;
    meta["epsilon"] = D.epsilon;
    meta["kappa"] = D.kappa;
    meta["seed"] = D.seed;
    meta["labels_used"] = D.labels_used;
    meta["points"] = D.points.size();
    meta["feasible"] = D.feasible_count();
    write_json_file(path.string() + ".meta.json", meta);
}

LabeledDataset read_dataset(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open dataset " + path.string());
    LabeledDataset D;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try
        {
            D.points.push_back(labeled_point_from_json(json::parse(line)));
        }
        catch (const json::exception& e)
        {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    const std::filesystem::path meta_path = path.string() + ".meta.json";
    if (std::filesystem::exists(meta_path))
    {
        const json meta = read_json_file(meta_path);
        D.epsilon = meta.value("epsilon", 0.0);
        D.kappa = meta.value("kappa", 0.2);
        D.seed = meta.value("seed", std::uint64_t{0});
        D.labels_used = meta.value("labels_used", 0L);
    }
    return D;
}

} // namespace ofd
