#include "ofd/pipeline.hpp"

#include "ofd/devices_io.hpp"
#include "ofd/parallel.hpp"

#include <algorithm>
#include <random>

namespace ofd
{

namespace
{

// Read access to one config section; errors carry the dotted key path.
class Section
{
    public:
        Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {}

        std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

        bool has(const std::string& key) const
        {
            return node_ && node_->is_object() && node_->contains(key) && !node_->at(key).is_null();
        }

        const json& require(const std::string& key) const
        {
            if (!has(key))
                throw ConfigError("missing config key: " + key_path(key));
            return node_->at(key);
        }

        template <typename T>
        T get(const std::string& key) const
        {
            const json& v = require(key);
            try
            {
                return v.get<T>();
            }
            catch (const json::exception&)
            {
                throw ConfigError("config key " + key_path(key) + " has the wrong type");
            }
        }

        template <typename T>
        T get_or(const std::string& key, T fallback) const
        {
            return has(key) ? get<T>(key) : fallback;
        }

        Eigen::VectorXd vec(const std::string& key) const
        {
            try
            {
                return vector_from_json(require(key));
            }
            catch (const ParseError&)
            {
                throw ConfigError("config key " + key_path(key) + " must be an array of numbers");
            }
        }

        Section sub(const std::string& key) const
        {
            const json& v = require(key);
            if (!v.is_object())
                throw ConfigError("config key " + key_path(key) + " must be an object");
            return Section(&v, key_path(key));
        }

        Section sub_or_empty(const std::string& key) const
        {
            return has(key) ? sub(key) : Section(nullptr, key_path(key));
        }

    private:
        const json* node_;
        std::string path_;
};

enum Stream : std::uint64_t
{
    kFleetStream = 1,
    kPoolStream = 2,
    kDatasetStream = 3,
    kVolumeStream = 4,
    kPrototypeVolumeStream = 5,
    kReducedVolumeStream = 6,
    kTruthVolumeStream = 7,
    kM2Stream = 8,
    kCheckStream = 9
};

} // namespace

PipelineConfig parse_config(const json& j)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    const Section root(&j, "");
    PipelineConfig c;

    const Section horizon = root.sub("horizon");
    c.horizon.T = horizon.get<int>("T");
    c.horizon.delta_hours = horizon.get_or("delta_hours", 1.0);
    c.horizon.start_hour = horizon.get_or("start_hour", 0);
    try
    {
        c.horizon.validate();
    }
    catch (const std::exception& e)
    {
        throw ConfigError(std::string("horizon: ") + e.what());
    }
    c.seed = root.get_or<std::uint64_t>("seed", 1);
    c.workers = root.get_or("workers", 1);

    const Section oracle = root.sub("oracle");
    c.oracle_kind = oracle.get<std::string>("kind");
    if (c.oracle_kind == "polytope")
    {
        const Section m = oracle.sub("model");
        c.model.p_max = m.vec("p_max");
        c.model.p_min = m.vec("p_min");
        c.model.s0 = m.get<double>("s0");
        c.model.s_max = m.vec("s_max");
        c.model.s_min = m.vec("s_min");
        c.model.ramp_up = m.vec("ramp_up");
        c.model.ramp_dn = m.vec("ramp_dn");
        if (oracle.has("H"))
        {
            const Section H = oracle.sub("H");
            c.H_lo = H.vec("lo");
            c.H_hi = H.vec("hi");
        }
    }
    else if (c.oracle_kind == "fleet")
    {
        const Section f = oracle.sub("fleet");
        c.fleet_counts.pv = f.get<int>("pv");
        c.fleet_counts.battery = f.get<int>("battery");
        c.fleet_counts.ev = f.get<int>("ev");
        c.fleet_counts.tcl = f.get<int>("tcl");
        c.pool_size = oracle.get_or("pool_size", c.pool_size);
        c.K = oracle.get_or("K", c.K);
        c.epsilon = oracle.get_or("epsilon", c.epsilon);
        c.node_limit = oracle.get_or("node_limit", c.node_limit);
        c.mean_externality = oracle.get_or("mean_externality", false);
        const Section prof = oracle.sub_or_empty("profiles");
        c.irradiance_csv = prof.get_or<std::string>("irradiance", "");
        c.ambient_csv = prof.get_or<std::string>("ambient", "");
        if (c.K < 1 || c.K > c.pool_size)
            throw ConfigError("config key oracle.K must lie in [1, oracle.pool_size]");
        if (c.epsilon < 0.0 || c.epsilon >= 1.0)
            throw ConfigError("config key oracle.epsilon must lie in [0, 1)");
    }
    else
    {
        throw ConfigError("config key oracle.kind must be \"polytope\" or \"fleet\"");
    }

    const Section d = root.sub_or_empty("dataset");
    c.dataset.n_target = d.get_or("N", c.dataset.n_target);
    c.dataset.kappa = d.get_or("kappa", c.dataset.kappa);
    c.dataset.max_proj_iters = d.get_or("max_proj_iters", c.dataset.max_proj_iters);
    c.dataset.max_p3_repeats = d.get_or("max_p3_repeats", c.dataset.max_p3_repeats);
    c.dataset.feasible_share = d.get_or("feasible_share", c.dataset.feasible_share);
    c.dataset.label_budget = d.get_or("label_budget", c.dataset.label_budget);
    c.dataset.batch = d.get_or("batch", c.dataset.batch);
    c.dataset.seed = d.get_or<std::uint64_t>("seed", mix_seed(c.seed, kDatasetStream));
    c.dataset.workers = c.workers;
    if (!(c.dataset.kappa > 0.0 && c.dataset.kappa < 1.0))
        throw ConfigError("config key dataset.kappa must lie in (0, 1)");

    const Section t = root.sub_or_empty("classifier");
    c.train.lambda = t.get_or("lambda", c.train.lambda);
    c.train.split_seed = t.get_or<std::uint64_t>("split_seed", c.train.split_seed);
    c.train.train_fraction = t.get_or("train_fraction", c.train.train_fraction);
    c.train.alpha0 = t.get_or("alpha0", c.train.alpha0);
    c.train.epochs = t.get_or("epochs", c.train.epochs);
    c.train.workers = c.workers;

    const Section a = root.sub_or_empty("approx");
    c.delta = a.get_or("delta", c.delta);
    c.fm.prune_budget = a.get_or("prune_budget", c.fm.prune_budget);
    c.fm.row_cap = a.get_or("row_cap", c.fm.row_cap);
    c.fm.workers = c.workers;

    const Section ds = root.sub_or_empty("design");
    c.reduced = ds.get_or("reduced", c.reduced);

    const Section ev = root.sub_or_empty("evaluate");
    c.mc_samples = ev.get_or("mc_samples", c.mc_samples);
    c.compute_m2 = ev.get_or("M2", c.compute_m2);
    c.m2.samples = ev.get_or("M2_samples", c.m2.samples);
    c.m2.seed = ev.get_or<std::uint64_t>("M2_seed", mix_seed(c.seed, kM2Stream));
    const std::string sampler = ev.get_or<std::string>("M2_sampler", "hit_and_run");
    if (sampler == "hit_and_run")
        c.m2.sampler = HullSampler::HitAndRun;
    else if (sampler == "dirichlet")
        c.m2.sampler = HullSampler::Dirichlet;
    else
        throw ConfigError("config key evaluate.M2_sampler must be \"hit_and_run\" or \"dirichlet\"");
    c.uniform_check_samples = ev.get_or("uniform_check_samples", 0);
    c.uniform_check_epsilon = ev.get_or("uniform_check_epsilon", 0.0);
    return c;
}

json to_json(const PipelineConfig& c)
{
    json j;
    j["horizon"] = to_json(c.horizon);
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    json o;
    o["kind"] = c.oracle_kind;
    if (c.oracle_kind == "polytope")
    {
        o["model"] = {{"p_max", to_json(c.model.p_max)}, {"p_min", to_json(c.model.p_min)}, {"s0", c.model.s0},
            {"s_max", to_json(c.model.s_max)}, {"s_min", to_json(c.model.s_min)},
            {"ramp_up", to_json(c.model.ramp_up)}, {"ramp_dn", to_json(c.model.ramp_dn)}};
        if (c.H_lo.size() > 0)
            o["H"] = {{"lo", to_json(c.H_lo)}, {"hi", to_json(c.H_hi)}};
    }
    else
    {
        o["fleet"] = {{"pv", c.fleet_counts.pv}, {"battery", c.fleet_counts.battery}, {"ev", c.fleet_counts.ev},
            {"tcl", c.fleet_counts.tcl}};
        o["pool_size"] = c.pool_size;
        o["K"] = c.K;
        o["epsilon"] = c.epsilon;
        o["node_limit"] = c.node_limit;
        o["mean_externality"] = c.mean_externality;
        o["profiles"] = {{"irradiance", c.irradiance_csv}, {"ambient", c.ambient_csv}};
    }
    j["oracle"] = std::move(o);
    j["dataset"] = {{"N", c.dataset.n_target}, {"kappa", c.dataset.kappa}, {"max_proj_iters", c.dataset.max_proj_iters},
        {"max_p3_repeats", c.dataset.max_p3_repeats}, {"feasible_share", c.dataset.feasible_share},
        {"label_budget", c.dataset.label_budget}, {"batch", c.dataset.batch}, {"seed", c.dataset.seed}};
    j["classifier"] = {{"lambda", c.train.lambda}, {"split_seed", c.train.split_seed},
        {"train_fraction", c.train.train_fraction}, {"alpha0", c.train.alpha0}, {"epochs", c.train.epochs}};
    j["approx"] = {{"delta", c.delta}, {"prune_budget", c.fm.prune_budget}, {"row_cap", c.fm.row_cap}};
    j["design"] = {{"reduced", c.reduced}};
    j["evaluate"] = {{"mc_samples", c.mc_samples}, {"M2", c.compute_m2}, {"M2_samples", c.m2.samples},
        {"M2_seed", c.m2.seed}, {"M2_sampler", c.m2.sampler == HullSampler::HitAndRun ? "hit_and_run" : "dirichlet"},
        {"uniform_check_samples", c.uniform_check_samples}, {"uniform_check_epsilon", c.uniform_check_epsilon}};
    return j;
}

json to_json(const Instance& inst)
{
    json j;
    j["kind"] = inst.kind;
    j["horizon"] = to_json(inst.horizon);
    j["H"] = to_json(inst.H);
    if (inst.kind == "polytope")
    {
        j["F"] = to_json(inst.F);
        return j;
    }
    j["fleet"] = to_json(inst.fleet);
    json pool = json::array();
    for (const auto& s : inst.pool)
        pool.push_back(to_json(s));
    j["pool"] = std::move(pool);
    j["mean"] = to_json(inst.mean);
    return j;
}

Instance instance_from_json(const json& j)
{
    try
    {
        Instance inst;
        inst.kind = j.at("kind").get<std::string>();
        inst.horizon = horizon_from_json(j.at("horizon"));
        inst.H = polytope_from_json(j.at("H"));
        if (inst.kind == "polytope")
        {
            inst.F = polytope_from_json(j.at("F"));
            return inst;
        }
        inst.fleet = fleet_from_json(j.at("fleet"));
        for (const auto& s : j.at("pool"))
            inst.pool.push_back(scenario_from_json(s));
        inst.mean = scenario_from_json(j.at("mean"));
        return inst;
    }
    catch (const json::exception& e)
    {
        throw ParseError(std::string("instance: ") + e.what());
    }
}

Instance build_instance(const PipelineConfig& cfg)
{
    Instance inst;
    inst.kind = cfg.oracle_kind;
    inst.horizon = cfg.horizon;
    const HorizonConfig& h = cfg.horizon;

    if (cfg.oracle_kind == "polytope")
    {
        inst.F = market_polytope(build_G(h), build_x(cfg.model, h), market_row_tags(h));
        if (cfg.H_lo.size() > 0)
        {
            inst.H = box_polytope(cfg.H_lo, cfg.H_hi);
        }
        else
        {
            const Box box = bounding_box(inst.F);
            inst.H = box_polytope(box.lo, box.hi);
        }
        return inst;
    }

    inst.fleet = generate_fleet(cfg.fleet_counts, mix_seed(cfg.seed, kFleetStream));
    BaseProfiles base = synthetic_profiles(h);
    if (!cfg.irradiance_csv.empty())
        base.irradiance = ingest_profile(cfg.irradiance_csv, h, ProfileKind::Irradiance);
    if (!cfg.ambient_csv.empty())
        base.ambient = ingest_profile(cfg.ambient_csv, h, ProfileKind::Ambient);

    const std::uint64_t pool_seed = mix_seed(cfg.seed, kPoolStream);
    inst.pool.resize(static_cast<std::size_t>(cfg.pool_size));
    parallel_for(inst.pool.size(), cfg.workers, [&](std::size_t r) {
        inst.pool[r] = sample_scenario(inst.fleet, h, base, mix_seed(pool_seed, r));
    });
    inst.mean = mean_scenario(inst.fleet, h, base);
    if (cfg.mean_externality)
        inst.H = estimate_H(inst.fleet, {inst.mean}, h, cfg.workers);
    else
        inst.H = estimate_H(inst.fleet, inst.pool, h, cfg.workers);
    return inst;
}

std::unique_ptr<FeasibilityOracle> make_oracle(const PipelineConfig& cfg, const Instance& inst, bool mean,
    double epsilon)
{
    if (inst.kind == "polytope")
        return std::make_unique<PolytopeOracle>(inst.F);
    DisaggOptions opts;
    opts.node_limit = cfg.node_limit;
    if (mean)
        return std::make_unique<FleetOracle>(inst.fleet, inst.horizon, std::vector<Scenario>{inst.mean}, 1,
            epsilon, opts, cfg.workers);
    return std::make_unique<FleetOracle>(inst.fleet, inst.horizon, inst.pool, cfg.K, epsilon, opts, cfg.workers);
}

json to_json(const ApproxResult& a)
{
    return json{{"rotations", a.rotations}, {"aux", a.aux}, {"lifted_rows", a.lifted_rows},
        {"pd_rows", a.PD.rows()}, {"radius", a.ball.r}, {"eliminated", a.stats.eliminated},
        {"peak_rows", a.stats.peak_rows}, {"lp_tests", a.stats.lp_tests}, {"lp_removed", a.stats.lp_removed}};
}

LabeledDataset stage_label(const PipelineConfig& cfg, const Instance& inst)
{
    const auto oracle = make_oracle(cfg, inst, cfg.mean_externality, cfg.epsilon);
    return generate(*oracle, inst.H, cfg.dataset);
}

TrainResult stage_train(const PipelineConfig& cfg, const LabeledDataset& D)
{
    return train(D, cfg.train);
}

ApproxResult stage_approx(const PipelineConfig& cfg, const Ellipsoid& E)
{
    ApproxResult a;
    a.ball = to_ball_form(E);
    const int T = E.dim();
    const LiftedPolytope L = map_to_p(ball_approximation(T, a.ball.r, cfg.delta), a.ball.M, a.ball.m);
    a.rotations = rotations_for(T, cfg.delta);
    a.aux = L.aux();
    a.lifted_rows = L.rows();
    a.PD = fourier_motzkin(L, cfg.fm, &a.stats);
    return a;
}

DesignBundle stage_design(const PipelineConfig& cfg, const LabeledDataset& D, const HPolytope& PD)
{
    DesignOptions opts;
    opts.workers = cfg.workers;
    const auto feasible = D.feasible_points();
    DesignBundle out;
    const Eigen::MatrixXd G = build_G(cfg.horizon);
    out.full = farkas_design(compute_prototype(feasible, G), G, PD, opts);
    if (cfg.reduced)
    {
        const Eigen::MatrixXd Gr = build_reduced_G(cfg.horizon);
        out.reduced = farkas_design(compute_prototype(feasible, Gr), Gr, PD, opts);
    }
    return out;
}

namespace
{

json volume_json(const VolumeEstimate& v)
{
    return json{{"estimate", v.estimate}, {"std_error", v.std_error}, {"samples", v.samples}, {"hits", v.hits},
        {"seed", v.seed}, {"box_volume", v.box_volume}};
}

} // namespace

json stage_evaluate(const PipelineConfig& cfg, const Instance& inst, const LabeledDataset& D,
    const json& train_report, const ApproxResult& approx, const DesignBundle& design)
{
    const HorizonConfig& h = cfg.horizon;
    const int T = h.T;
    const Eigen::MatrixXd G = build_G(h);
    const HPolytope Px = market_polytope(G, design.full.x_star, market_row_tags(h));
    const HPolytope Pbar = market_polytope(G, design.full.x_bar, market_row_tags(h));

    json report;
    report["T"] = T;
    report["seed"] = cfg.seed;
    report["oracle"] = cfg.oracle_kind;
    report["epsilon"] = cfg.epsilon;
    report["mean_externality"] = cfg.mean_externality;
    report["dataset"] = {{"size", D.points.size()}, {"feasible", D.feasible_count()},
        {"labels_used", D.labels_used}, {"M1", metric_M1(D, cfg.workers)}};
    report["train"] = train_report;
    report["approx"] = to_json(approx);

    const ContainmentCertificate cert = certify_containment(Px, approx.PD, 1e-6, cfg.workers);
    report["containment"] = {{"contained", cert.contained}, {"worst_slack", cert.worst_slack},
        {"worst_row", cert.worst_row}};
    report["design"] = {{"beta", design.full.beta}, {"z", to_json(design.full.z)},
        {"x_star", to_json(design.full.x_star)}, {"dropped_rows", design.full.dropped_rows}};

    json volumes;
    const VolumeEstimate vx = mc_volume(Px, cfg.mc_samples, mix_seed(cfg.seed, kVolumeStream), cfg.workers);
    const VolumeEstimate vbar = mc_volume(Pbar, cfg.mc_samples, mix_seed(cfg.seed, kPrototypeVolumeStream),
        cfg.workers);
    volumes["x_star"] = volume_json(vx);
    volumes["prototype"] = volume_json(vbar);
    volumes["predicted_x_star"] = {{"estimate", volume_scale(vbar.estimate, design.full.beta, T)},
        {"std_error", volume_scale(vbar.std_error, design.full.beta, T)}};
    if (design.reduced)
    {
        const HPolytope Pr = market_polytope(build_reduced_G(h), design.reduced->x_star);
        volumes["reduced"] = volume_json(mc_volume(Pr, cfg.mc_samples, mix_seed(cfg.seed, kReducedVolumeStream),
            cfg.workers));
        report["design_reduced"] = {{"beta", design.reduced->beta}, {"x_star", to_json(design.reduced->x_star)}};
    }
    if (inst.kind == "polytope")
        volumes["truth"] = volume_json(mc_volume(inst.F, cfg.mc_samples, mix_seed(cfg.seed, kTruthVolumeStream),
            cfg.workers));
    report["volumes"] = std::move(volumes);

    if (cfg.compute_m2)
    {
        const auto oracle = make_oracle(cfg, inst, cfg.mean_externality, cfg.epsilon);
        const M2Result m2 = metric_M2(D, *oracle, cfg.m2);
        report["M2"] = {{"fraction", m2.fraction}, {"samples", m2.points.size()},
            {"sampler", cfg.m2.sampler == HullSampler::HitAndRun ? "hit_and_run" : "dirichlet"}};
    }

    if (cfg.uniform_check_samples > 0)
    {
        // label uniform samples of the bid against the random-externality oracle
        const auto oracle = make_oracle(cfg, inst, false, cfg.uniform_check_epsilon);
        const std::uint64_t seed = mix_seed(cfg.seed, kCheckStream);
        const auto points = sample_polytope(Px, cfg.uniform_check_samples, seed);
        long failed = 0;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (oracle->label(points[i], mix_seed(seed, i + 1)).y > 0)
                ++failed;
        report["uniform_check"] = {{"samples", points.size()}, {"epsilon", cfg.uniform_check_epsilon},
            {"infeasible_fraction", static_cast<double>(failed) / static_cast<double>(points.size())}};
    }
    return report;
}

namespace
{

std::filesystem::path input_path(const StagePaths& p, const char* name)
{
    return (p.input_dir.empty() ? p.out_dir : p.input_dir) / name;
}

json read_input(const StagePaths& p, const char* name, const std::string& stage)
{
    const auto path = input_path(p, name);
    if (!std::filesystem::exists(path))
        throw StageError(stage, "missing input " + path.string());
    return read_json_file(path);
}

LabeledDataset load_dataset(const StagePaths& p, const std::string& stage)
{
    const auto path = p.dataset_override.empty() ? input_path(p, artifact::kDataset) : p.dataset_override;
    if (!std::filesystem::exists(path))
        throw StageError(stage, "missing input " + path.string());
    return read_dataset(path);
}

HPolytope load_polytope(const StagePaths& p, const std::string& stage)
{
    if (!p.polytope_override.empty())
        return polytope_from_json(read_json_file(p.polytope_override));
    return polytope_from_json(read_input(p, artifact::kPolytope, stage));
}

Ellipsoid load_ellipsoid(const StagePaths& p, const std::string& stage)
{
    if (!p.ellipsoid_override.empty())
        return ellipsoid_from_json(read_json_file(p.ellipsoid_override));
    return ellipsoid_from_json(read_input(p, artifact::kEllipsoid, stage));
}

template <typename Fn>
auto guarded(const std::string& stage, Fn&& fn)
{
    try
    {
        return fn();
    }
    catch (const ConfigError&)
    {
        throw;
    }
    catch (const StageError&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        throw StageError(stage, e.what());
    }
}

void write_plots(const PipelineConfig& cfg, const StagePaths& p, const Instance& inst, const LabeledDataset& D,
    const Ellipsoid& E, const HPolytope& PD, const DesignBundle& design)
{
    if (cfg.horizon.T != 2)
        return;
    const auto dir = p.out_dir / "plots";
    write_text_file(dir / "dataset.csv", "series,x,y\n" + dataset_csv(D));
    std::string shapes = "series,x,y\n";
    shapes += ellipse_csv("E_D", E);
    shapes += polygon_csv("P_D", PD);
    shapes += polygon_csv("P_x_star", market_polytope(build_G(cfg.horizon), design.full.x_star));
    if (design.reduced)
        shapes += polygon_csv("P_x_reduced", market_polytope(build_reduced_G(cfg.horizon), design.reduced->x_star));
    if (inst.kind == "polytope")
        shapes += polygon_csv("F", inst.F);
    write_text_file(dir / "shapes.csv", shapes);
}

} // namespace

void run_gen_data(const PipelineConfig& cfg, const StagePaths& p)
{
    guarded("gen-data", [&] {
        write_json_file(p.out_dir / artifact::kConfig, to_json(cfg));
        write_json_file(p.out_dir / artifact::kInstance, to_json(build_instance(cfg)));
    });
}

void run_label(const PipelineConfig& cfg, const StagePaths& p)
{
    guarded("label", [&] {
        const Instance inst = instance_from_json(read_input(p, artifact::kInstance, "label"));
        write_dataset(p.out_dir / artifact::kDataset, stage_label(cfg, inst));
    });
}

void run_train(const PipelineConfig& cfg, const StagePaths& p)
{
    guarded("train", [&] {
        const TrainResult r = stage_train(cfg, load_dataset(p, "train"));
        write_json_file(p.out_dir / artifact::kEllipsoid, to_json(r.ellipsoid));
        write_json_file(p.out_dir / artifact::kTrainReport, to_json(r.report));
    });
}

void run_approx(const PipelineConfig& cfg, const StagePaths& p)
{
    guarded("approx", [&] {
        const ApproxResult a = stage_approx(cfg, load_ellipsoid(p, "approx"));
        write_json_file(p.out_dir / artifact::kPolytope, to_json(a.PD));
        write_json_file(p.out_dir / artifact::kApprox, to_json(a));
    });
}

void run_design(const PipelineConfig& cfg, const StagePaths& p)
{
    guarded("design", [&] {
        const DesignBundle d = stage_design(cfg, load_dataset(p, "design"), load_polytope(p, "design"));
        write_json_file(p.out_dir / artifact::kDesign, to_json(d.full));
        if (d.reduced)
            write_json_file(p.out_dir / artifact::kDesignReduced, to_json(*d.reduced));
        write_json_file(p.out_dir / artifact::kBid,
            json{{"model", "battery_with_ramping"}, {"horizon", to_json(cfg.horizon)},
                {"x_star", to_json(d.full.x_star)}});
    });
}

json run_evaluate(const PipelineConfig& cfg, const StagePaths& p)
{
    return guarded("evaluate", [&] {
        const Instance inst = instance_from_json(read_input(p, artifact::kInstance, "evaluate"));
        const LabeledDataset D = load_dataset(p, "evaluate");
        const json train_report = read_input(p, artifact::kTrainReport, "evaluate");
        const Ellipsoid E = load_ellipsoid(p, "evaluate");
        ApproxResult approx;
        approx.PD = load_polytope(p, "evaluate");
        const json a = read_input(p, artifact::kApprox, "evaluate");
        approx.rotations = a.value("rotations", 0);
        approx.aux = a.value("aux", 0);
        approx.lifted_rows = a.value("lifted_rows", 0);
        approx.ball.r = a.value("radius", 0.0);
        approx.stats.eliminated = a.value("eliminated", 0);
        approx.stats.peak_rows = a.value("peak_rows", 0L);
        approx.stats.lp_tests = a.value("lp_tests", 0L);
        approx.stats.lp_removed = a.value("lp_removed", 0L);
        DesignBundle design;
        design.full = design_result_from_json(read_input(p, artifact::kDesign, "evaluate"));
        const auto reduced_path = input_path(p, artifact::kDesignReduced);
        if (cfg.reduced && std::filesystem::exists(reduced_path))
            design.reduced = design_result_from_json(read_json_file(reduced_path));
        json report = stage_evaluate(cfg, inst, D, train_report, approx, design);
        write_json_file(p.out_dir / artifact::kReport, report);
        write_plots(cfg, p, inst, D, E, approx.PD, design);
        return report;
    });
}

json run_pipeline(const PipelineConfig& cfg, const StagePaths& paths)
{
    StagePaths p = paths;
    p.input_dir = p.out_dir;
    run_gen_data(cfg, p);
    run_label(cfg, p);
    run_train(cfg, p);
    run_approx(cfg, p);
    run_design(cfg, p);
    return run_evaluate(cfg, p);
}

json stage_validate(const PipelineConfig& cfg, const std::filesystem::path& dir)
{
    json checks = json::array();
    bool all = true;
    auto record = [&](const std::string& name, bool pass, const std::string& detail) {
        checks.push_back(json{{"name", name}, {"pass", pass}, {"detail", detail}});
        all = all && pass;
    };
    auto attempt = [&](const std::string& name, auto&& fn) {
        try
        {
            fn();
        }
        catch (const std::exception& e)
        {
            record(name, false, e.what());
        }
    };

    const auto dataset_path = dir / artifact::kDataset;
    LabeledDataset D;
    bool have_dataset = false;
    if (!std::filesystem::exists(dataset_path) || std::filesystem::file_size(dataset_path) == 0)
    {
        record("dataset", false, "missing-input: " + dataset_path.string());
    }
    else
    {
        attempt("dataset", [&] {
            D = read_dataset(dataset_path);
            if (D.points.empty())
            {
                record("dataset", false, "missing-input: dataset has no points");
                return;
            }
            have_dataset = true;
            record("dataset", true, std::to_string(D.points.size()) + " points");
        });
    }

    const HorizonConfig& h = cfg.horizon;
    const Eigen::MatrixXd G = build_G(h);
    std::optional<DesignResult> design;
    std::optional<HPolytope> PD;
    attempt("containment", [&] {
        design = design_result_from_json(read_json_file(dir / artifact::kDesign));
        PD = polytope_from_json(read_json_file(dir / artifact::kPolytope));
        const ContainmentCertificate c = certify_containment(market_polytope(G, design->x_star), *PD);
        record("containment", c.contained, "worst slack " + std::to_string(c.worst_slack));
    });

    attempt("sandwich", [&] {
        const LiftedPolytope L = ball_approximation(h.T, 1.0, cfg.delta);
        const HPolytope P = fourier_motzkin(L, cfg.fm);
        std::mt19937_64 rng(mix_seed(cfg.seed, 77));
        std::normal_distribution<double> N(0.0, 1.0);
        double lo = opt::kInf, hi = -opt::kInf;
        for (int k = 0; k < 500; ++k)
        {
            Eigen::VectorXd u(h.T);
            for (int t = 0; t < h.T; ++t)
                u[t] = N(rng);
            u /= u.norm();
            const double s = support(P, u);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        const bool ok = lo >= 1.0 / (1.0 + cfg.delta) - 1e-7 && hi <= 1.0 + 1e-7;
        record("sandwich", ok, "support range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    });

    if (design && have_dataset)
    {
        attempt("prototype", [&] {
            double worst = 0.0;
            for (const auto& p : D.feasible_points())
                worst = std::max(worst, (G * p - design->x_bar).maxCoeff());
            record("prototype", worst <= 1e-9, "max violation " + std::to_string(worst));
        });
        attempt("shift_scale", [&] {
            const HPolytope Pbar = market_polytope(G, design->x_bar);
            const HPolytope Px = market_polytope(G, design->x_star);
            const auto samples = sample_polytope(Pbar, 200, mix_seed(cfg.seed, 78));
            int bad = 0;
            for (const auto& pbar : samples)
                if (!membership(Px, (pbar - design->z) / design->beta, 1e-9))
                    ++bad;
            record("shift_scale", bad == 0, std::to_string(bad) + " of 200 replica points outside P(x*)");
        });
    }

    if (have_dataset)
    {
        attempt("label_determinism", [&] {
            const Instance inst = instance_from_json(read_json_file(dir / artifact::kInstance));
            const auto oracle = make_oracle(cfg, inst, cfg.mean_externality, cfg.epsilon);
            int bad = 0, checked = 0;
            for (std::size_t i = 0; i < D.points.size() && checked < 3; i += std::max<std::size_t>(1, D.points.size() / 3))
            {
                const auto& pt = D.points[i];
                if (oracle->label(pt.p, pt.draw).y != pt.y)
                    ++bad;
                ++checked;
            }
            record("label_determinism", bad == 0, std::to_string(bad) + " of " + std::to_string(checked)
                + " relabeled points changed class");
        });
    }
    return json{{"pass", all}, {"checks", std::move(checks)}};
}

} // namespace ofd
