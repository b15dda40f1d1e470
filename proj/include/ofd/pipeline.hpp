#pragma once

#include "ofd/classifier.hpp"
#include "ofd/dataset_gen.hpp"
#include "ofd/disagg.hpp"
#include "ofd/eval.hpp"
#include "ofd/flex_design.hpp"
#include "ofd/io.hpp"
#include "ofd/poly_geom.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace ofd
{

// invalid or incomplete configuration (exit code 2)
class ConfigError : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

// failure inside a pipeline stage (exit code 1)
class StageError : public std::runtime_error
{
    public:
        StageError(std::string stage, const std::string& what)
            : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
        const std::string& stage() const { return stage_; }

    private:
        std::string stage_;
};

struct PipelineConfig
{
    HorizonConfig horizon;
    std::uint64_t seed = 1;
    int workers = 1;

    // "polytope": labels against a known P(x_true); "fleet": device MILPs
    std::string oracle_kind;
    AggregatorModelVars model;
    Eigen::VectorXd H_lo, H_hi;          // optional override of the sampling box

    FleetCounts fleet_counts;
    int pool_size = 500;
    int K = 25;
    double epsilon = 0.0;
    long node_limit = 50000;
    bool mean_externality = false;
    std::string irradiance_csv;
    std::string ambient_csv;

    DatasetOptions dataset;
    TrainOptions train;
    double delta = 0.1;
    FmOptions fm;
    bool reduced = true;

    long mc_samples = 1000000;
    bool compute_m2 = true;
    M2Options m2;
    int uniform_check_samples = 0;
    double uniform_check_epsilon = 0.0;
};

// Missing keys without a default raise ConfigError naming the dotted key path.
PipelineConfig parse_config(const json& j);
json to_json(const PipelineConfig& c);

struct Instance
{
    std::string kind;
    HorizonConfig horizon;
    HPolytope F;                     // polytope kind
    Fleet fleet;                     // fleet kind
    std::vector<Scenario> pool;
    Scenario mean;
    HPolytope H;
};

json to_json(const Instance& inst);
Instance instance_from_json(const json& j);

Instance build_instance(const PipelineConfig& cfg);

// mean = true: a one-scenario oracle on the mean externalities
std::unique_ptr<FeasibilityOracle> make_oracle(const PipelineConfig& cfg, const Instance& inst,
    bool mean, double epsilon);

struct ApproxResult
{
    HPolytope PD;
    BallForm ball;
    int rotations = 0;
    int aux = 0;
    int lifted_rows = 0;
    FmStats stats;
};

json to_json(const ApproxResult& a);

struct DesignBundle
{
    DesignResult full;
    std::optional<DesignResult> reduced;
};

LabeledDataset stage_label(const PipelineConfig& cfg, const Instance& inst);
TrainResult stage_train(const PipelineConfig& cfg, const LabeledDataset& D);
ApproxResult stage_approx(const PipelineConfig& cfg, const Ellipsoid& E);
DesignBundle stage_design(const PipelineConfig& cfg, const LabeledDataset& D, const HPolytope& PD);
json stage_evaluate(const PipelineConfig& cfg, const Instance& inst, const LabeledDataset& D,
    const json& train_report, const ApproxResult& approx, const DesignBundle& design);
json stage_validate(const PipelineConfig& cfg, const std::filesystem::path& dir);

// file names inside an output directory
namespace artifact
{
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kInstance = "instance.json";
inline constexpr const char* kDataset = "dataset.jsonl";
inline constexpr const char* kEllipsoid = "ellipsoid.json";
inline constexpr const char* kTrainReport = "train_report.json";
inline constexpr const char* kPolytope = "pd.json";
inline constexpr const char* kApprox = "approx.json";
inline constexpr const char* kDesign = "design.json";
inline constexpr const char* kDesignReduced = "design_reduced.json";
inline constexpr const char* kBid = "market_bid.json";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kValidate = "validate.json";
} // namespace artifact

struct StagePaths
{
    std::filesystem::path out_dir;
    std::filesystem::path input_dir;           // upstream artifacts; defaults to out_dir
    std::filesystem::path dataset_override;    // --dataset
    std::filesystem::path polytope_override;   // --polytope
    std::filesystem::path ellipsoid_override;  // --ellipsoid
};

// File-level stages: read upstream artifacts, write their own.
void run_gen_data(const PipelineConfig& cfg, const StagePaths& paths);
void run_label(const PipelineConfig& cfg, const StagePaths& paths);
void run_train(const PipelineConfig& cfg, const StagePaths& paths);
void run_approx(const PipelineConfig& cfg, const StagePaths& paths);
void run_design(const PipelineConfig& cfg, const StagePaths& paths);
json run_evaluate(const PipelineConfig& cfg, const StagePaths& paths);
json run_pipeline(const PipelineConfig& cfg, const StagePaths& paths);

// exit code of the `ofd` tool
int cli_main(int argc, const char* const* argv);

} // namespace ofd
