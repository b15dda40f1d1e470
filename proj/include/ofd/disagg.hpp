#pragma once

#include "ofd/devices.hpp"
#include "ofd/milp.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

namespace ofd
{

struct DisaggOptions
{
    long node_limit = 50000;
    // stop at the first incumbent with g <= g_tol instead of proving the optimum
    bool zero_test = true;
    // re-check every device schedule against its physics after the solve
    bool verify = false;
};

struct DisaggResult
{
    double g_value = 0.0;           // ||p - p_hat||_1 of the returned schedules
    double g_lower = 0.0;           // proven lower bound on g
    bool zero = false;              // g certified <= g_tol
    opt::SolveStatus status = opt::SolveStatus::Infeasible;
    std::vector<DeviceSchedule> schedules;
    Eigen::VectorXd p_hat;
    long nodes = 0;
};

double g_tolerance(const Eigen::VectorXd& p);

// Device fragments depend only on the scenario, so they are built once and
// reused for every schedule p tested against it.
class DisaggModel
{
    public:
        DisaggModel(const Fleet& fleet, const Scenario& scenario, const HorizonConfig& h);

        DisaggResult solve(const Eigen::VectorXd& p, const DisaggOptions& options = {}) const;

        const HorizonConfig& horizon() const { return h_; }
        int num_vars() const { return num_vars_; }
        int num_rows() const { return num_rows_; }
        int num_binaries() const { return static_cast<int>(binaries_.size()); }

    private:
        Fleet fleet_;
        Scenario scenario_;
        HorizonConfig h_;
        std::vector<ModelFragment> fragments_;
        std::vector<int> offsets_;
        std::vector<int> binaries_;
        int num_vars_ = 0;
        int num_rows_ = 0;
        opt::MilpProgram program_;     // rhs of the balance rows set per call

        // root basis at p = 0, shared by every solve so results do not depend on call order
        mutable std::once_flag basis_once_;
        mutable std::shared_ptr<const opt::Basis> basis_;
};

DisaggResult solve_disaggregation(const Eigen::VectorXd& p, const Scenario& scenario, const Fleet& fleet,
    const HorizonConfig& h, const DisaggOptions& options = {});

// 1 - epsilon threshold with a 1e-12 guard against rounding of c
bool chance_feasible(double c, double epsilon);

struct LabelResult
{
    int y = 1;                          // -1 feasible, +1 infeasible
    double c = 0.0;
    Eigen::VectorXd best_projection;    // p_hat from the scenario with the largest g(p; w)
    std::vector<double> g_values;
};

class FeasibilityOracle
{
    public:
        virtual ~FeasibilityOracle() = default;
        virtual int dim() const = 0;
        virtual double epsilon() const = 0;
        // `draw` selects the scenario subset; equal draws give equal labels
        virtual LabelResult label(const Eigen::VectorXd& p, std::uint64_t draw) const = 0;
};

// Chance-constrained labels from a pre-sampled scenario pool.
class FleetOracle : public FeasibilityOracle
{
    public:
        FleetOracle(Fleet fleet, HorizonConfig h, std::vector<Scenario> pool, int K, double epsilon,
            DisaggOptions options = {}, int workers = 1);

        int dim() const override { return h_.T; }
        double epsilon() const override { return epsilon_; }
        LabelResult label(const Eigen::VectorXd& p, std::uint64_t draw) const override;

        // K pool indices drawn without replacement
        std::vector<int> draw_indices(std::uint64_t draw) const;
        double chance_statistic(const Eigen::VectorXd& p, std::uint64_t draw) const;

        const Fleet& fleet() const { return fleet_; }
        const std::vector<Scenario>& pool() const { return pool_; }
        const HorizonConfig& horizon() const { return h_; }
        int K() const { return K_; }

    private:
        Fleet fleet_;
        HorizonConfig h_;
        std::vector<Scenario> pool_;
        std::vector<std::unique_ptr<DisaggModel>> models_;
        int K_;
        double epsilon_;
        DisaggOptions options_;
        int workers_;
};

// Labels against a known polytope F; the projection is the l1-nearest point of F.
class PolytopeOracle : public FeasibilityOracle
{
    public:
        explicit PolytopeOracle(HPolytope F, double tol = 1e-9);

        int dim() const override { return F_.dim(); }
        double epsilon() const override { return 0.0; }
        LabelResult label(const Eigen::VectorXd& p, std::uint64_t draw) const override;

        Eigen::VectorXd project_l1(const Eigen::VectorXd& p) const;
        const HPolytope& polytope() const { return F_; }

    private:
        HPolytope F_;
        double tol_;
};

LabelResult label_from_results(const Eigen::VectorXd& p, const std::vector<DisaggResult>& results, double epsilon);

} // namespace ofd
