#pragma once

#include "ofd/market_model.hpp"
#include "ofd/milp.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofd
{

class EmptyFleet : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

class KindMismatch : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

class LengthMismatch : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

class InfeasibleScenario : public std::runtime_error
{
    public:
        using std::runtime_error::runtime_error;
};

enum class DeviceKind : char
{
    PV,
    Battery,
    EV,
    TCL
};

const char* to_string(DeviceKind kind);
DeviceKind device_kind_from_string(const std::string& name);

inline constexpr double kChargeEfficiency = 0.9;
inline constexpr double kDischargeFactor = 1.1;
inline constexpr double kQuarterHour = 0.25;
inline constexpr double kTclBand = 0.5;

// Parameters are flat; only the ones belonging to `kind` are meaningful.
struct DeviceSpec
{
    DeviceKind kind = DeviceKind::PV;
    double p_cap = 0.0;     // PV, Battery, EV (kW)
    double s_cap = 0.0;     // Battery, EV (kWh)
    double C = 0.0;         // TCL thermal capacitance (kWh/degC)
    double P = 0.0;         // TCL cooling coefficient
    double R = 0.0;         // TCL thermal resistance (degC/kW)
    double setpoint = 0.0;  // TCL (degC)
    double p_on = 0.0;      // TCL (kW)

    void validate() const;
};

using Fleet = std::vector<DeviceSpec>;

inline const std::vector<double> kEvPowerOptions{11.0, 16.5, 18.0, 19.2, 20.0, 21.1, 22.0};
inline const std::vector<double> kEvCapacityOptions{42.0, 60.0, 70.0, 75.0, 85.0, 90.0, 100.0};

struct FleetCounts
{
    int pv = 0;
    int battery = 0;
    int ev = 0;
    int tcl = 0;
};

Fleet generate_fleet(const FleetCounts& counts, std::uint64_t seed);

// One device's share of a scenario. Quarter-hour indices are 1-based and
// relative to the horizon start; EV times may fall outside [1, 4T+1].
struct DeviceExternality
{
    DeviceKind kind = DeviceKind::PV;
    Eigen::VectorXd irradiance;     // PV, 4T
    double s0 = 0.0;                // Battery
    int arrival = 0;                // EV
    int departure = 0;              // EV, first quarter-hour the car is gone
    double soc_arrival = 0.0;       // EV
    double soc_required = 0.0;      // EV
    Eigen::VectorXd ambient;        // TCL, 4T
};

struct Scenario
{
    std::vector<DeviceExternality> devices;
    std::uint64_t seed = 0;

    void validate(const Fleet& fleet, const HorizonConfig& h) const;
};

struct BaseProfiles
{
    Eigen::VectorXd irradiance;     // 4T, in [0, 1]
    Eigen::VectorXd ambient;        // 4T, degC
};

// clear-sky half-sine between 6:00 and 18:00 and a 22..35 degC daily sinusoid
BaseProfiles synthetic_profiles(const HorizonConfig& h);

enum class ProfileKind : char
{
    Irradiance,
    Ambient
};

// CSV with header `tau,value`; 4T rows at 15-min resolution or 60T rows at
// 1-min resolution (averaged over blocks of 15). Values are clamped to the
// physical range of the profile kind.
Eigen::VectorXd ingest_profile(const std::filesystem::path& path, const HorizonConfig& h, ProfileKind kind);

// Averages 15 consecutive samples into each quarter-hour.
Eigen::VectorXd average_to_quarter_hours(const Eigen::VectorXd& minutes);

struct SamplingOptions
{
    int ev_max_resamples = 100;
};

Scenario sample_scenario(const Fleet& fleet, const HorizonConfig& h, const BaseProfiles& base,
    std::uint64_t seed, const SamplingOptions& options = {});

// externalities replaced by their distribution means
Scenario mean_scenario(const Fleet& fleet, const HorizonConfig& h, const BaseProfiles& base);

// Linear term of a fragment row or load expression (local variable index).
struct Term
{
    int var = 0;
    double coef = 0.0;
};

struct FragmentRow
{
    std::vector<Term> terms;
    opt::Sense sense = opt::Sense::LessEqual;
    double rhs = 0.0;
};

// A device's variables and constraints, ready to be stacked into a joint program.
struct ModelFragment
{
    std::vector<std::string> names;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<int> binaries;
    std::vector<FragmentRow> rows;
    std::vector<std::vector<Term>> load;   // quarter-hour load, one expression per tau
    std::vector<int> charge;               // per tau; -1 when absent
    std::vector<int> discharge;
    std::vector<int> mode;

    int add_var(std::string name, double lo, double hi, bool binary = false);
    int num_vars() const { return static_cast<int>(lower.size()); }

    // standalone program with a zero objective
    opt::MilpProgram to_milp() const;
};

ModelFragment device_constraints(const DeviceSpec& spec, const DeviceExternality& ext, const HorizonConfig& h);

struct DeviceSchedule
{
    Eigen::VectorXd loads;       // 4T
    Eigen::VectorXd charge;      // 4T, batteries and EVs
    Eigen::VectorXd discharge;
    Eigen::VectorXd binaries;    // 4T where the device has a mode binary

    Eigen::VectorXd hourly() const;
};

Eigen::VectorXd hourly_from_quarter_hours(const Eigen::VectorXd& loads);

DeviceSchedule extract_schedule(const ModelFragment& fragment, const Eigen::VectorXd& local_solution);

// Re-derives the device physics from the schedule alone (no solver involved).
bool check_schedule(const DeviceSpec& spec, const DeviceExternality& ext, const HorizonConfig& h,
    const DeviceSchedule& schedule, double tol, std::string* why = nullptr);

} // namespace ofd
