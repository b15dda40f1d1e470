#include "ofd/devices.hpp"
#include "ofd/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace ofd
{

namespace
{

double truncated_normal(std::mt19937_64& rng, double mean, double sd, double lo, double hi)
{
    std::normal_distribution<double> n(mean, sd);
    for (;;)
    {
        const double v = n(rng);
        if (v >= lo && v <= hi)
            return v;
    }
}

double wall_clock_hour(const HorizonConfig& h, int tau)
{
    // midpoint of quarter-hour tau (1-based)
    return h.start_hour + (tau - 0.5) * kQuarterHour;
}

// horizon-relative quarter-hour index of a wall-clock time, grid-rounded
int quarter_index(const HorizonConfig& h, double hour)
{
    return static_cast<int>(std::lround(hour * 4.0)) - 4 * h.start_hour + 1;
}

struct EvWindow
{
    int first = 0;       // first available quarter-hour inside the horizon
    int last = -1;       // last available quarter-hour inside the horizon
    bool deadline = false;
};

EvWindow ev_window(const DeviceExternality& ext, int N)
{
    EvWindow w;
    w.first = std::max(ext.arrival, 1);
    w.last = std::min(ext.departure - 1, N);
    w.deadline = ext.departure <= N + 1 && w.last >= w.first;
    return w;
}

bool ev_reachable(const DeviceSpec& spec, const DeviceExternality& ext, int N)
{
    const EvWindow w = ev_window(ext, N);
    if (!w.deadline)
        return true;
    const double gain = kQuarterHour * kChargeEfficiency * spec.p_cap * (w.last - w.first + 1);
    return ext.soc_required - ext.soc_arrival <= gain;
}

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw std::invalid_argument(what);
}

} // namespace

const char* to_string(DeviceKind kind)
{
    switch (kind)
    {
        case DeviceKind::PV: return "PV";
        case DeviceKind::Battery: return "Battery";
        case DeviceKind::EV: return "EV";
        case DeviceKind::TCL: return "TCL";
    }
    return "?";
}

DeviceKind device_kind_from_string(const std::string& name)
{
    for (DeviceKind k : {DeviceKind::PV, DeviceKind::Battery, DeviceKind::EV, DeviceKind::TCL})
        if (name == to_string(k))
            return k;
    throw std::invalid_argument("unknown device kind '" + name + "'");
}

void DeviceSpec::validate() const
{
    switch (kind)
    {
        case DeviceKind::PV:
            require(p_cap > 0.0, "PV: p_cap must be positive");
            break;
        case DeviceKind::Battery:
        case DeviceKind::EV:
            require(p_cap > 0.0 && s_cap > 0.0, std::string(to_string(kind)) + ": capacities must be positive");
            break;
        case DeviceKind::TCL:
            require(C > 0.0 && P > 0.0 && R > 0.0 && p_on > 0.0, "TCL: parameters must be positive");
            break;
    }
}

Fleet generate_fleet(const FleetCounts& counts, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto pick = [&](const std::vector<double>& options) {
        return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    };

    Fleet fleet;
    for (int i = 0; i < counts.pv; ++i)
        fleet.push_back({DeviceKind::PV, uniform(2.0, 8.0)});
    for (int i = 0; i < counts.battery; ++i)
    {
        DeviceSpec d{DeviceKind::Battery, uniform(3.0, 7.0)};
        d.s_cap = d.p_cap * uniform(2.0, 4.0);
        fleet.push_back(d);
    }
    for (int i = 0; i < counts.ev; ++i)
    {
        DeviceSpec d{DeviceKind::EV, pick(kEvPowerOptions)};
        d.s_cap = pick(kEvCapacityOptions);
        fleet.push_back(d);
    }
    for (int i = 0; i < counts.tcl; ++i)
    {
        DeviceSpec d{DeviceKind::TCL};
        d.C = uniform(1.5, 2.5);
        d.P = uniform(3.0, 5.0);
        d.R = uniform(15.0, 30.0);
        d.setpoint = uniform(24.0, 26.0);
        d.p_on = uniform(2.0, 6.0);
        fleet.push_back(d);
    }
    return fleet;
}

void Scenario::validate(const Fleet& fleet, const HorizonConfig& h) const
{
    if (devices.size() != fleet.size())
        throw KindMismatch("scenario has " + std::to_string(devices.size()) + " devices, fleet has " +
            std::to_string(fleet.size()));
    const int N = h.quarter_hours();
    for (std::size_t d = 0; d < fleet.size(); ++d)
    {
        const DeviceExternality& e = devices[d];
        if (e.kind != fleet[d].kind)
            throw KindMismatch("device " + std::to_string(d) + ": scenario kind does not match fleet");
        switch (e.kind)
        {
            case DeviceKind::PV:
                if (e.irradiance.size() != N)
                    throw LengthMismatch("PV irradiance must have 4T entries");
                require((e.irradiance.array() >= 0.0).all(), "PV irradiance must be nonnegative");
                break;
            case DeviceKind::Battery:
                require(e.s0 >= 0.0 && e.s0 <= fleet[d].s_cap, "battery s0 outside [0, s_cap]");
                break;
            case DeviceKind::EV:
                require(e.arrival < e.departure, "EV arrival must precede departure");
                require(e.soc_arrival >= 0.0 && e.soc_arrival <= e.soc_required &&
                        e.soc_required <= fleet[d].s_cap,
                    "EV SoC values out of order");
                break;
            case DeviceKind::TCL:
                if (e.ambient.size() != N)
                    throw LengthMismatch("TCL ambient profile must have 4T entries");
                break;
        }
    }
}

BaseProfiles synthetic_profiles(const HorizonConfig& h)
{
    h.validate();
    const int N = h.quarter_hours();
    BaseProfiles base;
    base.irradiance.resize(N);
    base.ambient.resize(N);
    for (int tau = 1; tau <= N; ++tau)
    {
        const double hour = std::fmod(wall_clock_hour(h, tau), 24.0);
        base.irradiance[tau - 1] = (hour > 6.0 && hour < 18.0) ? std::sin(std::numbers::pi * (hour - 6.0) / 12.0) : 0.0;
        base.ambient[tau - 1] = 28.5 + 6.5 * std::cos(2.0 * std::numbers::pi * (hour - 15.0) / 24.0);
    }
    return base;
}

Eigen::VectorXd average_to_quarter_hours(const Eigen::VectorXd& minutes)
{
    if (minutes.size() % 15 != 0)
        throw LengthMismatch("1-min profile length must be a multiple of 15");
    Eigen::VectorXd out(minutes.size() / 15);
    for (Eigen::Index q = 0; q < out.size(); ++q)
        out[q] = minutes.segment(15 * q, 15).mean();
    return out;
}

Eigen::VectorXd ingest_profile(const std::filesystem::path& path, const HorizonConfig& h, ProfileKind kind)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open profile " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ": empty file");
    line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
    if (line != "tau,value")
        throw ParseError(path.string() + ": expected header 'tau,value'");

    std::vector<double> values;
    int lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": missing comma");
        try
        {
            std::size_t used = 0;
            const std::string field = line.substr(comma + 1);
            values.push_back(std::stod(field, &used));
        }
        catch (const std::exception&)
        {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad number");
        }
    }

    const int N = h.quarter_hours();
    Eigen::VectorXd raw = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    Eigen::VectorXd profile;
    if (raw.size() == N)
        profile = raw;
    else if (raw.size() == 15 * N)
        profile = average_to_quarter_hours(raw);
    else
        throw LengthMismatch(path.string() + ": expected " + std::to_string(N) + " or " + std::to_string(15 * N) +
            " rows, found " + std::to_string(raw.size()));

    if (kind == ProfileKind::Irradiance)
        return profile.cwiseMax(0.0).cwiseMin(1.0);
    return profile.cwiseMax(-30.0).cwiseMin(55.0);
}

Scenario sample_scenario(const Fleet& fleet, const HorizonConfig& h, const BaseProfiles& base, std::uint64_t seed,
    const SamplingOptions& options)
{
    if (fleet.empty())
        throw EmptyFleet("cannot sample a scenario for an empty fleet");
    h.validate();
    const int N = h.quarter_hours();
    if (base.irradiance.size() != N || base.ambient.size() != N)
        throw LengthMismatch("base profiles must have 4T entries");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    Scenario s;
    s.seed = seed;
    s.devices.reserve(fleet.size());
    for (const DeviceSpec& spec : fleet)
    {
        spec.validate();
        DeviceExternality e;
        e.kind = spec.kind;
        switch (spec.kind)
        {
            case DeviceKind::PV:
                e.irradiance.resize(N);
                for (int k = 0; k < N; ++k)
                    e.irradiance[k] = base.irradiance[k] * std::clamp(1.0 + 0.05 * n01(rng), 0.9, 1.1);
                break;
            case DeviceKind::Battery:
                e.s0 = uniform(0.0, spec.s_cap);
                break;
            case DeviceKind::EV:
            {
                int tries = 0;
                do
                {
                    if (++tries > options.ev_max_resamples)
                        throw InfeasibleScenario("EV demand unreachable after " +
                            std::to_string(options.ev_max_resamples) + " resamples");
                    e.arrival = quarter_index(h, truncated_normal(rng, 9.5, 0.5, 9.0, 10.0));
                    e.departure = quarter_index(h, truncated_normal(rng, 16.5, 0.5, 16.0, 17.0));
                    e.soc_arrival = spec.s_cap * uniform(0.1, 0.5);
                    e.soc_required = uniform(e.soc_arrival, spec.s_cap);
                } while (!ev_reachable(spec, e, N));
                break;
            }
            case DeviceKind::TCL:
            {
                const double offset = n01(rng);
                e.ambient.resize(N);
                for (int k = 0; k < N; ++k)
                    e.ambient[k] = base.ambient[k] + offset + 0.25 * n01(rng);
                break;
            }
        }
        s.devices.push_back(std::move(e));
    }
    return s;
}

Scenario mean_scenario(const Fleet& fleet, const HorizonConfig& h, const BaseProfiles& base)
{
    if (fleet.empty())
        throw EmptyFleet("cannot build a scenario for an empty fleet");
    // truncated N(m, .) on [m - 0.5, m + 0.5] has mean m
    Scenario s;
    for (const DeviceSpec& spec : fleet)
    {
        DeviceExternality e;
        e.kind = spec.kind;
        switch (spec.kind)
        {
            case DeviceKind::PV:
                e.irradiance = base.irradiance;
                break;
            case DeviceKind::Battery:
                e.s0 = 0.5 * spec.s_cap;
                break;
            case DeviceKind::EV:
                e.arrival = quarter_index(h, 9.5);
                e.departure = quarter_index(h, 16.5);
                e.soc_arrival = 0.3 * spec.s_cap;
                e.soc_required = 0.5 * (e.soc_arrival + spec.s_cap);
                if (!ev_reachable(spec, e, h.quarter_hours()))
                    e.soc_required = e.soc_arrival;
                break;
            case DeviceKind::TCL:
                e.ambient = base.ambient;
                break;
        }
        s.devices.push_back(std::move(e));
    }
    return s;
}

int ModelFragment::add_var(std::string name, double lo, double hi, bool binary)
{
    names.push_back(std::move(name));
    lower.push_back(lo);
    upper.push_back(hi);
    const int index = static_cast<int>(lower.size()) - 1;
    if (binary)
        binaries.push_back(index);
    return index;
}

opt::MilpProgram ModelFragment::to_milp() const
{
    const int n = num_vars();
    opt::MilpProgram m;
    m.base.objective = Eigen::VectorXd::Zero(n);
    m.base.lower = Eigen::Map<const Eigen::VectorXd>(lower.data(), n);
    m.base.upper = Eigen::Map<const Eigen::VectorXd>(upper.data(), n);
    m.base.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), n);
    m.base.rhs.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        for (const Term& t : rows[i].terms)
            m.base.A(static_cast<Eigen::Index>(i), t.var) += t.coef;
        m.base.senses.push_back(rows[i].sense);
        m.base.rhs[static_cast<Eigen::Index>(i)] = rows[i].rhs;
    }
    m.binary_indices = binaries;
    return m;
}

ModelFragment device_constraints(const DeviceSpec& spec, const DeviceExternality& ext, const HorizonConfig& h)
{
    if (spec.kind != ext.kind)
        throw KindMismatch(std::string("device is ") + to_string(spec.kind) + " but externality is " +
            to_string(ext.kind));
    spec.validate();
    const int N = h.quarter_hours();
    ModelFragment f;
    f.load.resize(N);
    f.charge.assign(N, -1);
    f.discharge.assign(N, -1);
    f.mode.assign(N, -1);
    auto tag = [](const char* base, int tau) { return std::string(base) + "[" + std::to_string(tau) + "]"; };

    switch (spec.kind)
    {
        case DeviceKind::PV:
        {
            if (ext.irradiance.size() != N)
                throw LengthMismatch("PV irradiance must have 4T entries");
            for (int tau = 1; tau <= N; ++tau)
            {
                const int l = f.add_var(tag("l", tau), -ext.irradiance[tau - 1] * spec.p_cap, 0.0);
                f.load[tau - 1] = {{l, 1.0}};
            }
            break;
        }
        case DeviceKind::Battery:
        case DeviceKind::EV:
        {
            const bool ev = spec.kind == DeviceKind::EV;
            const EvWindow w = ev ? ev_window(ext, N) : EvWindow{1, N, false};
            const double start_soc = ev ? ext.soc_arrival : ext.s0;
            int prev_soc = -1;
            for (int tau = 1; tau <= N; ++tau)
            {
                const bool available = tau >= w.first && tau <= w.last;
                const double cap = available ? spec.p_cap : 0.0;
                const int plus = f.add_var(tag("l+", tau), 0.0, cap);
                const int minus = f.add_var(tag("l-", tau), 0.0, cap);
                const int b = f.add_var(tag("b", tau), 0.0, available ? 1.0 : 0.0, available);
                f.charge[tau - 1] = plus;
                f.discharge[tau - 1] = minus;
                f.mode[tau - 1] = b;
                f.load[tau - 1] = {{plus, 1.0}, {minus, -1.0}};
                if (!available)
                    continue;

                f.rows.push_back({{{plus, 1.0}, {b, -spec.p_cap}}, opt::Sense::LessEqual, 0.0});
                f.rows.push_back({{{minus, 1.0}, {b, spec.p_cap}}, opt::Sense::LessEqual, spec.p_cap});

                double soc_lo = 0.0;
                if (ev && w.deadline && tau == w.last)
                    soc_lo = ext.soc_required;
                const int s = f.add_var(tag("s", tau), soc_lo, spec.s_cap);
                // s_tau - s_{tau-1} - 1/4 (0.9 l+ - 1.1 l-) = 0
                FragmentRow rec{{{s, 1.0}, {plus, -kQuarterHour * kChargeEfficiency},
                                    {minus, kQuarterHour * kDischargeFactor}},
                    opt::Sense::Equal, 0.0};
                if (prev_soc >= 0)
                    rec.terms.push_back({prev_soc, -1.0});
                else
                    rec.rhs = start_soc;
                f.rows.push_back(std::move(rec));
                prev_soc = s;
            }
            break;
        }
        case DeviceKind::TCL:
        {
            if (ext.ambient.size() != N)
                throw LengthMismatch("TCL ambient profile must have 4T entries");
            const double gain = 1.0 / (4.0 * spec.C);
            int prev_theta = -1;
            for (int tau = 1; tau <= N; ++tau)
            {
                const int l = f.add_var(tag("l", tau), 0.0, spec.p_on);
                const int b = f.add_var(tag("b", tau), 0.0, 1.0, true);
                f.mode[tau - 1] = b;
                f.load[tau - 1] = {{l, 1.0}};
                f.rows.push_back({{{l, 1.0}, {b, -spec.p_on}}, opt::Sense::LessEqual, 0.0});

                // theta_{tau+1} - theta_tau + P l / (4C) = theta^a / (4CR); theta_1 = setpoint
                const int theta = f.add_var(tag("theta", tau + 1), spec.setpoint - kTclBand, spec.setpoint + kTclBand);
                FragmentRow rec{{{theta, 1.0}, {l, gain * spec.P}}, opt::Sense::Equal,
                    gain * ext.ambient[tau - 1] / spec.R};
                if (prev_theta >= 0)
                    rec.terms.push_back({prev_theta, -1.0});
                else
                    rec.rhs += spec.setpoint;
                f.rows.push_back(std::move(rec));
                prev_theta = theta;
            }
            break;
        }
    }
    return f;
}

Eigen::VectorXd hourly_from_quarter_hours(const Eigen::VectorXd& loads)
{
    if (loads.size() % 4 != 0)
        throw LengthMismatch("quarter-hour series length must be a multiple of 4");
    Eigen::VectorXd p(loads.size() / 4);
    for (Eigen::Index t = 0; t < p.size(); ++t)
        p[t] = kQuarterHour * (loads[4 * t] + loads[4 * t + 1] + loads[4 * t + 2] + loads[4 * t + 3]);
    return p;
}

Eigen::VectorXd DeviceSchedule::hourly() const
{
    return hourly_from_quarter_hours(loads);
}

DeviceSchedule extract_schedule(const ModelFragment& f, const Eigen::VectorXd& x)
{
    const auto N = static_cast<Eigen::Index>(f.load.size());
    DeviceSchedule s;
    s.loads = Eigen::VectorXd::Zero(N);
    bool storage = false, modal = false;
    for (Eigen::Index k = 0; k < N; ++k)
    {
        for (const Term& t : f.load[k])
            s.loads[k] += t.coef * x[t.var];
        storage = storage || f.charge[k] >= 0;
        modal = modal || f.mode[k] >= 0;
    }
    if (storage)
    {
        s.charge.resize(N);
        s.discharge.resize(N);
        for (Eigen::Index k = 0; k < N; ++k)
        {
            s.charge[k] = x[f.charge[k]];
            s.discharge[k] = x[f.discharge[k]];
        }
    }
    if (modal)
    {
        s.binaries.resize(N);
        for (Eigen::Index k = 0; k < N; ++k)
            s.binaries[k] = std::round(x[f.mode[k]]);
    }
    return s;
}

bool check_schedule(const DeviceSpec& spec, const DeviceExternality& ext, const HorizonConfig& h,
    const DeviceSchedule& sch, double tol, std::string* why)
{
    auto fail = [&](const std::string& msg) {
        if (why)
            *why = std::string(to_string(spec.kind)) + ": " + msg;
        return false;
    };
    const int N = h.quarter_hours();
    if (sch.loads.size() != N)
        return fail("schedule length");

    switch (spec.kind)
    {
        case DeviceKind::PV:
            for (int k = 0; k < N; ++k)
                if (sch.loads[k] > tol || sch.loads[k] < -ext.irradiance[k] * spec.p_cap - tol)
                    return fail("load outside [-r p_cap, 0] at tau " + std::to_string(k + 1));
            return true;
        case DeviceKind::Battery:
        case DeviceKind::EV:
        {
            if (sch.charge.size() != N || sch.discharge.size() != N || sch.binaries.size() != N)
                return fail("missing charge/discharge/mode series");
            const bool ev = spec.kind == DeviceKind::EV;
            const EvWindow w = ev ? ev_window(ext, N) : EvWindow{1, N, false};
            double soc = ev ? ext.soc_arrival : ext.s0;
            for (int k = 0; k < N; ++k)
            {
                const int tau = k + 1;
                const double plus = sch.charge[k], minus = sch.discharge[k], b = sch.binaries[k];
                if (std::abs(sch.loads[k] - (plus - minus)) > tol)
                    return fail("load differs from l+ - l-");
                if (b != 0.0 && b != 1.0)
                    return fail("mode not binary");
                if (plus < -tol || minus < -tol || plus > b * spec.p_cap + tol || minus > (1.0 - b) * spec.p_cap + tol)
                    return fail("charge/discharge limits at tau " + std::to_string(tau));
                const bool available = tau >= w.first && tau <= w.last;
                if (!available)
                {
                    if (std::abs(plus) > tol || std::abs(minus) > tol)
                        return fail("EV draws power while away at tau " + std::to_string(tau));
                    continue;
                }
                soc += kQuarterHour * (kChargeEfficiency * plus - kDischargeFactor * minus);
                const double stol = tol * (1.0 + tau);
                if (soc < -stol || soc > spec.s_cap + stol)
                    return fail("SoC out of range at tau " + std::to_string(tau));
                if (ev && w.deadline && tau == w.last && soc < ext.soc_required - stol)
                    return fail("EV departs below required SoC");
            }
            return true;
        }
        case DeviceKind::TCL:
        {
            double theta = spec.setpoint;
            for (int k = 0; k < N; ++k)
            {
                const double l = sch.loads[k];
                const double b = sch.binaries.size() == N ? sch.binaries[k] : 1.0;
                if (l < -tol || l > b * spec.p_on + tol)
                    return fail("load outside [0, b p_on] at tau " + std::to_string(k + 1));
                theta -= (spec.P * l - ext.ambient[k] / spec.R) / (4.0 * spec.C);
                const double ttol = tol * (1.0 + k);
                if (theta < spec.setpoint - kTclBand - ttol || theta > spec.setpoint + kTclBand + ttol)
                    return fail("temperature leaves the comfort band at tau " + std::to_string(k + 2));
            }
            return true;
        }
    }
    return true;
}

} // namespace ofd
