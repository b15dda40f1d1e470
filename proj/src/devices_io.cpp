#include "ofd/devices_io.hpp"

namespace ofd
{

json to_json(const DeviceSpec& d)
{
    json j;
    j["kind"] = to_string(d.kind);
    switch (d.kind)
    {
        case DeviceKind::PV:
            j["p_cap"] = d.p_cap;
            break;
        case DeviceKind::Battery:
        case DeviceKind::EV:
            j["p_cap"] = d.p_cap;
            j["s_cap"] = d.s_cap;
            break;
        case DeviceKind::TCL:
            j["C"] = d.C;
            j["P"] = d.P;
            j["R"] = d.R;
            j["setpoint"] = d.setpoint;
            j["p_on"] = d.p_on;
            break;
    }
    return j;
}

DeviceSpec device_spec_from_json(const json& j)
{
    try
    {
        DeviceSpec d;
        d.kind = device_kind_from_string(j.at("kind").get<std::string>());
        d.p_cap = j.value("p_cap", 0.0);
        d.s_cap = j.value("s_cap", 0.0);
        d.C = j.value("C", 0.0);
        d.P = j.value("P", 0.0);
        d.R = j.value("R", 0.0);
        d.setpoint = j.value("setpoint", 0.0);
        d.p_on = j.value("p_on", 0.0);
        d.validate();
        return d;
    }
    catch (const json::exception& e)
    {
        throw ParseError(std::string("device spec: ") + e.what());
    }
}

json to_json(const Fleet& fleet)
{
    json out = json::array();
    for (const auto& d : fleet)
        out.push_back(to_json(d));
    return out;
}

Fleet fleet_from_json(const json& j)
{
    if (!j.is_array())
        throw ParseError("fleet: expected an array of device records");
    Fleet fleet;
    for (const auto& d : j)
        fleet.push_back(device_spec_from_json(d));
    return fleet;
}

json to_json(const Scenario& s)
{
    json devices = json::array();
    for (const auto& e : s.devices)
    {
        json d;
        d["kind"] = to_string(e.kind);
        switch (e.kind)
        {
            case DeviceKind::PV:
                d["irradiance"] = to_json(e.irradiance);
                break;
            case DeviceKind::Battery:
                d["s0"] = e.s0;
                break;
            case DeviceKind::EV:
                d["arrival"] = e.arrival;
                d["departure"] = e.departure;
                d["soc_arrival"] = e.soc_arrival;
                d["soc_required"] = e.soc_required;
                break;
            case DeviceKind::TCL:
                d["ambient"] = to_json(e.ambient);
                break;
        }
        devices.push_back(std::move(d));
    }
    return json{{"seed", s.seed}, {"devices", std::move(devices)}};
}

Scenario scenario_from_json(const json& j)
{
    try
    {
        Scenario s;
        s.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& d : j.at("devices"))
        {
            DeviceExternality e;
            e.kind = device_kind_from_string(d.at("kind").get<std::string>());
            if (d.contains("irradiance"))
                e.irradiance = vector_from_json(d.at("irradiance"));
            e.s0 = d.value("s0", 0.0);
            e.arrival = d.value("arrival", 0);
            e.departure = d.value("departure", 0);
            e.soc_arrival = d.value("soc_arrival", 0.0);
            e.soc_required = d.value("soc_required", 0.0);
            if (d.contains("ambient"))
                e.ambient = vector_from_json(d.at("ambient"));
            s.devices.push_back(std::move(e));
        }
        return s;
    }
    catch (const json::exception& e)
    {
        throw ParseError(std::string("scenario: ") + e.what());
    }
}

json to_json(const HorizonConfig& h)
{
    return json{{"T", h.T}, {"delta_hours", h.delta_hours}, {"start_hour", h.start_hour}};
}

HorizonConfig horizon_from_json(const json& j)
{
    try
    {
        HorizonConfig h;
        h.T = j.at("T").get<int>();
        h.delta_hours = j.value("delta_hours", 1.0);
        h.start_hour = j.value("start_hour", 0);
        h.validate();
        return h;
    }
    catch (const json::exception& e)
    {
        throw ParseError(std::string("horizon: ") + e.what());
    }
}

} // namespace ofd
