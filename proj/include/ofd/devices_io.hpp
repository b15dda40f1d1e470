#pragma once

#include "ofd/devices.hpp"
#include "ofd/io.hpp"

namespace ofd
{

json to_json(const DeviceSpec& d);
DeviceSpec device_spec_from_json(const json& j);
json to_json(const Fleet& fleet);
Fleet fleet_from_json(const json& j);

json to_json(const Scenario& s);
Scenario scenario_from_json(const json& j);

json to_json(const HorizonConfig& h);
HorizonConfig horizon_from_json(const json& j);

} // namespace ofd
