#pragma once

#include <json.hpp>

#include "attack.hpp"
#include "layout.hpp"
#include "leakage.hpp"
#include "netlist.hpp"
#include "protect.hpp"

namespace splitsec {

using Json = nlohmann::ordered_json;

// {gates:[{id,name,kind,fanin}], edges:[{driver,sink,pin}], inputs:[...], outputs:[...]}
Json to_json(const NetlistGraph &graph);

// {technique, seed, partitions:[{id,label,members:[names sorted]}]}
Json to_json(const Partitioning &partitioning, const NetlistGraph &graph);
Partitioning partitioning_from_json(const Json &json, const NetlistGraph &graph);

// {die:[w,h], utilization, fences:[{partition,x0,y0,x1,y1}], pads:[{name,x,y}], assignment:[{name,partition}]}
Json to_json(const FencePlan &plan, const NetlistGraph &graph);
FencePlan fence_plan_from_json(const Json &json, const NetlistGraph &graph);

// {die:[w,h], utilization, seed, cells:[{name,x,y,partition}], fences:[...], pads:[...]}
Json to_json(const Placement &placement, const NetlistGraph &graph);
Placement placement_from_json(const Json &json, const NetlistGraph &graph);

Json to_json(const LeakageReport &report);

// {attack, correct, total, rate, wire_cost, edges:[{driver,sink,pin}], unresolved:[...]}
Json to_json(const AttackResult &result, const FeolView &view);

// Fixed-precision decimal for reports; identical bytes for identical doubles.
std::string format_number(double value);

} // namespace splitsec
