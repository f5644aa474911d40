#pragma once

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "chronos/reach.hpp"
#include "chronos/system.hpp"
#include "chronos/timescale.hpp"
#include "chronos/tsexp.hpp"

namespace chronos::io {

using nlohmann::json;

json to_json(const TimeScale& ts);
TimeScale timescale_from_json(const json& j);

json to_json(const Mat& m);
Mat matrix_from_json(const json& j);
Vec vector_from_json(const json& j);
json vector_to_json(const Vec& v);
/// Infinite entries are written as the string "inf".
json to_json(const ExtMat& m);

json to_json(const LinearSystem& sys);
LinearSystem system_from_json(const json& j);

json to_json(const ControlSignal& u);
ControlSignal control_from_json(const json& j, const TimeScale& ts);

json to_json(const DeltaSet& set);
/// {"t0", "t1", "M": [1-based columns], "S": {"k": [[c, d], ...]}}
json to_json(const GramSpec& spec);
json to_json(const ExpPath<double>& path);
json to_json(const SynthesizedControl& c);
json to_json(const ReachReport& report);

/// "t,x1,...,xn" rows with 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

/// "1,3" -> {0, 2}
std::vector<Index> parse_columns(std::string_view text, Index inputs);
/// "k:[a,b)|[c,d);k2:[e,f)" with 1-based k.
GramSpec parse_spec(const LinearSystem& sys, double t0, double t1, std::string_view text);
/// "e2" -> unit vector, or "0.5,1" -> explicit vector.
Vec parse_target(std::string_view text, Index states);

json read_json_file(const std::string& path);

}  // namespace chronos::io
