#pragma once

#include <string>

#include "json.hpp"
#include "maj/classical.hpp"
#include "maj/locc.hpp"
#include "maj/quantum.hpp"
#include "maj/stepfn.hpp"

namespace maj::io {

using nlohmann::json;

// All *_from_json readers throw InputError with a field-level message on
// malformed input; nothing here touches the filesystem except load/save.

json load_json(const std::string& path);
void save_text(const std::string& path, const std::string& text);

std::string format_g17(double x);  // shortest-exact decimal via %.17g

cxd entry_from_json(const json& j);
json entry_to_json(const cxd& z);
Eigen::MatrixXcd matrix_from_json(const json& j);
json matrix_to_json(const Eigen::MatrixXcd& m);

StepFunction scale_from_json(const json& j);
json scale_to_json(const StepFunction& s);

WeightedVector weighted_from_json(const json& j);
json weighted_to_json(const WeightedVector& w);

StochasticMap map_from_json(const json& j);
json map_to_json(const StochasticMap& m);

FactorModel factor_from_json(const json& j);
json factor_to_json(const FactorModel& f);

Density density_from_json(const json& j);
json density_to_json(const Density& d);

BipartitePureState state_from_json(const json& j);
json state_to_json(const BipartitePureState& psi);

LoccProtocol protocol_from_json(const json& j);
json protocol_to_json(const LoccProtocol& p);
json channel_to_json(const KrausChannel& c);
json lorenz_to_json(const LorenzCurve& c);

// What kind of object a JSON value describes, by its fields.
enum class Payload { Scale, Weighted, Map, DensityLike, State, Protocol, Unknown };
Payload detect(const json& j);

// Any payload that carries a distribution, reduced to its scale.
StepFunction any_scale_from_json(const json& j);

}  // namespace maj::io
