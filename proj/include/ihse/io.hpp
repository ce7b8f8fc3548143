#pragma once

#include <string>

#include "json.hpp"

#include "ihse/collision.hpp"
#include "ihse/core.hpp"
#include "ihse/jacobian_lab.hpp"
#include "ihse/measure_mc.hpp"
#include "ihse/scattering.hpp"
#include "ihse/simulator.hpp"
#include "ihse/tct.hpp"

namespace ihse {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "ihse/1";

/// Shortest decimal that reads back to the same double; "inf", "-inf" and
/// "nan" for non-finite values. Used for both JSON and CSV output.
std::string format_double(double x);

/// JSON number for finite values, the format_double string otherwise.
Json number(double x);
/// Accepts a JSON number or one of the strings "inf", "-inf", "nan".
double read_number(const Json& j);

Json to_json(const Vec& v);
Vec vec_from_json(const Json& j);

/// Pairs are written 1-based, as [i, j].
Json to_json(PairIndex p);
PairIndex pair_from_json(const Json& j);

/// {"d": 2, "particles": [{"x": [...], "v": [...]}, ...]}
Json to_json(const Configuration& cfg);
Configuration configuration_from_json(const Json& j);
Configuration read_configuration(const std::string& path);

Json to_json(const ModelParams& p);
Json to_json(const Tolerances& t);
Json to_json(const DomainStatus& s);
Json to_json(const CollisionPrediction& p);
Json to_json(const ScatteringOutcome& o);
Json to_json(const TctDomainClass& c);
Json to_json(const TctResult& r);
Json to_json(const FlowJacobianDet& f);
Json to_json(const JacobianReport& r);
Json to_json(const ScatteringCheck& c);
Json to_json(const SimEvent& e);
Json to_json(const SimReport& r);
Json to_json(const BoundCheck& b);
Json to_json(const PathologicalSetSpec& s);
Json to_json(const MeasureEstimate& m);
Json to_json(const VolumeEvolution& v);

}  // namespace ihse
