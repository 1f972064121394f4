#pragma once

#include <json.hpp>

#include "chandiv/channel.hpp"
#include "chandiv/lindblad.hpp"

namespace chandiv {

using json = nlohmann::json;

/// x rounded to 12 significant digits; non-finite values become null.
json num(double x);

json cmatrix_to_json(const CMatrix& m);
json rmatrix_to_json(const RMatrix& m);
CMatrix cmatrix_from_json(const json& j, const char* what);
RMatrix rmatrix_from_json(const json& j, const char* what);

/// { "dim", "representation", "data" }
json channel_to_json(const ChannelRep& c, Representation r);
json channel_to_json(const ChannelRep& c);

/// Accepts the channel-spec form above, or { "name": ..., "params": {...} }
/// for the named constructors. Throws InvalidArgument / DimensionError on
/// shape problems. No CP/TP checks.
ChannelRep channel_from_json(const json& j);

/// { "dim", "hamiltonian", "kossakowski", "basis": "gellmann" }
json generator_to_json(const LindbladGenerator& g);
LindbladGenerator generator_from_json(const json& j, const Tolerances& tol = {});

}  // namespace chandiv
