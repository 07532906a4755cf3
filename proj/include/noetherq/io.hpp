#pragma once

#include <string>

#include <json.hpp>

#include "noetherq/classical.hpp"

namespace noetherq::io {

// Insertion order is the canonical key order; every writer below constructs
// keys deterministically so emitted documents round-trip byte for byte.
using json = nlohmann::ordered_json;

// Complex numbers serialize as [re, im]; matrices as row-major nested
// arrays. Readers also accept bare reals where a complex entry is expected.
json to_json(const Mat& m);
json to_json(const RMat& m);
json to_json(const RVec& v);
Mat mat_from_json(const json& j);
RMat rmat_from_json(const json& j);
RVec rvec_from_json(const json& j);

json channel_to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const json& j);

json lindblad_to_json(const LindbladGenerator& g);
LindbladGenerator lindblad_from_json(const json& j);

json chain_to_json(const ClassicalChain& c);
ClassicalChain chain_from_json(const json& j);

// Accepts a bare channel, {"transpose": true} with a dim, a pipeline, or a
// weighted mixture of pipelines.
StochasticMapSpec map_spec_from_json(const json& j);

// Observable files: {"dim": d, "matrix": ...} quantum side,
// {"states": n, "values": [...]} classical side.
Mat observable_from_json(const json& j);

// Deterministic serialization: 2-space indentation, keys in stored order,
// doubles at 17 significant digits. Parsing the output and dumping it again
// reproduces the bytes exactly.
std::string canonical_dump(const json& j);

json load_file(const std::string& path);
void save_file(const std::string& path, const json& j);

}  // namespace noetherq::io
