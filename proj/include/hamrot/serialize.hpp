#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hamrot/coeff_path.hpp"
#include "hamrot/hill_spectrum.hpp"
#include "hamrot/index_theory.hpp"
#include "hamrot/subharmonics.hpp"

namespace hamrot {

using Json = nlohmann::ordered_json;

Json to_json(const Interval& v);
Json to_json(const ClassLabel& v);
Json to_json(const MultiplierPair& v);
Json to_json(const WindingExtrema& v);
Json to_json(const IndexReport& v);
Json to_json(const IterationReport& v);
Json to_json(const SpectrumReport& v);
Json to_json(const MorseIndices& v);
Json to_json(const SubharmonicCandidate& v);
Json to_json(const KStarScan& v);
Json to_json(const TwistRadii& v);
// Orbit summary without the samples.
Json to_json(const OrbitResult& v);

// CoeffPath config {T, a: {cos: [...], sin: [...]}, b: {...}, c: {...}}.
// Coefficient n belongs to frequency 2 pi n / T. A bare number stands for a
// constant and {samples: [...]} for an equally spaced table over [0, T).
Json coeffpath_to_json(const CoeffPath& S);
// Unknown or missing keys raise InvalidArgument.
CoeffPath coeffpath_from_json(const Json& j);
CoeffPath load_coeffpath(const std::string& path);

}  // namespace hamrot
