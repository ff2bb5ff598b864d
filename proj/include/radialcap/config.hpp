#pragma once

#include "radialcap/constellation.hpp"
#include "radialcap/criteria.hpp"

#include "json.hpp"

#include <string>
#include <string_view>

namespace radialcap {

/// Parses the constellation file format: a JSON object with exactly the
/// fields n, m (integers), w, g, lambda, h (expression strings) and
/// tangency ("lower" | "upper"). g may be omitted for upper tangency.
/// Unknown fields are rejected. Throws ConfigError listing every bad field.
Constellation constellation_from_json(std::string_view text);
Constellation load_constellation(const std::string& path);
nlohmann::json to_json(const Constellation& c);

/// True for g = 1, lambda = h = 0 (numerically, on a probe grid).
bool is_self_constellation(const Constellation& c);

nlohmann::json to_json(const BalanceProfile& prof);
nlohmann::json to_json(const TailClass& tail);
/// Evidence block of a verdict (everything except the headline outcome).
nlohmann::json evidence_json(const Verdict& v);

} // namespace radialcap
