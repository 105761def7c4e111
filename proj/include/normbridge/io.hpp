// SPDX-License-Identifier: MIT
#pragma once

#include "normbridge/bounds.hpp"
#include "normbridge/decomp.hpp"
#include "normbridge/growth.hpp"
#include "normbridge/weights.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>

namespace normbridge::io {

using Json = nlohmann::json;

/// Sorted keys, two-space indent, floats as %.17g, non-finite floats as the
/// strings "inf", "-inf", "nan". Identical values give identical bytes.
std::string dump_canonical(const Json& j);

/// Rational → "p/q" (or "p" for integers).
Json exact_value(const Rational& x);

/// Number or string ("1/3", "0.125", "2e-3") → exact rational. JSON floats go
/// through their shortest round-trip decimal text, so 0.1 means 1/10.
Rational rational_from_json(const Json& j);

/// {"kind": ..., "d": ..., params...}; see README for the per-kind fields.
WeightSpec weight_spec_from_json(const Json& j, unsigned& d);
WeightFamily weights_from_json(const Json& j);
WeightFamily load_weights(const std::filesystem::path& path);
Json weights_to_json(const WeightFamily& w);

Json profile_to_json(const UnivariateProfile& g);
UnivariateProfile profile_from_json(const Json& j);
Json tensor_to_json(const TensorFunction<double>& f);
TensorFunction<double> tensor_from_json(const Json& j);

Json embedding_to_json(const EmbeddingConstants& e, bool exact_mode);

/// Columns d,lower,upper,exact; exact is empty off the corners.
void write_growth_csv(std::ostream& os, const GrowthReport& report);
Json growth_to_json(const GrowthReport& report);

}  // namespace normbridge::io
