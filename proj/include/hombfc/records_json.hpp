#pragma once

#include <json.hpp>

#include "hombfc/comb_model.hpp"
#include "hombfc/estimation.hpp"
#include "hombfc/numerics.hpp"

namespace hombfc {

using Json = nlohmann::ordered_json;

Json to_json(const CombParams& params);
Json to_json(const Channel& channel);
Json to_json(const QuadSpec& spec);
Json to_json(const MeasurementRecord& record);
Json to_json(const SpectralRecord& record);
Json to_json(const EstimatorReport& report);

/// Inverse of to_json for the two record types. Throws std::invalid_argument
/// on missing fields or records that fail validation.
MeasurementRecord measurement_record_from_json(const Json& j);
SpectralRecord spectral_record_from_json(const Json& j);

/// Library version string.
const char* version();

}  // namespace hombfc
