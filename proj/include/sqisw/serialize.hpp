#pragma once

#include <string>

#include <json.hpp>

#include "sqisw/linalg.hpp"
#include "sqisw/measurement.hpp"
#include "sqisw/tomography.hpp"

namespace sqisw {

// Matrix wire format: {"dim": N, "basis": "...", "re": [[...]], "im": [[...]]}
// with row-major nested arrays. Round trips are bit exact.
nlohmann::json matrix_to_json(const CMat& m, const std::string& basis);

struct LabelledMatrix {
    CMat mat;
    std::string basis;
};

LabelledMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json chi_to_json(const ChiMatrix& chi);
ChiMatrix chi_from_json(const nlohmann::json& j);

nlohmann::json density_to_json(const CMat& rho);
CMat density_from_json(const nlohmann::json& j);

// {"n00":..,"n01":..,"n10":..,"n11":..,"shots":..,"setting":..}
nlohmann::json shot_record_to_json(const ShotRecord& r);
ShotRecord shot_record_from_json(const nlohmann::json& j);

nlohmann::json measurement_model_to_json(const MeasurementModel& m);
MeasurementModel measurement_model_from_json(const nlohmann::json& j);

} // namespace sqisw
