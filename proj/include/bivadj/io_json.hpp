#pragma once

#include <json.hpp>

#include "bivadj/gof.hpp"
#include "bivadj/inference.hpp"

// JSON encodings for the CLI artifacts. Round trip is exact:
// from_json(to_json(x)) == x, with infinities encoded as nulls.

namespace bivadj {

void to_json(nlohmann::json& j, const FitResult& r);
void from_json(const nlohmann::json& j, FitResult& r);
bool operator==(const FitResult& a, const FitResult& b);

void to_json(nlohmann::json& j, const ConfidenceCurve& c);
void from_json(const nlohmann::json& j, ConfidenceCurve& c);
bool operator==(const ConfidenceCurve& a, const ConfidenceCurve& b);

void to_json(nlohmann::json& j, const GofReport& g);
void from_json(const nlohmann::json& j, GofReport& g);
bool operator==(const GofReport& a, const GofReport& b);

std::string fit_result_csv(const FitResult& r);
std::string curve_csv(const ConfidenceCurve& c);
std::string gof_csv(const GofReport& g);

}  // namespace bivadj
