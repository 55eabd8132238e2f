#pragma once

#include <string>
#include <vector>

#include "bivadj/datasets.hpp"
#include "bivadj/inference.hpp"

// Self-contained static SVG plots: confidence curves with level rules and
// interval whiskers, marginal-frequency overlays, and pair scatters.

namespace bivadj::svg {

std::string confidence_curve(const ConfidenceCurve& curve, const std::vector<double>& levels);

/// Observed count frequencies for both coordinates with the fitted Poisson
/// pmf overlaid, counts 0..max_count (last bin aggregated).
std::string marginal_overlay(const PairSample& sample, double rate1, double rate2, int max_count);

std::string scatter(const PairSample& sample);

}  // namespace bivadj::svg
