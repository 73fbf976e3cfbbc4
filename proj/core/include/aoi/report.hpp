#pragma once

#include <span>
#include <string>

#include "aoi/optimize.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

/// Shortest decimal that round-trips; `inf`, `-inf` and `nan` spelled out.
std::string format_number(double x);

/// SimResult as a JSON object (NaN becomes null).
std::string to_json(const SimResult& r, const SimConfig& cfg);

/// `nu,prob` CSV with header row.
std::string ccdf_csv(std::span<const CcdfSample> samples);

/// `theta,mean_aoi` CSV with header row; `inf` for the infinite threshold and
/// an empty field where the mean could not be computed.
std::string sweep_csv(const SweepResult& r);

std::string to_json(const SweepResult& r);

}  // namespace aoi
