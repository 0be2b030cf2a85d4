#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "utat/disagg.hpp"
#include "utat/errors.hpp"
#include "utat/postopt.hpp"

namespace utat::jsonio {

inline constexpr int kSchemaVersion = 1;

/// Serializes a fitted model (weights, errors, scales, config echo) as a
/// stable-key-order JSON document whose numbers round-trip exactly.
std::string model_to_json(const disagg::ValueModel& model);

/// Inverse of model_to_json.  Throws Error("parse-error"/"validation-error").
disagg::ValueModel model_from_json(const std::string& text);
disagg::ValueModel load_model(const std::filesystem::path& file);

/// Ensemble document: iterations, seed, optional order/scheme, entries
/// [{w, count, objective}], weighted_average.  Weight vectors are written in
/// the model's [measure][criterion][segment] shape.
std::string ensemble_to_json(const postopt::SolutionEnsemble& ensemble,
                             const disagg::ValueModel& model);

/// Classical post-optimization report: one {measure, criterion, min, max,
/// average} row per (measure, criterion) pair.
std::string minmax_to_json(const postopt::MinMaxReport& report,
                           const disagg::ValueModel& model);

/// Machine-readable error object for the CLI surface.
std::string error_to_json(const Error& error);

/// Writes content to file via a temp file plus atomic rename so failed runs
/// never leave partial output behind.  Throws Error("io-error").
void write_atomic(const std::filesystem::path& file, const std::string& content);

}  // namespace utat::jsonio
