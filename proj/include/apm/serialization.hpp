#pragma once

// Plain-text (JSON) forms of measures, test functions and certificates.
// Every rational is written as an exact "p/q" string.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "apm/construction.hpp"
#include "apm/interval.hpp"
#include "apm/measure.hpp"
#include "apm/piecewise_linear.hpp"
#include "apm/uniqueness.hpp"

namespace apm {

using Json = nlohmann::ordered_json;

Json interval_to_json(const Interval& J);
Interval interval_from_json(const Json& j);

// {"window": {...}, "atoms": [{"pos": "p/q", "mass": "p/q"}, ...]}
Json measure_to_json(const DiscreteMeasure& mu);
// Validates the document and canonicalizes the atoms. Throws ConfigError on
// malformed input and WindowError for atoms outside the window.
DiscreteMeasure measure_from_json(const Json& j);

// Per-atom lineage sidecar for a stage export.
Json provenance_to_json(const StageMeasure& stage);

// {"breakpoints": [{"x": "p/q", "y": "p/q"}, ...]}
Json function_to_json(const PiecewiseLinearFn& f);
PiecewiseLinearFn function_from_json(const Json& j);

Json to_json(const TailCertificate& c);
Json to_json(const CellMassReport& r);
Json to_json(const MassDecayReport& r);
Json to_json(const ClusterCertificate& c);
Json to_json(const ApCertificate& c);
Json to_json(const MatchReport& r);
Json to_json(const LumpDecomposition& d);
Json to_json(const ZeroIdentityCertificate& c);
Json to_json(const FarFieldReport& r);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

DiscreteMeasure read_measure(const std::filesystem::path& path);
void write_measure(const std::filesystem::path& path, const DiscreteMeasure& mu);

}  // namespace apm
