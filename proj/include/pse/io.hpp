#pragma once

#include <string>

#include "json.hpp"

#include "pse/colouring.hpp"
#include "pse/ergodics.hpp"
#include "pse/generators.hpp"
#include "pse/geometry.hpp"
#include "pse/graphs.hpp"
#include "pse/groups.hpp"
#include "pse/patterns.hpp"

namespace pse {

using Json = nlohmann::json;

// Point-set file format: {dim, r, window:{lo,hi}, mode:"int"|"float",
// points:[[..],..]}.
Json pointset_to_json(const PointSet& P);
PointSet pointset_from_json(const Json& j);

// Pattern file format: {dim, points:[[..]]} (+ r, mode when known).
Json pattern_to_json(const Pattern& Q);
Pattern pattern_from_json(const Json& j);

// Graph file format: {vertices:[[..]], edges:[[i,j],..], r}.
Json graph_to_json(const Graph& G);
Graph graph_from_json(const Json& j);

GroupSpec group_from_json(const Json& j);          // "R1".."R3" | "E2"
std::string group_to_string(const GroupSpec& g);
WindowSequence windows_from_json(const GroupSpec& g, const Json& j);
GeneratorSpec generator_from_json(const Json& j);
ColourLaw law_from_json(const Json& j);
Marginal marginal_from_json(const Json& j);
ColourProfile colour_profile_from_json(const Json& j);
Profile profile_from_json(const Json& j);
ScanningFunction scanning_function_from_json(const Json& j);

/// CSV import: one point per row.
PointSet pointset_from_csv(const std::string& path, double r, CoordMode mode, double margin);

/// Stable number formatting used in every report (%.12g).
std::string format_number(double v);

/// FNV-1a hash of the canonical dump, printed as 16 hex digits.
std::string config_hash(const Json& config);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace pse
