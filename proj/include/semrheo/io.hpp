#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "semrheo/embedding_store.hpp"
#include "semrheo/msd.hpp"
#include "semrheo/projection.hpp"
#include "semrheo/trajectory.hpp"
#include "semrheo/walker.hpp"

namespace semrheo::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that reads back to exactly `value`.
std::string format_double(double value);

/// "delay,msd,count"
void write_msd_csv(std::ostream& out, const MsdCurve& curve);
MsdCurve read_msd_csv(std::istream& in);

/// "t,x0,x1,...,x{D-1}"
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in, Provenance provenance = Provenance::synthetic);

/// "idx,x,y"
void write_projection_csv(std::ostream& out, const Projection2D& proj);

/// "step,token"
void write_walk_csv(std::ostream& out, const Walk& walk);

/// "delay,expected_msd"
void write_expected_msd_csv(std::ostream& out, const std::vector<std::size_t>& delays,
                            const std::vector<double>& values);

Json to_json(const PowerLawFit& fit);
Json to_json(const DiffusionReport& report);
Json to_json(const AbsorptionReport& report);
Json to_json(const WalkParams& params);
Json to_json(const Walk& walk, bool include_candidates = true);

/// Rebuilds a walk against `set`; tokens must resolve. candidate_log is
/// restored when present.
Walk walk_from_json(const Json& j, const EmbeddingSet& set);

/// Writes `j` with a two-space indent and a trailing newline.
void write_json(std::ostream& out, const Json& j);

} // namespace semrheo::io
