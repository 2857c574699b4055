#pragma once

#include <string>
#include <vector>

#include "odmts/instance.hpp"
#include "odmts/mip_build.hpp"
#include "odmts/path_enum.hpp"
#include "odmts/preprocess.hpp"
#include "odmts/solve.hpp"

namespace odmts {

// Instance files are JSON documents with schema id "odmts-instance/1".
// Stops carry string ids; hubs, arcs, and trips reference them by id. The
// loader resolves ids to indices, fills defaulted waits, re-checks every
// structural invariant, and reports problems with the offending field
// path. Unknown fields are rejected so typos fail loudly.
NetworkInstance parse_instance(const std::string& text,
                               const std::string& origin = "<memory>");
NetworkInstance load_instance(const std::string& path);

// Canonical serialization; load -> save -> load is the identity and
// save -> load -> save is byte-stable.
std::string instance_to_json(const NetworkInstance& inst);
void save_instance(const NetworkInstance& inst, const std::string& path);

// Reduction counts, one JSON object. When the enumerated sets are given,
// kept-path counts per class are included.
std::string preprocess_report_json(const NetworkInstance& inst,
                                   const PreprocessResult& pre,
                                   const std::vector<TripPathSets>* sets = nullptr);

// Solution summary: objective decomposition, design listing, adoption
// statistics, reduction counts, model sizes, timings, optional round log.
// Shares are recomputed from the emitted counts.
std::string run_report_json(const NetworkInstance& inst,
                            const PreprocessResult& pre,
                            const std::vector<TripPathSets>& sets,
                            const BuiltModel& built, const DesignSolution& sol,
                            const std::vector<LazyRound>* rounds = nullptr);

// Stops as points and every hub arc as a line, flagged open/fixed, for
// plotting a design.
std::string design_geojson(const NetworkInstance& inst,
                           const std::vector<char>& open_arcs);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace odmts
