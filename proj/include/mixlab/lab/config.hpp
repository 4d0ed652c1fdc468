#pragma once

#include "mixlab/duhamel.hpp"
#include "mixlab/grid.hpp"
#include "mixlab/rvf.hpp"

#include <json.hpp>

#include <string>
#include <vector>

// Single-file JSON configuration.  User files are merged over the defaults,
// then `--set a.b.c=value` overrides are applied (value parsed as JSON when
// possible, else taken as a string).  Unknown keys raise ConfigError.

namespace mixlab::lab {

using Json = nlohmann::json;

Json default_config();

/// Merge `user` over the defaults; ConfigError on keys absent from the defaults.
Json resolve_config(const Json& user, const std::vector<std::string>& overrides = {});

/// Read the file (IoError if unreadable, ConfigError if not JSON) and resolve.
Json load_config(const std::string& path, const std::vector<std::string>& overrides = {});

void apply_override(Json& cfg, const std::string& assignment);

GridSpec grid_from(const Json& cfg);
rvf::SlowlyVaryingSpec ell_from(const Json& ell);
duhamel::FieldDescriptor field_from(const Json& f);
duhamel::ProblemSpec problem_from(const Json& cfg);
duhamel::TimeGrid time_from(const Json& cfg);
duhamel::RunOptions run_options_from(const Json& cfg);

/// Inverse of problem_from/time_from/grid_from for config echoes.
Json to_json(const duhamel::ProblemSpec& spec);
Json to_json(const duhamel::TimeGrid& tg);
Json to_json(const GridSpec& g);

/// Either an explicit list or {start, stop, count} (linear) / {start, stop, count, geometric: true}.
std::vector<double> number_list(const Json& node, const std::string& what);

}  // namespace mixlab::lab
