#pragma once

#include <crown/pipeline.hpp>
#include <crown/ranker.hpp>

#include <iosfwd>
#include <map>
#include <string>

namespace crown::config {

using Settings = std::map<std::string, std::string>;

/// "key = value" lines; '#' starts a comment; blank lines are ignored.
Settings parse_settings(std::istream& in);
Settings load_settings(const std::string& path);

struct Config {
    ArtifactPaths paths;
    ranker::RunConfig run;
};

/// Keys understood in settings files and flag overrides.
const std::vector<std::string>& known_keys();

/// Starts from the preset (flags, then file, then "run1"), then applies file
/// settings, then flag settings. Unknown keys and invalid values throw.
Config resolve(const Settings& file, const Settings& flags);

/// Key = value rendering of the active run parameters.
std::string describe(const ranker::RunConfig& run);

} // namespace crown::config
