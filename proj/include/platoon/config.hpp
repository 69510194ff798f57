#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "platoon/simulator.hpp"

namespace platoon {

struct RunConfig {
    int horizon = 0;
    std::filesystem::path output_dir = ".";
};

/// Fully validated scenario configuration: every downstream type is
/// constructible from it and all defaults have been applied.
struct ScenarioConfig {
    ScenarioSpec scenario;
    AttackSpec attack;
    RunConfig run;
    Discretization discretization = Discretization::Zoh;
    bool user_matrices = false;  // A/B supplied explicitly instead of generated
    std::optional<std::filesystem::path> leader_profile_path;

    /// Canonical INI text with defaults applied; reparsing it reproduces this
    /// config exactly.
    std::string normalized_dump() const;
};

/// Parse and validate a scenario file. Throws ConfigError with a section.key
/// location on any malformed or invariant-violating input.
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Same, from in-memory text; relative file references resolve against
/// `base_dir`.
ScenarioConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir);

}  // namespace platoon
