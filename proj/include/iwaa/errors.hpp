#pragma once

#include <stdexcept>
#include <string>

namespace iwaa {

// Invalid configuration or parameters (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or structurally broken input files (CLI exit code 3).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A pipeline stage failed mid-run (CLI exit code 4).
struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& cause)
        : std::runtime_error("stage '" + stage + "' failed: " + cause), stage(stage) {}
    std::string stage;
};

}  // namespace iwaa
