#pragma once

#include "hwv/harness.hpp"

#include <json.hpp>

#include <filesystem>

namespace hwv::cli {

// Unknown keys are rejected so that typos do not silently fall back to defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

} // namespace hwv::cli
