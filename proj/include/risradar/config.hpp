#pragma once

#include <string>

#include "risradar/harness.hpp"

namespace risradar {

/// Scene from JSON text. All keys are optional and default to the reference
/// scene; powers are given in dB (snr_db, inr_db, noise_power_db,
/// ref_loss_db). Unknown keys raise ConfigError.
Scene parseScene(const std::string &text);
Scene loadScene(const std::string &path);

/// Scene as JSON text accepted by parseScene.
std::string sceneToJson(const Scene &scene);

/// Experiment from JSON text: {"scene", "sweep": {"variable", "values"},
/// "trials", "seed", "solver", "modes", "threads", "codesign"}.
ExperimentSpec parseExperimentSpec(const std::string &text);
ExperimentSpec loadExperimentSpec(const std::string &path);

/// Reads a whole file, throwing ConfigError with the path on failure.
std::string readFile(const std::string &path);

} // namespace risradar
