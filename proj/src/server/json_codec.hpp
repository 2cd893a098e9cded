#pragma once

#include <nlohmann/json.hpp>

#include "pawsim/config.hpp"
#include "pawsim/controller.hpp"

namespace pawsim {

/// Command object of a cmd message or a scenario keyframe. Throws ProtocolError.
TeleopCommand command_from(const nlohmann::json& obj, const GaitDefaults& defaults);

}  // namespace pawsim
