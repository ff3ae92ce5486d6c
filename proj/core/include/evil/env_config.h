#ifndef EVIL_ENV_CONFIG_H_
#define EVIL_ENV_CONFIG_H_

#include <string>

#include <nlohmann/json.hpp>

#include "evil/env.h"

namespace evil {

// Builds an environment from its structured config:
//   {"kind": "gridworld" | "tabular" | "point_mass", ...kind fields...,
//    "wrappers": [{"type": "tremble", "p": 0.05},
//                 {"type": "dynamics", "magnitude": 0.3, "seed": 7}]}
// Wrappers apply in order. Throws std::invalid_argument naming the bad field.
EnvPtr make_environment(const nlohmann::json& config);

EnvPtr load_environment(const std::string& path);

}  // namespace evil

#endif  // EVIL_ENV_CONFIG_H_
