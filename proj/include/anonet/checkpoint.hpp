#pragma once

#include <string>

#include "anonet/trainer.hpp"

namespace anonet::train {

/// Self-describing checkpoint container: a magic line, a length-prefixed
/// JSON header (config, phase progress, rng streams, layer specs, matrix
/// manifest), then raw little-endian f64 payloads in manifest order.
/// Identical states serialize to identical bytes.
void save_checkpoint(const TrainerState& state, const std::string& path);
TrainerState load_checkpoint(const std::string& path);

}  // namespace anonet::train
