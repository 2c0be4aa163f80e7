#pragma once

#include <string>

#include "rp/nets.hpp"

namespace rp {

// Flat binary parameter container, little-endian:
//   u32 magic 0x52504E54 ("RPNT"), u32 format version,
//   u64 init seed, f64 leaky slope, u32 flags (bit 0: linear value output),
//   u32 block count, then per block u64 rows, u64 cols, rows*cols f64.
// Block order: trunk weights, trunk bias, policy weights, policy bias,
// value weights, value bias. Provenance (config hash, epoch, metrics) goes
// into a JSON sidecar next to the file, written by the run driver.
void save_checkpoint(const std::string& path, const ActorCriticNet& net);

ActorCriticNet load_checkpoint(const std::string& path);

} // namespace rp
