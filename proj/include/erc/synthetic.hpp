#pragma once

#include <cstdint>

#include "erc/config.hpp"
#include "erc/dataset.hpp"

namespace erc {

struct SyntheticSplits {
  Dataset train;
  Dataset valid;
  Dataset test;
};

// Seed-deterministic dialogue generation. All three splits share the same
// class prototypes (drawn once from the seed); each split uses its own
// substream. Per dialogue, every speaker walks their own emotion Markov
// chain; text features are prototype + white noise, audio/visual features
// are prototype + AR(1) stationary noise + sparse impulse spikes.
SyntheticSplits generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace erc
