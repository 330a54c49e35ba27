#pragma once

#include <cstdint>

#include "anonet/dataset.hpp"

namespace anonet::data {

/// Controlled double-labeled generator. Each sample is
///   x = y_strength * a_y + z_strength * (cos(angle) * b_z + sin(angle) * c_z) + noise,
/// where the a_y live in one coordinate block, the b_z in a disjoint block,
/// and the c_z inside the Y block. Angle 0 keeps the label subspaces
/// orthogonal; angle 90 makes the Z signal collinear with the Y features.
struct SynthSpec {
    std::size_t y_alphabet = 4;
    std::size_t z_alphabet = 5;
    std::size_t dim = 24;
    std::size_t samples_per_pair = 50;
    double y_strength = 1.0;
    double z_strength = 1.0;
    double entanglement_deg = 0.0;  // in [0, 90]
    double noise = 0.1;
    std::uint64_t seed = 1;
};

Dataset synth_generate(const SynthSpec& spec);

}  // namespace anonet::data
