#include "anonet/synth.hpp"

#include <cmath>

#include "anonet/errors.hpp"
#include "anonet/rng.hpp"

namespace anonet::data {

Dataset synth_generate(const SynthSpec& spec) {
    if (spec.y_alphabet < 2 || spec.z_alphabet < 2)
        throw ConfigError("synth_generate: alphabets need at least two classes");
    if (spec.samples_per_pair == 0) throw ConfigError("synth_generate: zero samples per pair");
    if (spec.entanglement_deg < 0.0 || spec.entanglement_deg > 90.0)
        throw ConfigError("synth_generate: entanglement angle must be in [0, 90]");
    if (spec.y_strength < 0.0 || spec.z_strength < 0.0)
        throw ConfigError("synth_generate: strengths must be >= 0");
    if (spec.dim < spec.y_alphabet + spec.z_alphabet)
        throw ConfigError("synth_generate: dim too small for the requested label subspaces");

    const double angle = spec.entanglement_deg * M_PI / 180.0;
    const double in_plane = spec.entanglement_deg == 90.0 ? 0.0 : std::cos(angle);
    const double toward_y = std::sin(angle);

    Dataset d;
    d.feature_dim = spec.dim;
    d.y_alphabet = spec.y_alphabet;
    d.z_alphabet = spec.z_alphabet;

    RngStream rng(spec.seed, 3);
    for (std::size_t y = 0; y < spec.y_alphabet; ++y) {
        for (std::size_t z = 0; z < spec.z_alphabet; ++z) {
            for (std::size_t rep = 0; rep < spec.samples_per_pair; ++rep) {
                LabeledSample s;
                s.y = y;
                s.z = z;
                s.features.assign(spec.dim, 0.0);
                s.features[y] += spec.y_strength;
                // The Z prototype rotates from its own block into the Y
                // block as entanglement grows.
                s.features[spec.y_alphabet + z] += spec.z_strength * in_plane;
                s.features[z % spec.y_alphabet] +=
                    spec.z_strength * toward_y * (1.0 + static_cast<double>(z / spec.y_alphabet));
                for (double& f : s.features) f += spec.noise * rng.normal();
                d.samples.push_back(std::move(s));
            }
        }
    }
    d.validate();
    return d;
}

}  // namespace anonet::data
