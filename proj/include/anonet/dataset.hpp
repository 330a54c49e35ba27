#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anonet/matrix.hpp"
#include "anonet/objectives.hpp"
#include "anonet/rng.hpp"

namespace anonet::data {

/// Feature vector with a regular label y and a private label z.
struct LabeledSample {
    std::vector<double> features;
    std::size_t y = 0;
    std::size_t z = 0;
};

struct Dataset {
    std::vector<LabeledSample> samples;
    std::size_t y_alphabet = 0;
    std::size_t z_alphabet = 0;
    std::size_t feature_dim = 0;

    std::size_t size() const { return samples.size(); }
    void validate() const;

    objectives::EmpiricalDistribution p_hat_y() const;
    objectives::EmpiricalDistribution p_hat_z() const;

    /// Features of the listed rows packed into a batch matrix.
    Matrix features_of(const std::vector<std::size_t>& indices) const;
    std::vector<std::size_t> labels_y_of(const std::vector<std::size_t>& indices) const;
    std::vector<std::size_t> labels_z_of(const std::vector<std::size_t>& indices) const;

    /// Whole-set views.
    Matrix all_features() const;
    std::vector<std::size_t> all_y() const;
    std::vector<std::size_t> all_z() const;
};

struct SplitSizes {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
};

struct SplitResult {
    Dataset train;
    Dataset val;
    Dataset test;
    std::vector<std::string> warnings;
};

/// Seeded split, stratified on Z so every private class appears in every
/// split when it has enough samples. Classes with fewer samples than
/// splits stay in train and produce a warning.
SplitResult split(const Dataset& dataset, SplitSizes sizes, std::uint64_t seed);

/// Canonical text format: header "m |Y| |Z| n", then one sample per line
/// (m reals, then y, then z). Doubles are written with enough digits to
/// round-trip exactly.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

/// FNV-1a over a file's bytes, as a hex string; used for manifests.
std::string file_hash(const std::string& path);

}  // namespace anonet::data
