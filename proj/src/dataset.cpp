#include "anonet/dataset.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "anonet/errors.hpp"

namespace anonet::data {

void Dataset::validate() const {
    for (const auto& s : samples) {
        if (s.features.size() != feature_dim) throw InputError("Dataset: feature dim mismatch");
        if (s.y >= y_alphabet || s.z >= z_alphabet) throw InputError("Dataset: label out of range");
        for (double v : s.features)
            if (!std::isfinite(v)) throw InputError("Dataset: non-finite feature");
    }
}

objectives::EmpiricalDistribution Dataset::p_hat_y() const {
    return objectives::empirical_distribution(all_y(), y_alphabet);
}

objectives::EmpiricalDistribution Dataset::p_hat_z() const {
    return objectives::empirical_distribution(all_z(), z_alphabet);
}

Matrix Dataset::features_of(const std::vector<std::size_t>& indices) const {
    Matrix m(indices.size(), feature_dim);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto& f = samples.at(indices[i]).features;
        std::copy(f.begin(), f.end(), m.row(i));
    }
    return m;
}

std::vector<std::size_t> Dataset::labels_y_of(const std::vector<std::size_t>& indices) const {
    std::vector<std::size_t> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out[i] = samples.at(indices[i]).y;
    return out;
}

std::vector<std::size_t> Dataset::labels_z_of(const std::vector<std::size_t>& indices) const {
    std::vector<std::size_t> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out[i] = samples.at(indices[i]).z;
    return out;
}

Matrix Dataset::all_features() const {
    Matrix m(samples.size(), feature_dim);
    for (std::size_t i = 0; i < samples.size(); ++i)
        std::copy(samples[i].features.begin(), samples[i].features.end(), m.row(i));
    return m;
}

std::vector<std::size_t> Dataset::all_y() const {
    std::vector<std::size_t> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].y;
    return out;
}

std::vector<std::size_t> Dataset::all_z() const {
    std::vector<std::size_t> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].z;
    return out;
}

SplitResult split(const Dataset& dataset, SplitSizes sizes, std::uint64_t seed) {
    const std::size_t total = sizes.train + sizes.val + sizes.test;
    if (total > dataset.size()) throw InputError("split: requested sizes exceed dataset size");
    if (sizes.train == 0) throw InputError("split: empty train split");

    // Group indices by private class, shuffle within each class.
    RngStream rng(seed, 17);
    std::vector<std::vector<std::size_t>> by_class(dataset.z_alphabet);
    for (std::size_t i = 0; i < dataset.size(); ++i) by_class[dataset.samples[i].z].push_back(i);
    for (auto& group : by_class) rng.shuffle(group);

    SplitResult result;
    const double inv_n = 1.0 / static_cast<double>(dataset.size());
    std::vector<std::size_t> pick_train, pick_val, pick_test;

    // First pass: per-class proportional quotas (floored), with a floor of
    // one sample per non-empty split where the class can afford it.
    std::vector<std::vector<std::size_t>> leftovers(dataset.z_alphabet);
    const std::size_t splits_needed = 1 + (sizes.val > 0 ? 1 : 0) + (sizes.test > 0 ? 1 : 0);
    for (std::size_t c = 0; c < dataset.z_alphabet; ++c) {
        auto& group = by_class[c];
        if (group.empty()) continue;
        const double nc = static_cast<double>(group.size());
        std::size_t want_train, want_val, want_test;
        if (group.size() < splits_needed) {
            result.warnings.push_back("private class " + std::to_string(c) +
                                      " has too few samples; kept in train only");
            want_train = group.size();
            want_val = want_test = 0;
        } else {
            want_train = static_cast<std::size_t>(std::floor(nc * static_cast<double>(sizes.train) * inv_n));
            want_val = static_cast<std::size_t>(std::floor(nc * static_cast<double>(sizes.val) * inv_n));
            want_test = static_cast<std::size_t>(std::floor(nc * static_cast<double>(sizes.test) * inv_n));
            if (want_train == 0) want_train = 1;
            if (sizes.val > 0 && want_val == 0) want_val = 1;
            if (sizes.test > 0 && want_test == 0) want_test = 1;
            while (want_train + want_val + want_test > group.size()) {
                if (want_train > 1) --want_train;
                else if (want_val > 1) --want_val;
                else --want_test;
            }
        }
        std::size_t pos = 0;
        for (std::size_t k = 0; k < want_train; ++k) pick_train.push_back(group[pos++]);
        for (std::size_t k = 0; k < want_val; ++k) pick_val.push_back(group[pos++]);
        for (std::size_t k = 0; k < want_test; ++k) pick_test.push_back(group[pos++]);
        while (pos < group.size()) leftovers[c].push_back(group[pos++]);
    }

    // Second pass: top each split up to its exact size from the leftovers,
    // interleaving classes so remainders stay balanced.
    std::vector<std::size_t> pool;
    bool more = true;
    for (std::size_t round = 0; more; ++round) {
        more = false;
        for (std::size_t c = 0; c < dataset.z_alphabet; ++c) {
            if (round < leftovers[c].size()) {
                pool.push_back(leftovers[c][round]);
                more = true;
            }
        }
    }
    rng.shuffle(pool);
    std::size_t cursor = 0;
    auto top_up = [&](std::vector<std::size_t>& sink, std::size_t target) {
        while (sink.size() > target) {  // overfilled quota: return extras to the pool tail
            pool.push_back(sink.back());
            sink.pop_back();
        }
        while (sink.size() < target && cursor < pool.size()) sink.push_back(pool[cursor++]);
        if (sink.size() != target) throw InputError("split: could not satisfy requested sizes");
    };
    top_up(pick_train, sizes.train);
    top_up(pick_val, sizes.val);
    top_up(pick_test, sizes.test);

    auto build = [&dataset](const std::vector<std::size_t>& idx) {
        Dataset d;
        d.y_alphabet = dataset.y_alphabet;
        d.z_alphabet = dataset.z_alphabet;
        d.feature_dim = dataset.feature_dim;
        d.samples.reserve(idx.size());
        for (std::size_t i : idx) d.samples.push_back(dataset.samples[i]);
        return d;
    };
    // Deterministic order inside each split.
    std::sort(pick_train.begin(), pick_train.end());
    std::sort(pick_val.begin(), pick_val.end());
    std::sort(pick_test.begin(), pick_test.end());
    result.train = build(pick_train);
    result.val = build(pick_val);
    result.test = build(pick_test);
    return result;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream out(path);
    if (!out) throw InputError("save_dataset: cannot open " + path);
    out << dataset.feature_dim << ' ' << dataset.y_alphabet << ' ' << dataset.z_alphabet << ' '
        << dataset.size() << '\n';
    char buf[40];
    for (const auto& s : dataset.samples) {
        std::string line;
        line.reserve(dataset.feature_dim * 20);
        for (double v : s.features) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            line += buf;
            line += ' ';
        }
        out << line << s.y << ' ' << s.z << '\n';
    }
    if (!out) throw InputError("save_dataset: write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("load_dataset: cannot open " + path);

    Dataset d;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("load_dataset: missing header", 1);
    ++line_no;
    std::size_t n = 0;
    {
        std::istringstream hs(line);
        if (!(hs >> d.feature_dim >> d.y_alphabet >> d.z_alphabet >> n))
            throw ParseError("load_dataset: malformed header", line_no);
    }
    d.samples.reserve(n);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        LabeledSample s;
        s.features.resize(d.feature_dim);
        for (std::size_t j = 0; j < d.feature_dim; ++j) {
            if (!(ls >> s.features[j])) throw ParseError("load_dataset: bad feature value", line_no);
        }
        long long y = -1, z = -1;
        if (!(ls >> y >> z)) throw ParseError("load_dataset: missing labels", line_no);
        if (y < 0 || static_cast<std::size_t>(y) >= d.y_alphabet)
            throw ParseError("load_dataset: regular label out of range", line_no);
        if (z < 0 || static_cast<std::size_t>(z) >= d.z_alphabet)
            throw ParseError("load_dataset: private label out of range", line_no);
        s.y = static_cast<std::size_t>(y);
        s.z = static_cast<std::size_t>(z);
        d.samples.push_back(std::move(s));
    }
    if (d.samples.size() != n)
        throw ParseError("load_dataset: sample count does not match header", line_no);
    return d;
}

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("file_hash: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char chunk[65536];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(chunk[i]);
            h *= 0x100000001b3ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(chunk))) break;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

}  // namespace anonet::data
