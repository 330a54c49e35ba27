#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace anonet {

/// Seeded random stream with hand-rolled draw transforms so that sequences
/// are identical across standard libraries and platforms. Streams derived
/// from the same seed but different stream ids are independent.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : gen_(mix(seed, stream)) {}

    /// Uniform on [0,1) with 53 bits of mantissa.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; draws exactly two words per call.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        std::size_t i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    /// Fisher-Yates shuffle with a fixed draw order.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = index(i + 1);
            std::swap(v[i], v[j]);
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

    std::string serialize() const {
        std::ostringstream os;
        os << gen_;
        return os.str();
    }

    static RngStream deserialize(const std::string& state) {
        RngStream r(0, 0);
        std::istringstream is(state);
        is >> r.gen_;
        return r;
    }

    bool operator==(const RngStream& other) const { return gen_ == other.gen_; }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        return splitmix(seed ^ splitmix(stream + 0x632BE59BD9B4E019ull));
    }

    std::mt19937_64 gen_;
};

}  // namespace anonet
