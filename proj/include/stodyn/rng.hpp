#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace stodyn {

/// Deterministic random source. All derived draws are built from raw
/// mt19937_64 output with fixed arithmetic, so identical seeds give identical
/// streams independent of the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    /// Uniform in [0, 1).
    double unif() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1].
    double unif_pos() { return 1.0 - unif(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi);

    /// Standard exponential via inversion.
    double exponential() ;

    /// Dirichlet(1,...,1): normalized exponentials, a point of the simplex.
    std::vector<double> dirichlet(int m);

    /// Shuffles indices 0..n-1 (Fisher-Yates).
    std::vector<int> permutation(int n);

private:
    std::mt19937_64 engine_;
};

/// Stable 64-bit hash for deriving per-name substreams from one seed.
std::uint64_t fnv1a64(const std::string& s);

}  // namespace stodyn
