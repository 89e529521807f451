#include "stodyn/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace stodyn {

int Rng::uniform_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do {
        x = raw();
    } while (x >= limit);
    return lo + static_cast<int>(x % range);
}

double Rng::exponential() { return -std::log(unif_pos()); }

std::vector<double> Rng::dirichlet(int m) {
    std::vector<double> w(static_cast<std::size_t>(m));
    double total = 0.0;
    for (double& x : w) {
        x = exponential();
        total += x;
    }
    for (double& x : w) x /= total;
    return w;
}

std::vector<int> Rng::permutation(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = uniform_int(0, i);
        std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace stodyn
