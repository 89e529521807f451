#include "stodyn/topological.hpp"
#include "stodyn/properties.hpp"
#include "stodyn/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace stodyn;

namespace {

constexpr double kGolden = 1.618033988749895;
constexpr double kLnGolden = 0.48121182505960347;

Sft golden_mean() {
    return Sft(StateSpace::with_size(2), {{1, 1}, {1, 0}});
}

// Brute-force word count, the independent route for small n.
std::uint64_t count_words_brute(const Sft& s, int n) {
    std::uint64_t total = 0;
    std::vector<int> word;
    std::function<void()> walk = [&]() {
        if (static_cast<int>(word.size()) == n) {
            ++total;
            return;
        }
        for (int t = 0; t < s.space().size(); ++t) {
            if (!s.state_kept(t)) continue;
            if (!word.empty() && !s.transition_allowed(word.back(), t)) continue;
            word.push_back(t);
            walk();
            word.pop_back();
        }
    };
    walk();
    return total;
}

}  // namespace

TEST_CASE("stranded states are trimmed with warnings") {
    // state 2 has no outgoing edge; state 1 then loses its only successor
    Sft s(StateSpace::with_size(3), {{1, 0, 0}, {0, 0, 1}, {0, 0, 0}});
    CHECK(s.kept_states() == std::vector<int>{0});
    CHECK(s.trim_warnings().size() == 2);
    CHECK_FALSE(s.empty());

    Sft dead(StateSpace::with_size(2), {{0, 1}, {0, 0}});
    CHECK(dead.empty());

    CHECK_THROWS_AS(Sft(StateSpace::with_size(2), {{1, 2}, {0, 0}}), std::invalid_argument);
}

TEST_CASE("word complexity on fixed subshifts") {
    Sft full(StateSpace::with_size(3), {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
    for (int n = 1; n <= 8; ++n) {
        CHECK(word_complexity(full, n) == static_cast<std::uint64_t>(std::pow(3.0, n)));
    }

    Sft loop(StateSpace::with_size(1), {{1}});
    for (int n = 1; n <= 10; ++n) CHECK(word_complexity(loop, n) == 1);

    Sft g = golden_mean();
    CHECK(word_complexity(g, 3) == 5);
    const std::uint64_t fib[20] = {2,   3,   5,    8,    13,   21,   34,  55,  89,  144,
                                   233, 377, 610,  987,  1597, 2584, 4181, 6765, 10946, 17711};
    for (int n = 1; n <= 20; ++n) {
        CHECK(word_complexity(g, n) == fib[n - 1]);
    }
    for (int n = 1; n <= 12; ++n) {
        CHECK(word_complexity(g, n) == count_words_brute(g, n));
    }
}

TEST_CASE("word counts are submultiplicative and approach the growth rate") {
    Rng rng(41);
    for (int i = 0; i < 10; ++i) {
        const int k = rng.uniform_int(2, 4);
        Sft s(StateSpace::with_size(k), random_irreducible_allowed(k, rng));
        for (int m = 1; m <= 6; ++m) {
            for (int n = 1; n <= 6; ++n) {
                CHECK(word_complexity(s, m + n) <=
                      word_complexity(s, m) * word_complexity(s, n));
            }
        }
        HtEstimate ht = ht_estimate(s, 16);
        REQUIRE(ht.converged);
        double prev = ht.per_n[0];
        for (int n : {2, 4, 8, 16}) {
            const double a = ht.per_n[static_cast<std::size_t>(n - 1)];
            CHECK(a <= prev + 1e-12);
            CHECK(a >= ht.exact - 1e-9);
            prev = a;
        }
    }
}

TEST_CASE("spectral radius on fixed matrices") {
    SpectralRadiusResult ident = spectral_radius({{1.0, 0.0}, {0.0, 1.0}});
    CHECK(ident.converged);
    CHECK(ident.value == doctest::Approx(1.0).epsilon(1e-12));

    SpectralRadiusResult diag = spectral_radius({{2.0, 0.0}, {0.0, 3.0}});
    CHECK(diag.value == doctest::Approx(3.0).epsilon(1e-10));

    SpectralRadiusResult fib = spectral_radius({{1.0, 1.0}, {1.0, 0.0}});
    CHECK(fib.converged);
    CHECK(fib.value == doctest::Approx(kGolden).epsilon(1e-12));

    // periodic: a pure 3-cycle still converges thanks to the identity shift
    SpectralRadiusResult cyc = spectral_radius({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    CHECK(cyc.converged);
    CHECK(cyc.value == doctest::Approx(1.0).epsilon(1e-11));

    CHECK_THROWS_AS(spectral_radius({{1.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(spectral_radius({{-1.0}}), std::invalid_argument);
}

TEST_CASE("spectral radius agrees with the 2x2 closed form") {
    Rng rng(42);
    for (int i = 0; i < 50; ++i) {
        const double a = rng.unif() * 3, b = rng.unif() * 3;
        const double c = rng.unif() * 3, d = rng.unif() * 3;
        const double exact = 0.5 * (a + d + std::sqrt((a - d) * (a - d) + 4 * b * c));
        SpectralRadiusResult got = spectral_radius({{a, b}, {c, d}});
        CHECK(got.converged);
        CHECK(got.value == doctest::Approx(exact).epsilon(1e-10));
    }
}

TEST_CASE("topological entropy estimates") {
    Sft full(StateSpace::with_size(2), {{1, 1}, {1, 1}});
    HtEstimate h2 = ht_estimate(full, 8);
    CHECK(h2.exact == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    for (double a : h2.per_n) CHECK(a == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    Sft cyc(StateSpace::with_size(3), {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    HtEstimate h0 = ht_estimate(cyc, 8);
    CHECK(h0.exact == doctest::Approx(0.0).epsilon(1e-10));

    HtEstimate hg = ht_estimate(golden_mean(), 12);
    CHECK(std::abs(hg.exact - kLnGolden) <= 1e-9);

    Sft empty(StateSpace::with_size(2), {{0, 0}, {0, 0}});
    HtEstimate he = ht_estimate(empty, 4);
    CHECK(he.empty);

    CHECK_THROWS_AS(ht_estimate(golden_mean(), 1), std::invalid_argument);
}

TEST_CASE("maximal-entropy chain on fixed subshifts") {
    // full shift: uniform independent letters
    Sft full(StateSpace::with_size(3), {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
    MarkovSpec uniform = parry_measure(full);
    for (int i = 0; i < 3; ++i) {
        CHECK(uniform.initial().weight(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
        for (int j = 0; j < 3; ++j) {
            CHECK(uniform.transition()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
                  doctest::Approx(1.0 / 3.0).epsilon(1e-9));
        }
    }
    CHECK(markov_closed_form(uniform) == doctest::Approx(std::log(3.0)).epsilon(1e-10));

    // single cycle: deterministic motion, zero entropy
    Sft cyc(StateSpace::with_size(3), {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    MarkovSpec det = parry_measure(cyc);
    CHECK(markov_closed_form(det) == doctest::Approx(0.0).epsilon(1e-10));

    MarkovSpec gold = parry_measure(golden_mean());
    CHECK(gold.transition()[0][0] == doctest::Approx(0.6180339887498949).epsilon(1e-10));
    CHECK(gold.transition()[0][1] == doctest::Approx(0.38196601125010515).epsilon(1e-10));
    CHECK(gold.transition()[1][0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gold.initial().weight(0) == doctest::Approx(0.7236067977499789).epsilon(1e-9));
    CHECK(gold.initial().weight(1) == doctest::Approx(0.276393202250021).epsilon(1e-9));
    CHECK(std::abs(markov_closed_form(gold) - kLnGolden) <= 1e-9);
    CHECK(gold.stationary());

    // two separate loops: reducible, the error names the components
    Sft split(StateSpace::with_size(2), {{1, 0}, {0, 1}});
    CHECK_THROWS_WITH_AS(parry_measure(split), doctest::Contains("components"),
                         std::invalid_argument);
}

TEST_CASE("support check") {
    Sft g = golden_mean();
    StateSpace s = g.space();

    CylinderOracle parry = markov(parry_measure(g));
    CHECK(support_check(parry, g, 8).supported);

    CylinderOracle full = iid(s, Distribution::uniform(2));
    SupportCheckResult bad = support_check(full, g, 6);
    CHECK_FALSE(bad.supported);
    REQUIRE(bad.witness.size() >= 2);
    CHECK(bad.witness[bad.witness.size() - 2] == 1);
    CHECK(bad.witness.back() == 1);

    // a point mass on the constant admissible path
    CylinderOracle point = iid(s, Distribution::point_mass(2, 0));
    CHECK(support_check(point, g, 8).supported);
}

TEST_CASE("strongly connected components") {
    auto comps = strongly_connected_components({{0, 1, 0}, {1, 0, 0}, {0, 1, 0}});
    // {0,1} is one component, {2} feeds into it
    REQUIRE(comps.size() == 2);
    bool found_pair = false;
    for (const auto& c : comps) {
        if (c == std::vector<int>{0, 1}) found_pair = true;
    }
    CHECK(found_pair);
}
