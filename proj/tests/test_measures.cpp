#include "stodyn/measures.hpp"
#include "stodyn/properties.hpp"
#include "stodyn/rng.hpp"

#include "oracle_checks.hpp"

#include <doctest.h>

#include <cmath>

using namespace stodyn;

namespace {

MarkovSpec example_chain(const StateSpace& s) {
    return MarkovSpec(s, {{0.9, 0.1}, {0.5, 0.5}}, Distribution({5.0 / 6.0, 1.0 / 6.0}));
}

}  // namespace

TEST_CASE("oracle mass basics") {
    StateSpace s = StateSpace::with_size(2);
    CylinderOracle u = iid(s, Distribution::uniform(2));
    CHECK(u.mass({}) == 1.0);
    CHECK(u.mass({s.full_set(), s.full_set(), s.full_set()}) == 1.0);
    CHECK(u.mass({s.singleton(0), s.singleton(1)}) == doctest::Approx(0.25).epsilon(1e-14));
    StateSet wrong(5);
    CHECK_THROWS_AS(u.mass({wrong}), std::invalid_argument);
}

TEST_CASE("iid oracle") {
    StateSpace s = StateSpace::with_size(2);
    CylinderOracle point = iid(s, Distribution::point_mass(2, 1));
    CHECK(point.mass({s.singleton(1), s.singleton(1), s.singleton(1)}) == 1.0);
    CHECK(point.mass({s.singleton(0)}) == 0.0);

    CylinderOracle u = iid(s, Distribution::uniform(2));
    CHECK(u.mass({s.singleton(0), s.singleton(0), s.singleton(1)}) ==
          doctest::Approx(0.125).epsilon(1e-14));

    CylinderOracle skew = iid(s, Distribution({0.9, 0.1}));
    CHECK(skew.mass({s.singleton(0), s.singleton(0), s.singleton(1)}) ==
          doctest::Approx(0.081).epsilon(1e-14));
    CHECK(skew.declared_stationary());
}

TEST_CASE("product sequence oracle") {
    StateSpace s = StateSpace::with_size(2);
    Distribution half = Distribution::uniform(2);
    Distribution skew({0.9, 0.1});

    CylinderOracle as_iid = product_sequence(s, std::vector<Distribution>{half, half},
                                             std::optional<Distribution>(half));
    CylinderOracle direct = iid(s, half);
    CHECK(as_iid.mass({s.singleton(0), s.singleton(1), s.singleton(0)}) ==
          direct.mass({s.singleton(0), s.singleton(1), s.singleton(0)}));
    CHECK(as_iid.declared_stationary());

    CylinderOracle warm = product_sequence(
        s, std::vector<Distribution>{Distribution::point_mass(2, 0), half},
        std::optional<Distribution>());
    CHECK(warm.mass({s.singleton(1), s.singleton(0)}) == 0.0);
    CHECK_FALSE(warm.declared_stationary());

    CylinderOracle two = product_sequence(s, std::vector<Distribution>{half, skew},
                                          std::optional<Distribution>());
    CHECK(two.mass({s.singleton(0), s.singleton(1)}) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK_THROWS_AS(two.mass({s.singleton(0), s.singleton(1), s.singleton(0)}),
                    std::out_of_range);
}

TEST_CASE("markov oracle") {
    StateSpace s = StateSpace::with_size(2);

    MarkovSpec frozen(s, {{1.0, 0.0}, {0.0, 1.0}}, Distribution({1.0, 0.0}));
    CylinderOracle f = markov(frozen);
    CHECK(f.mass({s.singleton(0), s.singleton(0), s.singleton(0), s.singleton(0)}) == 1.0);

    // every row equal to the initial vector collapses to independence
    MarkovSpec memoryless(s, {{0.7, 0.3}, {0.7, 0.3}}, Distribution({0.7, 0.3}));
    CylinderOracle m = markov(memoryless);
    CylinderOracle ind = iid(s, Distribution({0.7, 0.3}));
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            CHECK(m.mass({s.singleton(a), s.singleton(b)}) ==
                  doctest::Approx(ind.mass({s.singleton(a), s.singleton(b)})).epsilon(1e-14));
        }
    }

    CylinderOracle chain = markov(example_chain(s));
    CHECK(chain.mass({s.singleton(0), s.singleton(1)}) ==
          doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(chain.declared_stationary());

    CHECK_THROWS_AS(MarkovSpec(s, {{0.9, 0.2}, {0.5, 0.5}}, Distribution::uniform(2)),
                    std::invalid_argument);
}

TEST_CASE("transformation oracle") {
    StateSpace s = StateSpace::with_size(3);
    Distribution nu({0.2, 0.3, 0.5});

    TransformationSpec ident(s, {0, 1, 2}, nu);
    CylinderOracle id_oracle = from_transformation(ident);
    // with T = id the word mass is the measure of the intersection
    StateSet a01 = s.singleton(0) | s.singleton(1);
    StateSet a12 = s.singleton(1) | s.singleton(2);
    CHECK(id_oracle.mass({a01, a12}) == doctest::Approx(0.3).epsilon(1e-14));

    TransformationSpec cyc(s, {1, 2, 0}, Distribution::uniform(3));
    CylinderOracle c = from_transformation(cyc);
    CHECK(c.mass({s.singleton(0), s.singleton(1), s.singleton(2)}) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(c.mass({s.singleton(0), s.singleton(2)}) == 0.0);
    CHECK(cyc.measure_preserving());
    CHECK(c.declared_stationary());

    // n = 1 always reduces to the measure itself
    TransformationSpec squash(s, {0, 0, 1}, nu);
    CylinderOracle q = from_transformation(squash);
    CHECK(q.mass({a12}) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK_FALSE(squash.measure_preserving());
}

TEST_CASE("convex mix oracle") {
    StateSpace s = StateSpace::with_size(2);
    CylinderOracle zero = iid(s, Distribution::point_mass(2, 0));
    CylinderOracle one = iid(s, Distribution::point_mass(2, 1));

    CylinderOracle all_mu = convex_mix(1.0, zero, one);
    CHECK(all_mu.mass({s.singleton(0)}) == 1.0);
    CylinderOracle all_rho = convex_mix(0.0, zero, one);
    CHECK(all_rho.mass({s.singleton(0)}) == 0.0);

    CylinderOracle half = convex_mix(0.5, zero, one);
    CHECK(half.mass({s.singleton(0)}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(half.mass({s.singleton(1)}) == doctest::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS_AS(convex_mix(1.5, zero, one), std::invalid_argument);
}

TEST_CASE("product measure oracle") {
    StateSpace x = StateSpace::with_size(2);
    StateSpace y = StateSpace::with_size(2);
    StateSpace xy = StateSpace::product(x, y);

    CylinderOracle pm = product_measure(iid(x, Distribution::point_mass(2, 0)),
                                        iid(y, Distribution::point_mass(2, 1)));
    CHECK(pm.mass({xy.singleton(pair_index(0, 1, 2))}) == 1.0);
    CHECK(pm.mass({xy.full_set(), xy.full_set()}) == 1.0);

    CylinderOracle uu = product_measure(iid(x, Distribution::uniform(2)),
                                        iid(y, Distribution::uniform(2)));
    std::vector<StateSet> word(3, xy.singleton(2));
    CHECK(uu.mass(std::span<const StateSet>(word)) ==
          doctest::Approx(std::pow(4.0, -3)).epsilon(1e-14));

    // non-rectangle cell: the diagonal {(0,0),(1,1)} has mass 1/2 under uniform
    StateSet diag = xy.singleton(pair_index(0, 0, 2)) | xy.singleton(pair_index(1, 1, 2));
    CHECK(uu.mass({diag}) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("shift pushforward") {
    StateSpace s = StateSpace::with_size(2);
    CylinderOracle chain = markov(example_chain(s));
    CylinderOracle shifted = shift_pushforward(chain);
    // stationary: identical cylinder masses
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            CHECK(shifted.mass({s.singleton(a), s.singleton(b)}) ==
                  doctest::Approx(chain.mass({s.singleton(a), s.singleton(b)}))
                      .epsilon(1e-12));
        }
    }

    Distribution half = Distribution::uniform(2);
    Distribution skew({0.9, 0.1});
    CylinderOracle seq = product_sequence(s, std::vector<Distribution>{skew, half},
                                          std::optional<Distribution>(half));
    CylinderOracle seq_shifted = shift_pushforward(seq);
    CHECK(seq_shifted.mass({s.singleton(0)}) == doctest::Approx(0.5).epsilon(1e-14));

    // orbit process shifts to the orbit process of the image measure
    StateSpace s3 = StateSpace::with_size(3);
    TransformationSpec spec(s3, {1, 2, 0}, Distribution({0.5, 0.3, 0.2}));
    CylinderOracle moved = shift_pushforward(from_transformation(spec));
    TransformationSpec pushed(s3, {1, 2, 0}, Distribution({0.2, 0.5, 0.3}));
    CylinderOracle direct = from_transformation(pushed);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            CHECK(moved.mass({s3.singleton(a), s3.singleton(b)}) ==
                  doctest::Approx(direct.mass({s3.singleton(a), s3.singleton(b)}))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("restriction pushforward") {
    StateSpace s = StateSpace::with_size(2);
    CylinderOracle chain = markov(example_chain(s));

    IndexSequence ident{{0, 1, 2, 3, 4, 5}, 1};
    CylinderOracle same = restriction_pushforward(chain, ident);
    CHECK(same.mass({s.singleton(0), s.singleton(1), s.singleton(1)}) ==
          doctest::Approx(chain.mass({s.singleton(0), s.singleton(1), s.singleton(1)}))
              .epsilon(1e-14));

    CylinderOracle skew = iid(s, Distribution({0.9, 0.1}));
    IndexSequence sparse{{1, 4, 5}, 3};
    CylinderOracle sampled = restriction_pushforward(skew, sparse);
    CHECK(sampled.mass({s.singleton(0), s.singleton(1)}) ==
          doctest::Approx(0.09).epsilon(1e-14));

    // every-other-step sampling of a chain is the squared-matrix chain
    IndexSequence even{{0}, 2};
    CylinderOracle two_step = restriction_pushforward(chain, even);
    CHECK(two_step.declared_stationary());
    // P^2 of the example chain
    MarkovSpec squared(s, {{0.86, 0.14}, {0.7, 0.3}}, Distribution({5.0 / 6.0, 1.0 / 6.0}));
    CylinderOracle direct = markov(squared);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int c = 0; c < 2; ++c) {
                CHECK(two_step.mass({s.singleton(a), s.singleton(b), s.singleton(c)}) ==
                      doctest::Approx(
                          direct.mass({s.singleton(a), s.singleton(b), s.singleton(c)}))
                          .epsilon(1e-12));
            }
        }
    }

    IndexSequence bad{{3, 1}, std::nullopt};
    CHECK_THROWS_AS(restriction_pushforward(chain, bad), std::invalid_argument);
}

TEST_CASE("dilation pushforward") {
    StateSpace s = StateSpace::with_size(2);
    CylinderOracle chain = markov(example_chain(s));

    // k = 1 leaves masses unchanged
    CylinderOracle same = dilation_pushforward(chain, 1);
    CHECK(same.mass({s.singleton(0), s.singleton(1)}) ==
          chain.mass({s.singleton(0), s.singleton(1)}));

    CylinderOracle doubled = dilation_pushforward(chain, 2);
    // differing symbols inside one block are impossible
    CHECK(doubled.mass({s.singleton(0), s.singleton(1)}) == 0.0);
    CHECK(doubled.mass({s.singleton(0), s.singleton(0), s.singleton(1)}) ==
          doctest::Approx(chain.mass({s.singleton(0), s.singleton(1)})).epsilon(1e-14));
    CHECK_FALSE(doubled.declared_stationary());
    CHECK_THROWS_AS(dilation_pushforward(chain, 0), std::invalid_argument);
}

TEST_CASE("factor pushforward") {
    StateSpace x = StateSpace::with_size(3);
    StateSpace y({"a", "b"});
    CylinderOracle mu = iid(x, Distribution({0.2, 0.3, 0.5}));

    std::vector<int> ident{0, 1, 2};
    CylinderOracle same = factor_pushforward(ident, x, mu);
    CHECK(same.mass({x.singleton(2)}) == doctest::Approx(0.5).epsilon(1e-14));

    std::vector<int> constant{0, 0, 0};
    CylinderOracle collapsed = factor_pushforward(constant, y, mu);
    CHECK(collapsed.mass({y.singleton(0), y.singleton(0)}) == 1.0);
    CHECK(collapsed.mass({y.singleton(1)}) == 0.0);

    std::vector<int> f{0, 0, 1};
    CylinderOracle pushed = factor_pushforward(f, y, mu);
    StateSet pre = x.singleton(0) | x.singleton(1);
    CHECK(pushed.mass({y.singleton(0)}) == doctest::Approx(mu.mass({pre})).epsilon(1e-14));
}

TEST_CASE("block recode") {
    StateSpace s = StateSpace::with_size(2);
    CylinderOracle chain = markov(example_chain(s));

    CylinderOracle rec = block_recode(chain, 2);
    CHECK(rec.space().size() == 4);
    // a singleton pair-cell of length one is the matching length-2 word
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            std::vector<int> digits{a, b};
            CHECK(rec.mass({rec.space().singleton(tuple_index(digits, 2))}) ==
                  doctest::Approx(chain.mass({s.singleton(a), s.singleton(b)}))
                      .epsilon(1e-14));
        }
    }

    // independence recodes to independence over tuples
    CylinderOracle skew = iid(s, Distribution({0.9, 0.1}));
    CylinderOracle rec_iid = block_recode(skew, 2);
    Distribution tupled({0.81, 0.09, 0.09, 0.01});
    CylinderOracle direct = iid(rec_iid.space(), tupled);
    for (int t = 0; t < 4; ++t) {
        for (int r = 0; r < 4; ++r) {
            CHECK(rec_iid.mass({rec_iid.space().singleton(t), rec_iid.space().singleton(r)}) ==
                  doctest::Approx(
                      direct.mass({rec_iid.space().singleton(t), rec_iid.space().singleton(r)}))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("every constructor satisfies the oracle axioms") {
    Rng rng(101);
    StateSpace x = StateSpace::with_size(3);
    StateSpace y = StateSpace::with_size(2);

    std::vector<CylinderOracle> pool;
    pool.push_back(iid(x, Distribution(rng.dirichlet(3))));
    pool.push_back(product_sequence(
        x,
        std::vector<Distribution>{Distribution(rng.dirichlet(3)),
                                  Distribution(rng.dirichlet(3))},
        std::optional<Distribution>(Distribution(rng.dirichlet(3)))));
    pool.push_back(markov(random_stationary_markov(x, rng)));
    pool.push_back(from_transformation(random_measure_preserving(x, rng)));
    pool.push_back(from_transformation(random_transformation(x, rng)));
    pool.push_back(convex_mix(0.3, pool[0], pool[2]));
    pool.push_back(product_measure(pool[0], iid(y, Distribution(rng.dirichlet(2)))));
    pool.push_back(shift_pushforward(pool[2]));
    pool.push_back(restriction_pushforward(pool[2], IndexSequence{{1, 3}, 2}));
    pool.push_back(dilation_pushforward(pool[2], 2));
    std::vector<int> f{0, 1, 0};
    pool.push_back(factor_pushforward(f, y, pool[2]));
    pool.push_back(block_recode(markov(random_stationary_markov(y, rng)), 2));

    for (const auto& oracle : pool) {
        const int k = oracle.space().size();
        Partition p = random_partition(oracle.space(), std::min(3, k), rng);
        CHECK(testing::oracle_invariant_violation(oracle, p, 5) <= 1e-10);
    }
}

TEST_CASE("stationary constructions are shift invariant on words") {
    Rng rng(102);
    StateSpace s = StateSpace::with_size(3);
    std::vector<CylinderOracle> oracles;
    oracles.push_back(markov(random_stationary_markov(s, rng)));
    oracles.push_back(from_transformation(random_measure_preserving(s, rng)));
    for (const auto& mu : oracles) {
        REQUIRE(mu.declared_stationary());
        CylinderOracle shifted = shift_pushforward(mu);
        Partition p = Partition::singletons(s);
        std::vector<StateSet> word;
        // all singleton words up to length 6
        std::function<void()> walk = [&]() {
            CHECK(std::abs(shifted.mass(std::span<const StateSet>(word)) -
                           mu.mass(std::span<const StateSet>(word))) <= 1e-12);
            if (word.size() == 6) return;
            for (int c = 0; c < 3; ++c) {
                word.push_back(s.singleton(c));
                walk();
                word.pop_back();
            }
        };
        walk();
    }
}

TEST_CASE("dilation then k-step restriction recovers the measure") {
    Rng rng(103);
    StateSpace s = StateSpace::with_size(2);
    for (int k : {2, 3}) {
        CylinderOracle mu = markov(random_stationary_markov(s, rng));
        CylinderOracle back =
            restriction_pushforward(dilation_pushforward(mu, k), IndexSequence{{0}, k});
        std::vector<StateSet> word;
        std::function<void()> walk = [&]() {
            CHECK(std::abs(back.mass(std::span<const StateSet>(word)) -
                           mu.mass(std::span<const StateSet>(word))) <= 1e-12);
            if (word.size() == 5) return;
            for (int c = 0; c < 2; ++c) {
                word.push_back(s.singleton(c));
                walk();
                word.pop_back();
            }
        };
        walk();
    }
}

TEST_CASE("exact rational oracles agree with the double path") {
    StateSpace s = StateSpace::with_size(2);
    RationalMarkovSpec spec(
        s, {{Rational(9, 10), Rational(1, 10)}, {Rational(1, 2), Rational(1, 2)}},
        RationalDistribution({Rational(5, 6), Rational(1, 6)}));
    ExactOracle chain = markov(spec);
    CHECK(chain.mass({s.singleton(0), s.singleton(1)}) == Rational(1, 12));
    CHECK(spec.stationary());

    ExactOracle dil = dilation_pushforward(chain, 2);
    CHECK(dil.mass({s.singleton(0), s.singleton(0), s.singleton(1)}) ==
          chain.mass({s.singleton(0), s.singleton(1)}));

    ExactOracle u = iid(s, RationalDistribution::uniform(2));
    CHECK(u.mass({s.singleton(0), s.singleton(1), s.singleton(0)}) == Rational(1, 8));
}
