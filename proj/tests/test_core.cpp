#include "stodyn/core.hpp"
#include "stodyn/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace stodyn;

TEST_CASE("phi matches x ln x with phi(0) = 0") {
    CHECK(phi(0.0) == 0.0);
    CHECK(phi(1.0) == 0.0);
    CHECK(phi(0.5) == doctest::Approx(-0.34657359027997264).epsilon(1e-14));
    CHECK_THROWS_AS(phi(-1e-9), std::domain_error);
}

TEST_CASE("phi is convex on a grid") {
    for (int xi = 0; xi <= 20; ++xi) {
        for (int yi = 0; yi <= 20; ++yi) {
            for (int ti = 0; ti <= 10; ++ti) {
                const double x = xi * 0.15;
                const double y = yi * 0.15;
                const double t = ti * 0.1;
                CHECK(phi(t * x + (1 - t) * y) <= t * phi(x) + (1 - t) * phi(y) + 1e-12);
            }
        }
    }
}

TEST_CASE("distribution entropy on fixed inputs") {
    CHECK(dist_entropy(Distribution({1.0})) == 0.0);
    CHECK(dist_entropy(Distribution({0.5, 0.5})) ==
          doctest::Approx(0.6931471805599453).epsilon(1e-14));
    CHECK(dist_entropy(Distribution({0.9, 0.1})) ==
          doctest::Approx(0.32508297339144826).epsilon(1e-14));
}

TEST_CASE("uniform distribution maximizes entropy") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const int m = rng.uniform_int(1, 6);
        Distribution d(rng.dirichlet(m));
        const double h = dist_entropy(d);
        CHECK(h >= -1e-12);
        CHECK(h <= std::log(static_cast<double>(m)) + 1e-12);
    }
    CHECK(dist_entropy(Distribution::uniform(5)) ==
          doctest::Approx(std::log(5.0)).epsilon(1e-14));
}

TEST_CASE("grouping bound from convexity") {
    // For nonnegative r_1..r_m with sum r: -sum phi(r_i) <= -phi(r) + r ln m.
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        const int m = rng.uniform_int(1, 6);
        const double r = rng.unif() * 1.5;
        std::vector<double> parts = rng.dirichlet(m);
        double lhs = 0.0;
        for (double w : parts) lhs -= phi(w * r);
        CHECK(lhs <= -phi(r) + r * std::log(static_cast<double>(m)) + 1e-12);
    }
}

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(Distribution({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution({-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution(std::vector<double>{}), std::invalid_argument);
    CHECK(RationalDistribution({Rational(1, 3), Rational(2, 3)}).size() == 2);
    CHECK_THROWS_AS(RationalDistribution({Rational(1, 3), Rational(1, 3)}),
                    std::invalid_argument);
}

TEST_CASE("state space construction and lookups") {
    StateSpace s({"a", "b", "c"});
    CHECK(s.size() == 3);
    CHECK(s.index_of("b") == 1);
    CHECK(s.index_of("z") == -1);
    CHECK_THROWS_AS(StateSpace({"a", "a"}), std::invalid_argument);
    CHECK_THROWS_AS(StateSpace(std::vector<std::string>{}), std::invalid_argument);

    StateSpace p = StateSpace::product(StateSpace::with_size(2), s);
    CHECK(p.size() == 6);
    CHECK(p.label(1) == "(0,b)");
    StateSpace q = StateSpace::power(StateSpace::with_size(2), 3);
    CHECK(q.size() == 8);
    CHECK(q.label(0) == "(0,0,0)");
    CHECK(q.label(6) == "(1,1,0)");
}

TEST_CASE("partition validation") {
    StateSpace s = StateSpace::with_size(3);
    CHECK(Partition::trivial(s).cell_count() == 1);
    CHECK(Partition::singletons(s).cell_count() == 3);
    // missing and doubled states
    CHECK_THROWS_AS(Partition(s, {s.singleton(0), s.singleton(1)}), std::invalid_argument);
    StateSet both = s.singleton(0) | s.singleton(1);
    CHECK_THROWS_AS(Partition(s, {both, s.singleton(1), s.singleton(2)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Partition(s, {s.empty_set(), s.full_set()}), std::invalid_argument);
}

TEST_CASE("join on fixed examples") {
    StateSpace s = StateSpace::with_size(3);
    Partition p = Partition::from_labels(s, {{"0", "1"}, {"2"}});
    Partition q = Partition::from_labels(s, {{"0"}, {"1", "2"}});

    CHECK(join(Partition::trivial(s), p).same_cells(p));
    CHECK(join(Partition::singletons(s), p).same_cells(Partition::singletons(s)));
    CHECK(join(p, q).same_cells(Partition::singletons(s)));
    CHECK(join(p, p).same_cells(p));

    StateSpace other = StateSpace::with_size(4);
    CHECK_THROWS_AS(join(p, Partition::trivial(other)), std::invalid_argument);
}

TEST_CASE("join is commutative and associative up to reordering") {
    Rng rng(13);
    StateSpace s = StateSpace::with_size(5);
    auto random_partition = [&](int m) {
        std::vector<StateSet> cells(static_cast<std::size_t>(m), s.empty_set());
        std::vector<int> order = rng.permutation(5);
        for (int i = 0; i < 5; ++i) {
            const int c = i < m ? i : rng.uniform_int(0, m - 1);
            cells[static_cast<std::size_t>(c)].set(
                static_cast<std::size_t>(order[static_cast<std::size_t>(i)]));
        }
        return Partition(s, cells);
    };
    for (int i = 0; i < 50; ++i) {
        Partition a = random_partition(rng.uniform_int(1, 3));
        Partition b = random_partition(rng.uniform_int(1, 3));
        Partition c = random_partition(rng.uniform_int(1, 3));
        CHECK(join(a, b).same_cells(join(b, a)));
        CHECK(join(join(a, b), c).same_cells(join(a, join(b, c))));
        CHECK(refines(join(a, b), a));
        CHECK(refines(join(a, b), b));
    }
}

TEST_CASE("refines on fixed examples") {
    StateSpace s = StateSpace::with_size(3);
    Partition p = Partition::from_labels(s, {{"0", "1"}, {"2"}});
    CHECK(refines(p, Partition::trivial(s)));
    CHECK(refines(Partition::singletons(s), p));
    CHECK_FALSE(refines(Partition::trivial(s), Partition::singletons(s)));
    CHECK_FALSE(refines(p, Partition::singletons(s)));
    // partial order: reflexive and transitive
    CHECK(refines(p, p));
}

TEST_CASE("preimage partition") {
    StateSpace x = StateSpace::with_size(3);
    StateSpace y({"a", "b"});
    Partition q = Partition::singletons(y);

    std::vector<int> ident{0, 1, 2};
    CHECK(preimage_partition(ident, x, Partition::singletons(x))
              .same_cells(Partition::singletons(x)));

    std::vector<int> constant{0, 0, 0};
    CHECK(preimage_partition(constant, x, q).same_cells(Partition::trivial(x)));

    std::vector<int> f{0, 0, 1};  // 0,1 -> a; 2 -> b
    Partition expected = Partition::from_labels(x, {{"0", "1"}, {"2"}});
    CHECK(preimage_partition(f, x, q).same_cells(expected));
}

TEST_CASE("product partition") {
    StateSpace x = StateSpace::with_size(2);
    StateSpace y = StateSpace::with_size(3);
    CHECK(product_partition(Partition::trivial(x), Partition::trivial(y)).cell_count() == 1);
    Partition fine = product_partition(Partition::singletons(x), Partition::singletons(y));
    CHECK(fine.same_cells(Partition::singletons(StateSpace::product(x, y))));
    Partition p = Partition::from_labels(x, {{"0"}, {"1"}});
    Partition q = Partition::from_labels(y, {{"0"}, {"1"}, {"2"}});
    CHECK(product_partition(p, q).cell_count() == 6);
}

TEST_CASE("cell words") {
    StateSpace s = StateSpace::with_size(2);
    Partition p = Partition::singletons(s);
    CellWord w(p, {0, 1, 0});
    CHECK(w.length() == 3);
    CHECK(w.cells()[1] == s.singleton(1));
    CHECK(CellWord(p, {}).length() == 0);
    CHECK_THROWS_AS(CellWord(p, {2}), std::invalid_argument);
}
