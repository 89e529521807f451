#pragma once

#include "stodyn/core.hpp"

#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace stodyn {

/// Measure of cylinder sets, evaluated on finite words of state subsets.
/// The mass function is pure; oracles are immutable values and safe to share
/// across threads. Invariants (checked by the test suite, not per call):
///   mass([]) = 1, mass(w + X) = mass(w), additivity in the last slot,
///   mass(w + A) <= mass(w).
template <class S>
class BasicOracle {
public:
    using MassFn = std::function<S(std::span<const StateSet>)>;

    BasicOracle(StateSpace space, MassFn fn, bool stationary);

    const StateSpace& space() const { return space_; }

    /// True when the construction guarantees shift invariance.
    bool declared_stationary() const { return stationary_; }

    /// Measure of the cylinder named by the word. Each set must be sized to
    /// the state space.
    S mass(std::span<const StateSet> word) const;
    S mass(std::initializer_list<StateSet> word) const;
    S mass(const CellWord& w) const;

    BasicOracle with_stationary_flag(bool stationary) const;

private:
    StateSpace space_;
    MassFn fn_;
    bool stationary_;
};

using CylinderOracle = BasicOracle<double>;
using ExactOracle = BasicOracle<Rational>;

/// Homogeneous Markov chain data: row-stochastic transition matrix plus an
/// initial distribution. Rows must sum to 1 (within 1e-12 for double).
template <class S>
class BasicMarkovSpec {
public:
    BasicMarkovSpec(StateSpace space, std::vector<std::vector<S>> transition,
                    BasicDistribution<S> initial);

    const StateSpace& space() const { return space_; }
    const std::vector<std::vector<S>>& transition() const { return transition_; }
    const BasicDistribution<S>& initial() const { return initial_; }

    /// True iff initial * transition = initial (within 1e-10 for double).
    bool stationary() const { return stationary_; }

private:
    StateSpace space_;
    std::vector<std::vector<S>> transition_;
    BasicDistribution<S> initial_;
    bool stationary_;
};

using MarkovSpec = BasicMarkovSpec<double>;
using RationalMarkovSpec = BasicMarkovSpec<Rational>;

/// Iterated-map process data: a total map on state indices plus a measure.
template <class S>
class BasicTransformationSpec {
public:
    BasicTransformationSpec(StateSpace space, std::vector<int> map,
                            BasicDistribution<S> measure);

    const StateSpace& space() const { return space_; }
    const std::vector<int>& map() const { return map_; }
    const BasicDistribution<S>& measure() const { return measure_; }

    /// True iff the measure of every preimage of a singleton equals the
    /// measure of the singleton (within 1e-12 for double).
    bool measure_preserving() const { return measure_preserving_; }

private:
    StateSpace space_;
    std::vector<int> map_;
    BasicDistribution<S> measure_;
    bool measure_preserving_;
};

using TransformationSpec = BasicTransformationSpec<double>;
using RationalTransformationSpec = BasicTransformationSpec<Rational>;

/// Strictly increasing index sequence given as an explicit prefix, optionally
/// continued arithmetically with the given stride.
struct IndexSequence {
    std::vector<long> prefix;
    std::optional<long> tail_stride;

    /// r_i; throws std::out_of_range past the prefix when no stride is set.
    long at(int i) const;

    /// True when the whole sequence advances by one fixed stride.
    bool arithmetic() const;

    void validate() const;
};

// Constructors. Each output satisfies the oracle invariants by construction.

/// Independent identically distributed coordinates: mass = prod nu(A_j).
template <class S>
BasicOracle<S> iid(const StateSpace& space, BasicDistribution<S> nu);

/// Independent coordinates with per-position marginals; positions past the
/// prefix use the tail distribution. mass = prod nu_j(A_j).
template <class S>
BasicOracle<S> product_sequence(const StateSpace& space,
                                std::vector<BasicDistribution<S>> prefix,
                                std::optional<BasicDistribution<S>> tail);

/// Markov path measure. Evaluated by masked transfer products: restrict the
/// running vector to each cell and apply the transition matrix, O(n k^2).
template <class S>
BasicOracle<S> markov(BasicMarkovSpec<S> spec);

/// Path measure of the orbit process x, T x, T^2 x, ... under the given
/// measure: mass(A_0...A_{n-1}) = measure{x : T^i x in A_i for all i}.
template <class S>
BasicOracle<S> from_transformation(BasicTransformationSpec<S> spec);

/// Pointwise mixture t*mu + (1-t)*rho. Throws if t is outside [0,1].
template <class S>
BasicOracle<S> convex_mix(const S& t, const BasicOracle<S>& mu, const BasicOracle<S>& rho);

/// Independent coupling on the product space. Rectangle cells factorize;
/// general cells are decomposed into disjoint rectangles first.
template <class S>
BasicOracle<S> product_measure(const BasicOracle<S>& mu, const BasicOracle<S>& rho);

/// Push-forward under dropping the first coordinate: mass(w) = mu(X + w).
template <class S>
BasicOracle<S> shift_pushforward(const BasicOracle<S>& mu);

/// Push-forward under coordinate subsampling along r: cell j goes to
/// position r_j, every other position is unconstrained.
template <class S>
BasicOracle<S> restriction_pushforward(const BasicOracle<S>& mu, IndexSequence r);

/// Push-forward under repeating each coordinate k times: cells are
/// intersected within length-k blocks and mu evaluated on the blocks.
template <class S>
BasicOracle<S> dilation_pushforward(const BasicOracle<S>& mu, int k);

/// Push-forward under applying f coordinatewise: mass over target cells is
/// mu of the preimage cells. f maps source indices to target indices.
template <class S>
BasicOracle<S> factor_pushforward(std::span<const int> f, const StateSpace& target,
                                  const BasicOracle<S>& mu);

/// The same measure read over the k-tuple space: words over X^k are
/// flattened to words over X (boxes directly, other cells additively).
template <class S>
BasicOracle<S> block_recode(const BasicOracle<S>& mu, int k);

// Index helpers for product and power spaces.
int pair_index(int ix, int iy, int y_size);
std::pair<int, int> pair_split(int idx, int y_size);
int tuple_index(std::span<const int> digits, int base);
std::vector<int> tuple_split(int idx, int base, int k);

}  // namespace stodyn
