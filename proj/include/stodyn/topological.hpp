#pragma once

#include "stodyn/core.hpp"
#include "stodyn/entropy.hpp"
#include "stodyn/measures.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stodyn {

/// Subshift of finite type over a finite alphabet, given by a 0/1 matrix of
/// allowed transitions. States with no outgoing or no incoming allowed edge
/// cannot lie on a biinfinite path; they are trimmed iteratively at
/// construction and recorded as warnings.
class Sft {
public:
    Sft(StateSpace space, std::vector<std::vector<int>> allowed);

    const StateSpace& space() const { return space_; }
    const std::vector<std::vector<int>>& allowed() const { return allowed_; }

    /// Original indices of the states surviving the trim, ascending.
    const std::vector<int>& kept_states() const { return kept_; }

    /// One message per trimmed state.
    const std::vector<std::string>& trim_warnings() const { return warnings_; }

    /// True when no state survives (the subshift has no points).
    bool empty() const { return kept_.empty(); }

    /// Transition matrix restricted to kept states.
    const std::vector<std::vector<int>>& trimmed() const { return trimmed_; }

    bool state_kept(int s) const;
    bool transition_allowed(int a, int b) const;

private:
    StateSpace space_;
    std::vector<std::vector<int>> allowed_;
    std::vector<int> kept_;
    std::vector<std::vector<int>> trimmed_;
    std::vector<std::string> warnings_;
};

/// Number of admissible words of length n: the minimal subcover of the
/// subshift by length-n singleton cylinders. Sum of entries of the trimmed
/// matrix to the power n-1; n = 1 gives the kept-state count.
std::uint64_t word_complexity(const Sft& s, int n);

struct SpectralRadiusResult {
    double value = 0.0;
    std::vector<double> eigenvector;  ///< nonnegative, L1-normalized
    bool converged = false;
    int iterations = 0;
};

/// Largest eigenvalue modulus of a square nonnegative matrix by power
/// iteration (run on m + I so periodic irreducible matrices converge).
/// Throws std::invalid_argument for non-square or negative input.
SpectralRadiusResult spectral_radius(const std::vector<std::vector<double>>& m,
                                     double rel_tol = 1e-12, int max_iterations = 10000);

struct HtEstimate {
    std::vector<double> per_n;   ///< (1/n) ln N(n) for n = 1..N
    double exact = 0.0;          ///< ln(spectral radius of the trimmed matrix)
    bool empty = false;          ///< no admissible points; exact is meaningless
    bool converged = false;      ///< spectral radius iteration status
    std::string note;
};

/// Topological entropy of the subshift: the finite-horizon growth sequence of
/// word counts together with the exact value ln(spectral radius). For a
/// finite discrete alphabet the cover by singleton cells refines every open
/// cover, so it attains the supremum over covers; only that cover is used.
HtEstimate ht_estimate(const Sft& s, int N);

/// The stationary Markov chain of maximal entropy on an irreducible subshift:
/// p_ij = allowed_ij * v_j / (lambda * v_i) with v the right Perron vector;
/// the initial vector is the normalized product of left and right Perron
/// vectors. Its closed-form entropy equals ln(lambda) within 1e-9.
/// Throws std::invalid_argument for reducible matrices, naming the strongly
/// connected components.
MarkovSpec parry_measure(const Sft& s);

struct SupportCheckResult {
    bool supported = true;
    std::vector<int> witness;  ///< a positive-mass inadmissible state word, if any
};

/// True iff every singleton state word of length <= n with positive mass
/// under mu is admissible in s. Enumerates positive-mass words depth-first.
SupportCheckResult support_check(const CylinderOracle& mu, const Sft& s, int n,
                                 const EnumOptions& options = {});

/// Strongly connected components of a 0/1 transition matrix, each sorted,
/// in discovery order. An SFT matrix is irreducible iff there is exactly one
/// component and it contains an edge.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& allowed);

}  // namespace stodyn
