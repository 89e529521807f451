#pragma once

#include "stodyn/core.hpp"
#include "stodyn/entropy.hpp"
#include "stodyn/measures.hpp"
#include "stodyn/rng.hpp"
#include "stodyn/topological.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stodyn {

/// Worst instance of a checked relation, kept for reporting.
struct Witness {
    std::string inputs;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct CheckReport {
    std::string check_name;
    std::string statement;      ///< what relation is verified, in plain words
    int instances = 0;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;          ///< max_violation <= tolerance
    std::vector<Witness> witnesses;
    std::string note;
};

/// Per-run overrides; a check supplies its own defaults for unset fields.
struct CheckConfig {
    std::optional<int> instances;
    std::optional<int> horizon;
    std::size_t budget = 2'000'000;
};

/// Names of all registered checks, in fixed registry order.
const std::vector<std::string>& check_names();

/// Statement string of one registered check.
std::string check_statement(const std::string& name);

/// Runs one named check. Deterministic in (name, config, seed); each check
/// derives its own substream from the seed and its name. Throws
/// std::invalid_argument for unknown names, listing the registry.
CheckReport run_check(const std::string& name, const CheckConfig& config,
                      std::uint64_t seed);

/// Runs every registered check in registry order.
std::vector<CheckReport> run_all(const CheckConfig& config, std::uint64_t seed);

bool all_pass(const std::vector<CheckReport>& reports);

/// CSV serialization: fixed column order, 15 significant digits, LF endings.
std::string reports_to_csv(const std::vector<CheckReport>& reports);

/// Human-readable one-line-per-check summary.
std::string reports_to_text(const std::vector<CheckReport>& reports);

// Random instance generators shared by the check suite and the tests.

/// Random ordered partition into m nonempty cells (random surjection).
Partition random_partition(const StateSpace& space, int m, Rng& rng);

/// Row-stochastic matrix with Dirichlet(1,..,1) rows.
std::vector<std::vector<double>> random_stochastic_matrix(int k, Rng& rng);

/// Left-invariant probability vector of a stochastic matrix, computed by
/// power iteration on the half-lazy chain (converges for periodic chains).
std::vector<double> stationary_vector(const std::vector<std::vector<double>>& transition,
                                      double tol = 1e-13, int max_iterations = 20000);

/// Random stationary Markov spec on k states.
MarkovSpec random_stationary_markov(const StateSpace& space, Rng& rng);

/// Random measure-preserving pair: a random map T and a T-invariant measure
/// (uniform on a random permutation's orbit structure when needed). The
/// returned spec always satisfies measure_preserving().
TransformationSpec random_measure_preserving(const StateSpace& space, Rng& rng);

/// Random transformation spec without the invariance requirement.
TransformationSpec random_transformation(const StateSpace& space, Rng& rng);

/// Random irreducible 0/1 transition matrix on k states (cycle plus random
/// extra edges).
std::vector<std::vector<int>> random_irreducible_allowed(int k, Rng& rng);

/// Random stationary Markov measure supported exactly on the allowed edges
/// of an irreducible subshift.
MarkovSpec random_markov_on_sft(const Sft& s, Rng& rng);

}  // namespace stodyn
