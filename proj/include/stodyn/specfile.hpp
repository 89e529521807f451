#pragma once

#include "stodyn/core.hpp"
#include "stodyn/csv.hpp"
#include "stodyn/entropy.hpp"
#include "stodyn/measures.hpp"
#include "stodyn/topological.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stodyn {

/// Parse failure with the offending line and field.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, std::string field, const std::string& message);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

struct RunParams {
    int horizon = 12;
    std::size_t budget = 2'000'000;
    LogBase log_base = LogBase::natural;
    std::uint64_t seed = 0;
};

/// Fully resolved content of a process/subshift description file.
///
/// The format is line-oriented: named blocks with `{ ... }` bodies, one
/// `key values...` entry per line, `#` comments. Block kinds: `space`,
/// `partition`, `process`, `sft`, `run`. Process kinds cover the direct
/// constructors (iid, product_sequence, markov, transformation) and the
/// combinators (mix, product, shift, restriction, dilation, factor,
/// block_recode), which reference previously declared processes by name, so
/// reference cycles cannot occur. Stochastic rows are validated to sum to 1
/// within 1e-9 and then renormalized exactly.
class SpecModel {
public:
    struct ProcessEntry {
        std::string name;
        std::string kind;
        CylinderOracle oracle;
        std::optional<MarkovSpec> markov_data;   ///< set when kind == "markov"
        std::optional<Distribution> iid_weights; ///< set when kind == "iid"
    };

    const StateSpace& space(const std::string& name) const;
    const ProcessEntry& process(const std::string& name) const;
    const Partition& partition(const std::string& name) const;
    const Sft& sft(const std::string& name) const;

    bool has_partition(const std::string& name) const;

    std::vector<std::string> space_names() const;
    std::vector<std::string> process_names() const;
    std::vector<std::string> partition_names() const;
    std::vector<std::string> sft_names() const;

    const RunParams& run() const { return run_; }

private:
    friend class SpecModelBuilder;

    std::vector<std::pair<std::string, StateSpace>> spaces_;
    std::vector<ProcessEntry> processes_;
    std::vector<std::pair<std::string, Partition>> partitions_;
    std::vector<std::pair<std::string, Sft>> sfts_;
    RunParams run_;
};

SpecModel parse_spec(const std::string& text);
SpecModel parse_spec_file(const std::string& path);

}  // namespace stodyn
