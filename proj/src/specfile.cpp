#include "stodyn/specfile.hpp"

#include "stodyn/properties.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace stodyn {

ParseError::ParseError(int line, std::string field, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", field '" + field +
                         "': " + message),
      line_(line),
      field_(std::move(field)) {}

namespace {

struct Entry {
    int line = 0;
    std::string key;
    std::vector<std::string> values;
};

struct Block {
    int line = 0;
    std::vector<std::string> header;  // e.g. {"process", "chain", "of", "X"}
    std::vector<Entry> entries;
};

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

std::vector<Block> split_blocks(const std::string& text) {
    std::vector<Block> blocks;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    Block* open = nullptr;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::vector<std::string> tokens = tokenize(raw);
        if (tokens.empty()) continue;
        if (!open) {
            if (tokens.back() != "{") {
                throw ParseError(line_no, tokens.front(),
                                 "expected a block header ending in '{'");
            }
            tokens.pop_back();
            if (tokens.empty()) {
                throw ParseError(line_no, "{", "block header is missing its kind");
            }
            blocks.push_back(Block{line_no, std::move(tokens), {}});
            open = &blocks.back();
        } else if (tokens.size() == 1 && tokens[0] == "}") {
            open = nullptr;
        } else {
            Entry e;
            e.line = line_no;
            e.key = tokens.front();
            e.values.assign(tokens.begin() + 1, tokens.end());
            open->entries.push_back(std::move(e));
        }
    }
    if (open) {
        throw ParseError(line_no, open->header.front(), "unterminated block (missing '}')");
    }
    return blocks;
}

double parse_number(const std::string& tok, int line, const std::string& field) {
    const auto slash = tok.find('/');
    try {
        std::size_t used = 0;
        if (slash != std::string::npos) {
            const double num = std::stod(tok.substr(0, slash), &used);
            if (used != slash) throw std::invalid_argument(tok);
            const double den = std::stod(tok.substr(slash + 1), &used);
            if (used != tok.size() - slash - 1) throw std::invalid_argument(tok);
            if (den == 0.0) throw ParseError(line, field, "division by zero in '" + tok + "'");
            return num / den;
        }
        const double x = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return x;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(line, field, "cannot parse number '" + tok + "'");
    }
}

long parse_integer(const std::string& tok, int line, const std::string& field) {
    try {
        std::size_t used = 0;
        const long x = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return x;
    } catch (const std::exception&) {
        throw ParseError(line, field, "cannot parse integer '" + tok + "'");
    }
}

std::vector<double> parse_weights(const Entry& e) {
    if (e.values.empty()) throw ParseError(e.line, e.key, "expected at least one number");
    std::vector<double> w;
    w.reserve(e.values.size());
    for (const auto& tok : e.values) w.push_back(parse_number(tok, e.line, e.key));
    return w;
}

// Weight rows are accepted when they sum to 1 within 1e-9, then renormalized
// so downstream constructors see exactly stochastic data.
std::vector<double> normalized_weights(const Entry& e) {
    std::vector<double> w = parse_weights(e);
    double total = 0.0;
    for (double x : w) {
        if (x < 0.0) throw ParseError(e.line, e.key, "weights must be nonnegative");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ParseError(e.line, e.key,
                         "weights sum to " + std::to_string(total) + ", expected 1 within 1e-9");
    }
    for (double& x : w) x /= total;
    return w;
}

}  // namespace

class SpecModelBuilder {
public:
    explicit SpecModelBuilder(const std::string& text) {
        for (const Block& b : split_blocks(text)) {
            const std::string& kind = b.header.front();
            if (kind == "space") {
                add_space(b);
            } else if (kind == "partition") {
                add_partition(b);
            } else if (kind == "process") {
                add_process(b);
            } else if (kind == "sft") {
                add_sft(b);
            } else if (kind == "run") {
                add_run(b);
            } else {
                throw ParseError(b.line, kind, "unknown block kind");
            }
        }
    }

    SpecModel take() { return std::move(model_); }

private:
    SpecModel model_;
    bool have_run_ = false;

    static const Entry* find(const Block& b, const std::string& key) {
        for (const auto& e : b.entries) {
            if (e.key == key) return &e;
        }
        return nullptr;
    }

    static const Entry& need(const Block& b, const std::string& key) {
        const Entry* e = find(b, key);
        if (!e) {
            throw ParseError(b.line, key, "required entry is missing in this '" +
                                              b.header.front() + "' block");
        }
        return *e;
    }

    static void check_keys(const Block& b, std::initializer_list<const char*> known) {
        for (const auto& e : b.entries) {
            if (std::find_if(known.begin(), known.end(), [&](const char* k) {
                    return e.key == k;
                }) == known.end()) {
                throw ParseError(e.line, e.key, "unknown entry in this '" + b.header.front() +
                                                    "' block");
            }
        }
    }

    std::string block_name(const Block& b) const {
        if (b.header.size() < 2) {
            throw ParseError(b.line, b.header.front(), "block needs a name");
        }
        return b.header[1];
    }

    const StateSpace& named_space(const std::string& name, int line) const {
        for (const auto& [n, s] : model_.spaces_) {
            if (n == name) return s;
        }
        throw ParseError(line, "of", "unknown space '" + name + "'");
    }

    const StateSpace& header_space(const Block& b) const {
        if (b.header.size() != 4 || b.header[2] != "of") {
            throw ParseError(b.line, b.header.front(),
                             "header must read '" + b.header.front() + " NAME of SPACE {'");
        }
        return named_space(b.header[3], b.line);
    }

    const SpecModel::ProcessEntry& named_process(const std::string& name, int line) const {
        for (const auto& p : model_.processes_) {
            if (p.name == name) return p;
        }
        throw ParseError(line, "of",
                         "unknown process '" + name + "' (forward references are not allowed)");
    }

    int state_index(const StateSpace& space, const std::string& tok, int line,
                    const std::string& field) const {
        const int i = space.index_of(tok);
        if (i >= 0) return i;
        throw ParseError(line, field, "unknown state label '" + tok + "'");
    }

    void check_fresh(const std::string& name, int line) const {
        auto used = [&](const std::string& n) { return n == name; };
        const bool clash =
            std::any_of(model_.spaces_.begin(), model_.spaces_.end(),
                        [&](const auto& p) { return used(p.first); }) ||
            std::any_of(model_.processes_.begin(), model_.processes_.end(),
                        [&](const auto& p) { return used(p.name); }) ||
            std::any_of(model_.partitions_.begin(), model_.partitions_.end(),
                        [&](const auto& p) { return used(p.first); }) ||
            std::any_of(model_.sfts_.begin(), model_.sfts_.end(),
                        [&](const auto& p) { return used(p.first); });
        if (clash) throw ParseError(line, name, "name is already declared");
    }

    void add_space(const Block& b) {
        const std::string name = block_name(b);
        check_fresh(name, b.line);
        check_keys(b, {"labels"});
        const Entry& labels = need(b, "labels");
        if (labels.values.empty()) throw ParseError(labels.line, "labels", "expected labels");
        try {
            model_.spaces_.emplace_back(name, StateSpace(labels.values));
        } catch (const std::exception& ex) {
            throw ParseError(labels.line, "labels", ex.what());
        }
    }

    void add_partition(const Block& b) {
        const std::string name = block_name(b);
        check_fresh(name, b.line);
        check_keys(b, {"cells"});
        const StateSpace& space = header_space(b);
        const Entry& cells = need(b, "cells");
        std::vector<std::vector<std::string>> groups(1);
        for (const auto& tok : cells.values) {
            if (tok == "|") {
                groups.emplace_back();
            } else {
                groups.back().push_back(tok);
            }
        }
        try {
            model_.partitions_.emplace_back(name, Partition::from_labels(space, groups));
        } catch (const std::exception& ex) {
            throw ParseError(cells.line, "cells", ex.what());
        }
    }

    void add_sft(const Block& b) {
        const std::string name = block_name(b);
        check_fresh(name, b.line);
        check_keys(b, {"row"});
        const StateSpace& space = header_space(b);
        std::vector<std::vector<int>> allowed;
        for (const auto& e : b.entries) {
            std::vector<int> row;
            for (const auto& tok : e.values) {
                const long x = parse_integer(tok, e.line, "row");
                if (x != 0 && x != 1) {
                    throw ParseError(e.line, "row", "entries must be 0 or 1");
                }
                row.push_back(static_cast<int>(x));
            }
            if (static_cast<int>(row.size()) != space.size()) {
                throw ParseError(e.line, "row", "expected " + std::to_string(space.size()) +
                                                    " entries");
            }
            allowed.push_back(std::move(row));
        }
        if (static_cast<int>(allowed.size()) != space.size()) {
            throw ParseError(b.line, "row", "expected " + std::to_string(space.size()) +
                                                " rows, got " + std::to_string(allowed.size()));
        }
        model_.sfts_.emplace_back(name, Sft(space, std::move(allowed)));
    }

    void add_run(const Block& b) {
        if (have_run_) throw ParseError(b.line, "run", "duplicate run block");
        have_run_ = true;
        check_keys(b, {"horizon", "budget", "log-base", "seed"});
        if (const Entry* e = find(b, "horizon")) {
            const long n = parse_integer(e->values.at(0), e->line, "horizon");
            if (n < 1) throw ParseError(e->line, "horizon", "must be >= 1");
            model_.run_.horizon = static_cast<int>(n);
        }
        if (const Entry* e = find(b, "budget")) {
            const long n = parse_integer(e->values.at(0), e->line, "budget");
            if (n < 1) throw ParseError(e->line, "budget", "must be >= 1");
            model_.run_.budget = static_cast<std::size_t>(n);
        }
        if (const Entry* e = find(b, "log-base")) {
            const std::string& v = e->values.at(0);
            if (v == "e") {
                model_.run_.log_base = LogBase::natural;
            } else if (v == "2") {
                model_.run_.log_base = LogBase::two;
            } else {
                throw ParseError(e->line, "log-base", "expected 'e' or '2'");
            }
        }
        if (const Entry* e = find(b, "seed")) {
            model_.run_.seed =
                static_cast<std::uint64_t>(parse_integer(e->values.at(0), e->line, "seed"));
        }
    }

    Distribution entry_distribution(const Entry& e, const StateSpace& space) const {
        std::vector<double> w = normalized_weights(e);
        if (static_cast<int>(w.size()) != space.size()) {
            throw ParseError(e.line, e.key, "expected " + std::to_string(space.size()) +
                                                " weights");
        }
        return Distribution(std::move(w));
    }

    void add_process(const Block& b) {
        const std::string name = block_name(b);
        check_fresh(name, b.line);
        const Entry& kind_entry = need(b, "kind");
        if (kind_entry.values.size() != 1) {
            throw ParseError(kind_entry.line, "kind", "expected exactly one kind");
        }
        const std::string& kind = kind_entry.values[0];

        SpecModel::ProcessEntry entry{name, kind, build_oracle(b, kind), std::nullopt,
                                      std::nullopt};
        if (kind == "markov") entry.markov_data = markov_data_;
        if (kind == "iid") entry.iid_weights = iid_data_;
        markov_data_.reset();
        iid_data_.reset();
        model_.processes_.push_back(std::move(entry));
    }

    // Side channels filled by build_oracle for closed-form metadata.
    std::optional<MarkovSpec> markov_data_;
    std::optional<Distribution> iid_data_;

    CylinderOracle build_oracle(const Block& b, const std::string& kind) {
        if (kind == "iid") {
            check_keys(b, {"kind", "weights"});
            const StateSpace& space = header_space(b);
            Distribution nu = entry_distribution(need(b, "weights"), space);
            iid_data_ = nu;
            return iid(space, std::move(nu));
        }
        if (kind == "product_sequence") {
            check_keys(b, {"kind", "dist", "tail"});
            const StateSpace& space = header_space(b);
            std::vector<Distribution> prefix;
            for (const auto& e : b.entries) {
                if (e.key == "dist") prefix.push_back(entry_distribution(e, space));
            }
            std::optional<Distribution> tail;
            if (const Entry* e = find(b, "tail")) tail = entry_distribution(*e, space);
            if (prefix.empty() && !tail) {
                throw ParseError(b.line, "dist", "needs at least one 'dist' or a 'tail'");
            }
            return product_sequence(space, std::move(prefix), std::move(tail));
        }
        if (kind == "markov") {
            check_keys(b, {"kind", "row", "initial"});
            const StateSpace& space = header_space(b);
            std::vector<std::vector<double>> rows;
            for (const auto& e : b.entries) {
                if (e.key != "row") continue;
                std::vector<double> row = normalized_weights(e);
                if (static_cast<int>(row.size()) != space.size()) {
                    throw ParseError(e.line, "row", "expected " +
                                                        std::to_string(space.size()) +
                                                        " entries");
                }
                rows.push_back(std::move(row));
            }
            if (static_cast<int>(rows.size()) != space.size()) {
                throw ParseError(b.line, "row", "expected " + std::to_string(space.size()) +
                                                    " rows, got " +
                                                    std::to_string(rows.size()));
            }
            const Entry& init = need(b, "initial");
            Distribution initial = (init.values.size() == 1 && init.values[0] == "stationary")
                                       ? Distribution(stationary_vector(rows))
                                       : entry_distribution(init, space);
            MarkovSpec spec(space, std::move(rows), std::move(initial));
            markov_data_ = spec;
            return markov(std::move(spec));
        }
        if (kind == "transformation") {
            check_keys(b, {"kind", "map", "weights"});
            const StateSpace& space = header_space(b);
            const Entry& map_entry = need(b, "map");
            if (static_cast<int>(map_entry.values.size()) != space.size()) {
                throw ParseError(map_entry.line, "map", "expected " +
                                                            std::to_string(space.size()) +
                                                            " image states");
            }
            std::vector<int> map;
            for (const auto& tok : map_entry.values) {
                map.push_back(state_index(space, tok, map_entry.line, "map"));
            }
            Distribution nu = entry_distribution(need(b, "weights"), space);
            return from_transformation(TransformationSpec(space, std::move(map), std::move(nu)));
        }
        if (kind == "mix") {
            check_keys(b, {"kind", "t", "of"});
            const Entry& of = need(b, "of");
            if (of.values.size() != 2) throw ParseError(of.line, "of", "expected two processes");
            const auto& a = named_process(of.values[0], of.line);
            const auto& c = named_process(of.values[1], of.line);
            const Entry& te = need(b, "t");
            const double w = parse_number(te.values.at(0), te.line, "t");
            if (w < 0.0 || w > 1.0) throw ParseError(te.line, "t", "must lie in [0,1]");
            if (a.oracle.space() != c.oracle.space()) {
                throw ParseError(of.line, "of", "mixed processes live on different spaces");
            }
            return convex_mix(w, a.oracle, c.oracle);
        }
        if (kind == "product") {
            check_keys(b, {"kind", "of"});
            const Entry& of = need(b, "of");
            if (of.values.size() != 2) throw ParseError(of.line, "of", "expected two processes");
            return product_measure(named_process(of.values[0], of.line).oracle,
                                   named_process(of.values[1], of.line).oracle);
        }
        if (kind == "shift") {
            check_keys(b, {"kind", "of"});
            const Entry& of = need(b, "of");
            if (of.values.size() != 1) throw ParseError(of.line, "of", "expected one process");
            return shift_pushforward(named_process(of.values[0], of.line).oracle);
        }
        if (kind == "restriction") {
            check_keys(b, {"kind", "of", "indices", "stride"});
            const Entry& of = need(b, "of");
            const Entry& idx = need(b, "indices");
            IndexSequence r;
            for (const auto& tok : idx.values) {
                r.prefix.push_back(parse_integer(tok, idx.line, "indices"));
            }
            if (const Entry* e = find(b, "stride")) {
                r.tail_stride = parse_integer(e->values.at(0), e->line, "stride");
            }
            try {
                return restriction_pushforward(named_process(of.values.at(0), of.line).oracle,
                                               std::move(r));
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception& ex) {
                throw ParseError(idx.line, "indices", ex.what());
            }
        }
        if (kind == "dilation" || kind == "block_recode") {
            check_keys(b, {"kind", "of", "k"});
            const Entry& of = need(b, "of");
            const Entry& ke = need(b, "k");
            const long k = parse_integer(ke.values.at(0), ke.line, "k");
            if (k < 1) throw ParseError(ke.line, "k", "must be >= 1");
            const auto& src = named_process(of.values.at(0), of.line);
            return kind == "dilation" ? dilation_pushforward(src.oracle, static_cast<int>(k))
                                      : block_recode(src.oracle, static_cast<int>(k));
        }
        if (kind == "factor") {
            check_keys(b, {"kind", "of", "space", "map"});
            const Entry& of = need(b, "of");
            const auto& src = named_process(of.values.at(0), of.line);
            const Entry& sp = need(b, "space");
            const StateSpace& target = named_space(sp.values.at(0), sp.line);
            const Entry& map_entry = need(b, "map");
            if (map_entry.values.size() != static_cast<std::size_t>(src.oracle.space().size())) {
                throw ParseError(map_entry.line, "map",
                                 "expected one image per source state (" +
                                     std::to_string(src.oracle.space().size()) + ")");
            }
            std::vector<int> f;
            for (const auto& tok : map_entry.values) {
                f.push_back(state_index(target, tok, map_entry.line, "map"));
            }
            return factor_pushforward(std::span<const int>(f), target, src.oracle);
        }
        throw ParseError(kind_entry_line(b), "kind", "unknown process kind '" + kind + "'");
    }

    static int kind_entry_line(const Block& b) {
        const Entry* e = find(b, "kind");
        return e ? e->line : b.line;
    }
};

const StateSpace& SpecModel::space(const std::string& name) const {
    for (const auto& [n, s] : spaces_) {
        if (n == name) return s;
    }
    throw std::invalid_argument("unknown space '" + name + "'");
}

const SpecModel::ProcessEntry& SpecModel::process(const std::string& name) const {
    for (const auto& p : processes_) {
        if (p.name == name) return p;
    }
    throw std::invalid_argument("unknown process '" + name + "'");
}

const Partition& SpecModel::partition(const std::string& name) const {
    for (const auto& [n, p] : partitions_) {
        if (n == name) return p;
    }
    throw std::invalid_argument("unknown partition '" + name + "'");
}

bool SpecModel::has_partition(const std::string& name) const {
    for (const auto& [n, p] : partitions_) {
        if (n == name) return true;
    }
    return false;
}

const Sft& SpecModel::sft(const std::string& name) const {
    for (const auto& [n, s] : sfts_) {
        if (n == name) return s;
    }
    throw std::invalid_argument("unknown sft '" + name + "'");
}

std::vector<std::string> SpecModel::space_names() const {
    std::vector<std::string> out;
    for (const auto& [n, s] : spaces_) out.push_back(n);
    return out;
}

std::vector<std::string> SpecModel::process_names() const {
    std::vector<std::string> out;
    for (const auto& p : processes_) out.push_back(p.name);
    return out;
}

std::vector<std::string> SpecModel::partition_names() const {
    std::vector<std::string> out;
    for (const auto& [n, p] : partitions_) out.push_back(n);
    return out;
}

std::vector<std::string> SpecModel::sft_names() const {
    std::vector<std::string> out;
    for (const auto& [n, s] : sfts_) out.push_back(n);
    return out;
}

SpecModel parse_spec(const std::string& text) {
    SpecModelBuilder builder(text);
    return builder.take();
}

SpecModel parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

}  // namespace stodyn
