#include "stodyn/csv.hpp"
#include "stodyn/entropy.hpp"
#include "stodyn/properties.hpp"
#include "stodyn/specfile.hpp"
#include "stodyn/topological.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

struct CommonFlags {
    std::string spec_path;
    std::optional<int> horizon;
    std::optional<long> budget;
    std::optional<std::string> log_base;
    std::optional<std::uint64_t> seed;
};

stodyn::RunParams effective_run(const stodyn::SpecModel* model, const CommonFlags& flags) {
    stodyn::RunParams run = model ? model->run() : stodyn::RunParams{};
    if (flags.horizon) run.horizon = *flags.horizon;
    if (flags.budget) run.budget = static_cast<std::size_t>(*flags.budget);
    if (flags.seed) run.seed = *flags.seed;
    if (flags.log_base) {
        run.log_base = *flags.log_base == "2" ? stodyn::LogBase::two : stodyn::LogBase::natural;
    }
    return run;
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n') c = ';';
    }
    return s;
}

// Emits the per-n rows for one process and returns the block values, or
// nothing when the budget was exhausted (partial rows already written).
std::optional<stodyn::EntropySeries> emit_series_rows(const stodyn::CylinderOracle& oracle,
                                                      const stodyn::Partition& partition,
                                                      const stodyn::RunParams& run,
                                                      const std::string& row_prefix) {
    const double scale = stodyn::log_scale(run.log_base);
    stodyn::EnumOptions options{run.budget, 1};
    stodyn::EntropySeries series;
    series.horizon = run.horizon;
    series.source_stationary = oracle.declared_stationary();
    double prev = 0.0;
    for (int n = 1; n <= run.horizon; ++n) {
        double e = 0.0;
        try {
            e = stodyn::block_entropy(oracle, partition, n, options);
        } catch (const stodyn::BudgetError& ex) {
            std::cerr << "error: " << ex.what() << " (completed n=" << n - 1 << ")\n";
            return std::nullopt;
        }
        series.block_values.push_back(e);
        series.values.push_back(e / n);
        std::cout << row_prefix << n << "," << stodyn::csv_num(e * scale) << ","
                  << stodyn::csv_num(e / n * scale) << "," << stodyn::csv_num((e - prev) * scale)
                  << "\n";
        prev = e;
    }
    return series;
}

int cmd_entropy(const CommonFlags& flags, const std::string& process_name,
                const std::string& partition_name) {
    stodyn::SpecModel model = stodyn::parse_spec_file(flags.spec_path);
    const stodyn::RunParams run = effective_run(&model, flags);
    const auto& entry = model.process(process_name);
    stodyn::Partition partition =
        partition_name == "singletons" && !model.has_partition(partition_name)
            ? stodyn::Partition::singletons(entry.oracle.space())
            : model.partition(partition_name);
    if (partition.space() != entry.oracle.space()) {
        throw std::invalid_argument("partition '" + partition_name +
                                    "' is over a different state space than process '" +
                                    process_name + "'");
    }
    const double scale = stodyn::log_scale(run.log_base);

    std::cout << "n,block_entropy,per_symbol,increment\n";
    auto series = emit_series_rows(entry.oracle, partition, run, "");
    if (!series) return kExitBudget;

    stodyn::HsdEstimate est = stodyn::hsd_estimate(*series);
    std::cout << "estimate," << stodyn::csv_num(est.value * scale) << ",,\n";
    std::cout << "policy," << sanitize(est.policy) << ",,\n";

    std::optional<double> closed;
    if (entry.kind == "markov" && entry.markov_data && entry.markov_data->stationary() &&
        partition.same_cells(stodyn::Partition::singletons(entry.oracle.space()))) {
        closed = stodyn::markov_closed_form(*entry.markov_data);
    } else if (entry.kind == "iid" && entry.iid_weights) {
        closed = stodyn::iid_closed_form(*entry.iid_weights, partition);
    }
    if (closed) {
        std::cout << "closed_form," << stodyn::csv_num(*closed * scale) << ",,\n";
        std::cout << "gap," << stodyn::csv_num((est.value - *closed) * scale) << ",,\n";
    }
    if (!est.note.empty()) std::cerr << "note: " << est.note << "\n";
    return kExitOk;
}

int cmd_topological(const CommonFlags& flags, const std::string& sft_name) {
    stodyn::SpecModel model = stodyn::parse_spec_file(flags.spec_path);
    const stodyn::RunParams run = effective_run(&model, flags);
    const stodyn::Sft& sft = model.sft(sft_name);
    const double scale = stodyn::log_scale(run.log_base);
    const int horizon = std::max(2, run.horizon);

    for (const auto& warning : sft.trim_warnings()) std::cerr << "warning: " << warning << "\n";

    std::cout << "n,word_count,per_symbol\n";
    for (int n = 1; n <= horizon; ++n) {
        const std::uint64_t count = stodyn::word_complexity(sft, n);
        std::cout << n << "," << count << ",";
        if (count == 0) {
            std::cout << "empty";
        } else {
            std::cout << stodyn::csv_num(std::log(static_cast<double>(count)) / n * scale);
        }
        std::cout << "\n";
    }
    stodyn::HtEstimate ht = stodyn::ht_estimate(sft, horizon);
    if (ht.empty) {
        std::cout << "ht_exact,empty,\n";
        return kExitOk;
    }
    std::cout << "ht_exact," << stodyn::csv_num(ht.exact * scale) << ",\n";
    try {
        stodyn::MarkovSpec parry = stodyn::parry_measure(sft);
        std::string initial;
        for (int i = 0; i < parry.space().size(); ++i) {
            if (i) initial += ";";
            initial += stodyn::csv_num(parry.initial().weight(i));
        }
        std::cout << "parry_initial," << initial << ",\n";
        for (int i = 0; i < parry.space().size(); ++i) {
            std::string row;
            for (int j = 0; j < parry.space().size(); ++j) {
                if (j) row += ";";
                row += stodyn::csv_num(parry.transition()[static_cast<std::size_t>(i)]
                                                         [static_cast<std::size_t>(j)]);
            }
            std::cout << "parry_row," << sanitize(parry.space().label(i)) << "," << row << "\n";
        }
        std::cout << "parry_entropy,"
                  << stodyn::csv_num(stodyn::markov_closed_form(parry) * scale) << ",\n";
    } catch (const std::invalid_argument&) {
        // Reducible transition structure: report the components instead.
        for (const auto& comp : stodyn::strongly_connected_components(sft.allowed())) {
            std::string labels;
            for (std::size_t i = 0; i < comp.size(); ++i) {
                if (i) labels += ";";
                labels += sanitize(sft.space().label(comp[i]));
            }
            std::cout << "component," << labels << ",\n";
        }
    }
    return kExitOk;
}

int cmd_verify(const CommonFlags& flags, const std::string& filter) {
    std::optional<stodyn::SpecModel> model;
    if (!flags.spec_path.empty()) model = stodyn::parse_spec_file(flags.spec_path);
    const stodyn::RunParams run = effective_run(model ? &*model : nullptr, flags);

    stodyn::CheckConfig config;
    config.budget = run.budget;
    if (flags.horizon) config.horizon = run.horizon;

    std::vector<stodyn::CheckReport> reports;
    if (filter.empty()) {
        reports = stodyn::run_all(config, run.seed);
    } else {
        reports.push_back(stodyn::run_check(filter, config, run.seed));
    }
    std::cout << stodyn::reports_to_csv(reports);
    std::cerr << stodyn::reports_to_text(reports);
    return stodyn::all_pass(reports) ? kExitOk : kExitVerifyFailed;
}

int cmd_sweep(const CommonFlags& flags) {
    stodyn::SpecModel model = stodyn::parse_spec_file(flags.spec_path);
    const stodyn::RunParams run = effective_run(&model, flags);
    std::cout << "process,n,block_entropy,per_symbol,increment\n";
    bool budget_hit = false;
    for (const auto& name : model.process_names()) {
        const auto& entry = model.process(name);
        stodyn::Partition fine = stodyn::Partition::singletons(entry.oracle.space());
        auto series = emit_series_rows(entry.oracle, fine, run, sanitize(name) + ",");
        if (!series) budget_hit = true;
    }
    return budget_hit ? kExitBudget : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy of finite-state stochastic processes and subshifts"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string process_name;
    std::string partition_name = "singletons";
    std::string sft_name;
    std::string filter;

    auto add_common = [&](CLI::App* cmd, bool spec_required) {
        auto* opt = cmd->add_option("--spec", flags.spec_path, "process/subshift description file");
        if (spec_required) opt->required();
        cmd->add_option("--horizon", flags.horizon, "series horizon N");
        cmd->add_option("--budget", flags.budget, "enumeration leaf budget");
        cmd->add_option("--log-base", flags.log_base, "display log base: e or 2")
            ->check(CLI::IsMember({"e", "2"}));
        cmd->add_option("--seed", flags.seed, "seed for randomized checks");
    };

    CLI::App* entropy_cmd =
        app.add_subcommand("entropy", "block-entropy series of one declared process");
    add_common(entropy_cmd, true);
    entropy_cmd->add_option("--process", process_name, "process name")->required();
    entropy_cmd->add_option("--partition", partition_name,
                            "partition name, or 'singletons' (default)");

    CLI::App* topo_cmd =
        app.add_subcommand("topological", "word counts and topological entropy of a subshift");
    add_common(topo_cmd, true);
    topo_cmd->add_option("--sft", sft_name, "subshift name")->required();

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the theorem verification suite");
    add_common(verify_cmd, false);
    verify_cmd->add_option("--filter", filter, "run a single named check");

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "entropy series for every process in the spec");
    add_common(sweep_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(entropy_cmd)) return cmd_entropy(flags, process_name, partition_name);
        if (app.got_subcommand(topo_cmd)) return cmd_topological(flags, sft_name);
        if (app.got_subcommand(verify_cmd)) return cmd_verify(flags, filter);
        if (app.got_subcommand(sweep_cmd)) return cmd_sweep(flags);
    } catch (const stodyn::BudgetError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
