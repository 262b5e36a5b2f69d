// tsetlin: dataset generation, training, evaluation, sweeps and table
// reproduction for classic and multigranular Tsetlin machines.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsetlin/tsetlin.hpp"

namespace {

using namespace tsetlin;

// Published reference accuracies (percent), shown beside reproduced values.
struct SyntheticReference {
    std::size_t clauses;
    double tm_specificity;
    double tm_threshold;
    double tm_200, tm_500;
    double mtm_threshold;
    double mtm_200, mtm_500;
};

constexpr SyntheticReference kSyntheticReference[] = {
    {10, 110, 0.1, 75.7, 78.2, 0.16, 76.1, 78.0},
    {20, 100, 0.06, 76.6, 78.2, 0.08, 78.8, 78.4},
    {50, 50, 0.04, 88.4, 89.2, 0.04, 88.5, 88.2},
    {100, 60, 0.03, 94.3, 95.9, 0.02, 93.2, 95.2},
    {500, 35, 0.01, 97.8, 98.0, 0.01, 98.0, 98.0},
};

struct IrisColumn {
    const char* name;
    std::size_t clauses;
    std::optional<double> specificity;  // nullopt: multigranular
    double threshold;
    double reference[4];  // at epochs 100, 200, 300, 500
};

constexpr std::size_t kIrisEpochs[] = {100, 200, 300, 500};

const IrisColumn kIrisReference[] = {
    {"TM m=100 s=5 T=0.2", 100, 5.0, 0.2, {95.1, 95.3, 95.1, 95.2}},
    {"TM m=500 s=5 T=0.2", 500, 5.0, 0.2, {95.5, 95.6, 95.7, 95.7}},
    {"MTM m=100 T=0.05", 100, std::nullopt, 0.05, {94.2, 94.5, 94.5, 94.7}},
    {"MTM m=500 T=0.03", 500, std::nullopt, 0.03, {95.0, 94.6, 94.9, 95.0}},
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs, epochs, clauses;
    std::optional<double> threshold, specificity, range_low, range_high;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Base seed");
        cmd->add_option("--runs", runs, "Independent runs per split");
        cmd->add_option("--epochs", epochs, "Training epochs");
        cmd->add_option("--clauses", clauses, "Clause count m (even)");
        cmd->add_option("--threshold", threshold, "Relative threshold T in (0, 1]");
        cmd->add_option("--specificity", specificity, "Specificity s (classic machines only)");
        cmd->add_option("--range-low", range_low, "Lowest scheduled specificity (multigranular)");
        cmd->add_option("--range-high", range_high, "Highest scheduled specificity (multigranular)");
    }

    void apply(ExperimentSpec& spec) const {
        if (seed) spec.seed = *seed;
        if (runs) spec.runs = *runs;
        if (epochs) {
            spec.epochs = *epochs;
            spec.checkpoints.clear();
        }
        if (clauses) spec.clauses = *clauses;
        if (threshold) spec.threshold = *threshold;
        if (auto* classic = std::get_if<ClassicMachine>(&spec.machine)) {
            if (range_low || range_high) {
                throw SpecError("--range-low/--range-high apply to multigranular specs only");
            }
            if (specificity) classic->specificity = *specificity;
        } else {
            if (specificity) {
                throw SpecError("--specificity is not accepted: multigranular machines take no "
                                "global specificity");
            }
            auto& range = std::get<MultigranularMachine>(spec.machine).range;
            if (range_low) range.lower = *range_low;
            if (range_high) range.upper = *range_high;
        }
    }
};

OutputFormat parse_format(const std::string& name) {
    return name == "json" ? OutputFormat::Json : OutputFormat::Csv;
}

std::string percent(double accuracy) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * accuracy);
    return buf;
}

std::string percent_ref(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", value);
    return buf;
}

void print_summary(const ExperimentSpec& spec, const RunResult& r) {
    std::printf("machine: %s, clauses: %zu, T_abs: %d, units: %zu\n",
                spec.is_multigranular() ? "multigranular" : "classic", spec.clauses,
                r.threshold_abs, r.units.size());
    std::printf("%8s  %10s  %8s\n", "epoch", "accuracy", "stddev");
    for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
        std::printf("%8zu  %10s  %8.4f\n", r.checkpoints[c], percent(r.mean[c]).c_str(),
                    r.stddev[c]);
    }
}

int cmd_synthesize(std::size_t count, std::uint64_t seed, int variables, const std::string& out) {
    if (variables != 6 && variables != 7) throw SpecError("--variables must be 6 or 7");
    Rng rng(derive_seed(seed, SeedStream::Data, 0));
    const auto ds = generate_synthetic(count, rng, static_cast<SyntheticLayout>(variables));
    save_fixture(out, ds);
    std::printf("wrote %zu examples to %s\n", ds.rows(), out.c_str());
    return 0;
}

int cmd_train(const std::string& spec_path, const Overrides& overrides, const std::string& model_out,
              const std::string& result_out, const std::string& format, bool table,
              unsigned threads) {
    auto spec = load_spec(spec_path);
    overrides.apply(spec);
    Machine first = ClausePool::classic(1, 2, 1.0, 1.0);
    RunOptions options{threads, model_out.empty() ? nullptr : &first};
    const auto result = run_experiment(spec, options);
    if (!model_out.empty()) save_machine(model_out, first);
    if (!result_out.empty()) emit_results(result, parse_format(format), result_out);
    if (table) {
        print_summary(spec, result);
    } else {
        std::printf("%s\n", format_number(result.final_mean()).c_str());
    }
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, bool iris) {
    const Machine machine = load_machine(model_path);
    const std::string path = resolve_data_path(data_path);
    const auto data = iris ? load_iris(path) : load_fixture(path);
    if (data.feature_dim() != feature_dim(machine)) {
        throw FormatError("dataset has " + std::to_string(data.feature_dim()) +
                          " features, model expects " + std::to_string(feature_dim(machine)));
    }
    std::printf("%s\n", format_number(accuracy(machine, data)).c_str());
    return 0;
}

int cmd_sweep(const std::string& spec_path, const Overrides& overrides,
              std::vector<double> s_values, std::vector<double> t_values, const std::string& out,
              const std::string& format, unsigned threads) {
    auto spec = load_spec(spec_path);
    overrides.apply(spec);
    if (spec.is_multigranular()) {
        if (!s_values.empty()) throw SpecError("--s-values is not accepted: multigranular machines take no global "
                            "specificity");
    } else if (s_values.empty()) {
        s_values = {2, 5, 10, 20, 35, 50, 65, 100, 150, 200};
    }
    if (t_values.empty()) t_values = {0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3};
    const auto grid = grid_search(spec, s_values, t_values, {threads});
    if (!out.empty()) {
        emit_results(grid, parse_format(format), out);
    } else if (parse_format(format) == OutputFormat::Json) {
        std::cout << to_json(grid).dump(2) << '\n';
    } else {
        write_csv(std::cout, grid);
    }
    if (const auto best = grid.best()) {
        std::fprintf(stderr, "best: T=%s", format_number(grid.t_values[best->col]).c_str());
        if (!grid.multigranular) {
            std::fprintf(stderr, " s=%s", format_number(grid.s_values[best->row]).c_str());
        }
        std::fprintf(stderr, " accuracy=%s\n", format_number(best->accuracy).c_str());
    }
    if (grid.missing() > 0) std::fprintf(stderr, "%zu cell(s) failed\n", grid.missing());
    return 0;
}

ExperimentSpec synthetic_spec(std::size_t clauses, std::optional<double> s, double t,
                              std::size_t epochs, std::size_t runs, std::uint64_t seed) {
    ExperimentSpec spec;
    if (s) {
        spec.machine = ClassicMachine{*s};
    } else {
        spec.machine = MultigranularMachine{};
    }
    spec.clauses = clauses;
    spec.threshold = t;
    spec.epochs = epochs;
    spec.runs = runs;
    spec.seed = seed;
    spec.dataset = SyntheticSource{};
    return spec;
}

std::vector<std::size_t> checkpoints_within(std::initializer_list<std::size_t> wanted,
                                            std::size_t epochs) {
    std::vector<std::size_t> out;
    for (std::size_t c : wanted) {
        if (c < epochs) out.push_back(c);
    }
    out.push_back(epochs);
    return out;
}

// Value at checkpoint `epoch`, or "-" when the run was too short to reach it.
std::string at_epoch(const RunResult& r, std::size_t epoch) {
    for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
        if (r.checkpoints[c] == epoch) return percent(r.mean[c]);
    }
    return "-";
}

int reproduce_table1(std::size_t runs, std::uint64_t seed, std::size_t epochs, unsigned threads,
                     int variables) {
    std::printf("Synthetic task, %zu run(s), seed %llu, %d variables. Columns: published / reproduced.\n",
                runs, static_cast<unsigned long long>(seed), variables);
    std::printf("%7s %5s %6s | %15s %15s | %6s | %15s %15s\n", "clauses", "s", "T", "TM@200",
                "TM@500", "T", "MTM@200", "MTM@500");
    for (const auto& row : kSyntheticReference) {
        auto tm = synthetic_spec(row.clauses, row.tm_specificity, row.tm_threshold, epochs, runs, seed);
        auto mtm = synthetic_spec(row.clauses, std::nullopt, row.mtm_threshold, epochs, runs, seed);
        const auto layout = static_cast<SyntheticLayout>(variables);
        tm.dataset = mtm.dataset = SyntheticSource{300, layout};
        tm.checkpoints = mtm.checkpoints = checkpoints_within({200, 500}, epochs);
        const auto tm_r = run_experiment(tm, {threads});
        const auto mtm_r = run_experiment(mtm, {threads});
        auto cell = [](double ref, const std::string& ours) {
            return percent_ref(ref) + " / " + ours;
        };
        std::printf("%7zu %5g %6g | %15s %15s | %6g | %15s %15s\n", row.clauses,
                    row.tm_specificity, row.tm_threshold,
                    cell(row.tm_200, at_epoch(tm_r, 200)).c_str(),
                    cell(row.tm_500, at_epoch(tm_r, 500)).c_str(), row.mtm_threshold,
                    cell(row.mtm_200, at_epoch(mtm_r, 200)).c_str(),
                    cell(row.mtm_500, at_epoch(mtm_r, 500)).c_str());
        std::fflush(stdout);
    }
    return 0;
}

int reproduce_table2(std::size_t runs, std::uint64_t seed, std::size_t epochs, unsigned threads,
                     const std::string& iris_path, std::size_t splits) {
    std::printf("Iris (3+2 bit encoding), %zu split(s) x %zu run(s), seed %llu. "
                "Cells: published / reproduced.\n",
                splits, runs, static_cast<unsigned long long>(seed));
    std::vector<RunResult> results;
    for (const auto& col : kIrisReference) {
        ExperimentSpec spec;
        if (col.specificity) {
            spec.machine = ClassicMachine{*col.specificity};
        } else {
            spec.machine = MultigranularMachine{};
        }
        spec.clauses = col.clauses;
        spec.threshold = col.threshold;
        spec.epochs = epochs;
        spec.runs = runs;
        spec.seed = seed;
        spec.splits = SplitPlan{splits, 0.2};
        spec.dataset = IrisSource{iris_path, {}};
        spec.checkpoints = checkpoints_within({100, 200, 300}, epochs);
        results.push_back(run_experiment(spec, {threads}));
    }
    std::printf("%5s", "epoch");
    for (const auto& col : kIrisReference) std::printf(" | %19s", col.name);
    std::printf("\n");
    for (std::size_t e = 0; e < std::size(kIrisEpochs); ++e) {
        std::printf("%5zu", kIrisEpochs[e]);
        for (std::size_t k = 0; k < results.size(); ++k) {
            const std::string cell =
                percent_ref(kIrisReference[k].reference[e]) + " / " + at_epoch(results[k], kIrisEpochs[e]);
            std::printf(" | %19s", cell.c_str());
        }
        std::printf("\n");
    }
    return 0;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    for (;;) {
        const auto end = text.find(',', start);
        const std::string item = text.substr(start, end == std::string::npos ? end : end - start);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw CLI::ValidationError("'" + item + "' is not a number");
        out.push_back(v);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef TSETLIN_SOURCE_DATA_DIR
    // Default data directory: the bundled data/ tree.
    ::setenv("TSETLIN_DATA_DIR", TSETLIN_SOURCE_DATA_DIR, 0);
#endif
    CLI::App app{"Classic and multigranular Tsetlin machines"};
    app.require_subcommand(1, 1);

    auto* synth = app.add_subcommand("synthesize", "Write a synthetic dataset fixture");
    std::size_t synth_count = 300;
    std::uint64_t synth_seed = 0;
    int synth_vars = 6;
    std::string synth_out;
    synth->add_option("--count", synth_count, "Examples to generate")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();
    synth->add_option("--variables", synth_vars, "Layout: 6 or 7 variables")->capture_default_str();
    synth->add_option("--out", synth_out, "Output fixture path")->required();

    Overrides train_over, sweep_over;
    unsigned threads = 1;

    auto* train = app.add_subcommand("train", "Run one experiment spec; save model and results");
    std::string train_spec, train_model, train_result, train_format = "csv";
    bool train_table = false;
    train->add_option("--spec", train_spec, "Experiment spec (JSON)")->required();
    train->add_option("--out", train_model, "Model output path (first run, first split)");
    train->add_option("--result", train_result, "RunResult output path");
    train->add_option("--format", train_format, "Result format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    train->add_flag("--table", train_table, "Print a per-checkpoint summary table");
    train->add_option("--threads", threads, "Worker threads for independent units");
    train_over.add_to(train);

    auto* eval = app.add_subcommand("eval", "Score a saved model on a dataset");
    std::string eval_model, eval_data;
    bool eval_iris = false;
    eval->add_option("--model", eval_model, "Model file")->required();
    eval->add_option("--data", eval_data, "Dataset fixture")->required();
    eval->add_flag("--iris", eval_iris, "Read --data as UCI Iris rows instead of a fixture");

    auto* sweep = app.add_subcommand("sweep", "Grid search over specificity and threshold");
    std::string sweep_spec, sweep_out, sweep_format = "csv", s_text, t_text;
    sweep->add_option("--spec", sweep_spec, "Base experiment spec (JSON)")->required();
    sweep->add_option("--s-values", s_text, "Comma-separated specificities (classic only)");
    sweep->add_option("--t-values", t_text, "Comma-separated relative thresholds");
    sweep->add_option("--out", sweep_out, "Output path (default: standard output)");
    sweep->add_option("--format", sweep_format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sweep->add_option("--threads", threads, "Worker threads for independent units");
    sweep_over.add_to(sweep);

    auto* repro = app.add_subcommand("reproduce", "Rerun the published table configurations");
    std::string which;
    std::size_t repro_runs = 10, repro_epochs = 500, repro_splits = 10;
    std::uint64_t repro_seed = 42;
    int repro_vars = 6;
    std::string repro_iris = "iris.data";
    repro->add_option("table", which, "table1 (synthetic) or table2 (Iris)")
        ->required()
        ->check(CLI::IsMember({"table1", "table2"}));
    repro->add_option("--runs", repro_runs, "Runs per configuration (per split)")->capture_default_str();
    repro->add_option("--seed", repro_seed, "Base seed")->capture_default_str();
    repro->add_option("--epochs", repro_epochs, "Training epochs")->capture_default_str();
    repro->add_option("--splits", repro_splits, "Iris train/test splits")->capture_default_str();
    repro->add_option("--variables", repro_vars, "Synthetic layout: 6 or 7")->capture_default_str();
    repro->add_option("--iris", repro_iris, "Iris data file")->capture_default_str();
    repro->add_option("--threads", threads, "Worker threads for independent units");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return cmd_synthesize(synth_count, synth_seed, synth_vars, synth_out);
        if (*train) {
            return cmd_train(train_spec, train_over, train_model, train_result, train_format,
                             train_table, threads);
        }
        if (*eval) return cmd_eval(eval_model, eval_data, eval_iris);
        if (*sweep) {
            return cmd_sweep(sweep_spec, sweep_over, parse_list(s_text), parse_list(t_text),
                             sweep_out, sweep_format, threads);
        }
        if (*repro) {
            if (repro_vars != 6 && repro_vars != 7) throw SpecError("--variables must be 6 or 7");
            return which == "table1"
                       ? reproduce_table1(repro_runs, repro_seed, repro_epochs, threads, repro_vars)
                       : reproduce_table2(repro_runs, repro_seed, repro_epochs, threads, repro_iris,
                                          repro_splits);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "tsetlin: error: %s\n", e.what());
        return 1;
    }
    return 1;
}
