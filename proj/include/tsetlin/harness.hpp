#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tsetlin/data.hpp"
#include "tsetlin/errors.hpp"
#include "tsetlin/machine.hpp"
#include "tsetlin/multigranular.hpp"
#include "tsetlin/random.hpp"

namespace tsetlin {

// ---------------------------------------------------------------------------
// Experiment specs
// ---------------------------------------------------------------------------

struct ClassicMachine {
    double specificity = 0.0;
    friend bool operator==(const ClassicMachine&, const ClassicMachine&) = default;
};

/// Structurally has no global specificity: the schedule replaces it.
struct MultigranularMachine {
    SpecificityRange range;
    friend bool operator==(const MultigranularMachine&, const MultigranularMachine&) = default;
};

using MachineConfig = std::variant<ClassicMachine, MultigranularMachine>;

struct SyntheticSource {
    std::size_t count = 300;  ///< size of both the training and the test set
    SyntheticLayout layout = SyntheticLayout::SixVariable;
    friend bool operator==(const SyntheticSource&, const SyntheticSource&) = default;
};

struct IrisSource {
    std::string path;
    FixedPointEncoding encoding;
    friend bool operator==(const IrisSource&, const IrisSource&) = default;
};

/// Text fixture. With test_path set the two files are used as given;
/// otherwise the experiment must request random splits.
struct FixtureSource {
    std::string path;
    std::string test_path;
    friend bool operator==(const FixtureSource&, const FixtureSource&) = default;
};

using DataSource = std::variant<SyntheticSource, IrisSource, FixtureSource>;

struct SplitPlan {
    std::size_t count = 10;
    double test_fraction = 0.2;
    friend bool operator==(const SplitPlan&, const SplitPlan&) = default;
};

struct ExperimentSpec {
    MachineConfig machine = MultigranularMachine{};
    std::size_t clauses = 100;
    double threshold = 0.05;
    std::size_t epochs = 100;
    DataSource dataset = SyntheticSource{};
    std::size_t runs = 1;
    std::optional<SplitPlan> splits;
    std::uint64_t seed = 0;
    std::vector<std::size_t> checkpoints;  ///< empty means {epochs}
    int states_per_action = kDefaultStatesPerAction;

    bool is_multigranular() const noexcept {
        return std::holds_alternative<MultigranularMachine>(machine);
    }

    std::vector<std::size_t> resolved_checkpoints() const {
        if (checkpoints.empty()) return {epochs};
        auto out = checkpoints;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Every problem with this experiment, one message per offending field.
    std::vector<std::string> problems() const {
        std::vector<std::string> p;
        if (clauses < 2 || clauses % 2 != 0) p.push_back("clauses: must be even and >= 2");
        if (is_multigranular() && clauses < 4) {
            p.push_back("clauses: multigranular machines need >= 4 (2 per polarity)");
        }
        if (!(threshold > 0.0 && threshold <= 1.0)) p.push_back("threshold: must lie in (0, 1]");
        if (epochs < 1) p.push_back("epochs: must be >= 1");
        if (runs < 1) p.push_back("runs: must be >= 1");
        if (states_per_action < 1) p.push_back("states_per_action: must be >= 1");
        for (std::size_t c : checkpoints) {
            if (c < 1 || c > epochs) {
                p.push_back("checkpoints: " + std::to_string(c) + " is outside [1, epochs]");
            }
        }
        if (const auto* classic = std::get_if<ClassicMachine>(&machine)) {
            if (!(classic->specificity >= 1.0)) p.push_back("machine.specificity: must be >= 1");
        } else {
            const auto& range = std::get<MultigranularMachine>(machine).range;
            if (!(range.lower >= 1.0 && range.lower <= range.upper)) {
                p.push_back("machine.range: need 1 <= range_low <= range_high");
            }
        }
        if (splits) {
            if (splits->count < 1) p.push_back("splits.count: must be >= 1");
            if (!(splits->test_fraction > 0.0 && splits->test_fraction < 1.0)) {
                p.push_back("splits.test_fraction: must lie in (0, 1)");
            }
        }
        std::visit(
            [&](const auto& src) {
                using T = std::decay_t<decltype(src)>;
                if constexpr (std::is_same_v<T, SyntheticSource>) {
                    if (src.count < 1) p.push_back("dataset.count: must be >= 1");
                    if (splits) p.push_back("splits: synthetic data is generated pre-split");
                } else if constexpr (std::is_same_v<T, IrisSource>) {
                    if (src.path.empty()) p.push_back("dataset.path: required");
                    if (src.encoding.width() < 1) p.push_back("dataset: encoding needs >= 1 bit");
                    if (!splits) p.push_back("splits: required for iris data");
                } else {
                    if (src.path.empty()) p.push_back("dataset.path: required");
                    if (src.test_path.empty() && !splits) {
                        p.push_back("splits: required when dataset.test_path is absent");
                    }
                    if (!src.test_path.empty() && splits) {
                        p.push_back("splits: not allowed together with dataset.test_path");
                    }
                }
            },
            dataset);
        return p;
    }

    void validate() const {
        const auto p = problems();
        if (p.empty()) return;
        std::string msg = "invalid experiment spec:";
        for (const auto& s : p) msg += "\n  " + s;
        throw SpecError(msg);
    }

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

// ---------------------------------------------------------------------------
// Spec <-> JSON. Unknown keys are rejected. See docs/experiment_spec.md.
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed,
                           std::vector<std::string>& problems) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) problems.push_back(where + key + ": unknown key");
    }
}

template <typename T>
std::optional<T> read_field(const json& obj, const char* key, const std::string& where,
                            std::vector<std::string>& problems, bool required) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) problems.push_back(where + key + ": required");
        return std::nullopt;
    }
    try {
        if constexpr (std::is_unsigned_v<T>) {
            if (!it->is_number_integer() || (!it->is_number_unsigned() && it->template get<long long>() < 0)) {
                throw std::invalid_argument("not a nonnegative integer");
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) throw std::invalid_argument("not an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) throw std::invalid_argument("not a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) throw std::invalid_argument("not a string");
        }
        return it->get<T>();
    } catch (const std::exception& e) {
        problems.push_back(where + key + ": " + e.what());
        return std::nullopt;
    }
}

inline std::string env_data_dir() {
    const char* dir = std::getenv("TSETLIN_DATA_DIR");
    return dir ? std::string(dir) : std::string();
}

}  // namespace detail

inline nlohmann::json to_json(const ExperimentSpec& spec) {
    using nlohmann::json;
    json j;
    if (const auto* c = std::get_if<ClassicMachine>(&spec.machine)) {
        j["machine"] = {{"type", "classic"}, {"specificity", c->specificity}};
    } else {
        const auto& r = std::get<MultigranularMachine>(spec.machine).range;
        j["machine"] = {{"type", "multigranular"}, {"range_low", r.lower}, {"range_high", r.upper}};
    }
    j["clauses"] = spec.clauses;
    j["threshold"] = spec.threshold;
    j["epochs"] = spec.epochs;
    j["runs"] = spec.runs;
    j["seed"] = spec.seed;
    j["states_per_action"] = spec.states_per_action;
    if (!spec.checkpoints.empty()) j["checkpoints"] = spec.checkpoints;
    std::visit(
        [&](const auto& src) {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, SyntheticSource>) {
                j["dataset"] = {{"type", "synthetic"},
                                {"count", src.count},
                                {"variables", synthetic_features(src.layout)}};
            } else if constexpr (std::is_same_v<T, IrisSource>) {
                j["dataset"] = {{"type", "iris"},
                                {"path", src.path},
                                {"int_bits", src.encoding.int_bits},
                                {"frac_bits", src.encoding.frac_bits}};
            } else {
                j["dataset"] = {{"type", "fixture"}, {"path", src.path}};
                if (!src.test_path.empty()) j["dataset"]["test_path"] = src.test_path;
            }
        },
        spec.dataset);
    if (spec.splits) {
        j["splits"] = {{"count", spec.splits->count}, {"test_fraction", spec.splits->test_fraction}};
    }
    return j;
}

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
    using detail::read_field;
    std::vector<std::string> problems;
    ExperimentSpec spec;
    if (!j.is_object()) throw SpecError("invalid experiment spec: document must be a JSON object");
    detail::reject_unknown(j, "",
                           {"machine", "clauses", "threshold", "epochs", "dataset", "runs",
                            "splits", "seed", "checkpoints", "states_per_action"},
                           problems);

    if (const auto it = j.find("machine"); it == j.end() || !it->is_object()) {
        problems.push_back("machine: required object");
    } else {
        const auto type = read_field<std::string>(*it, "type", "machine.", problems, true);
        if (type == "classic") {
            detail::reject_unknown(*it, "machine.", {"type", "specificity"}, problems);
            if (const auto s = read_field<double>(*it, "specificity", "machine.", problems, true)) {
                spec.machine = ClassicMachine{*s};
            }
        } else if (type == "multigranular") {
            if (it->contains("specificity")) {
                problems.push_back(
                    "machine.specificity: multigranular machines take no global specificity");
            }
            detail::reject_unknown(*it, "machine.", {"type", "range_low", "range_high", "specificity"},
                                   problems);
            MultigranularMachine mtm;
            if (auto v = read_field<double>(*it, "range_low", "machine.", problems, false)) {
                mtm.range.lower = *v;
            }
            if (auto v = read_field<double>(*it, "range_high", "machine.", problems, false)) {
                mtm.range.upper = *v;
            }
            spec.machine = mtm;
        } else if (type) {
            problems.push_back("machine.type: expected 'classic' or 'multigranular'");
        }
    }

    if (auto v = read_field<std::size_t>(j, "clauses", "", problems, true)) spec.clauses = *v;
    if (auto v = read_field<double>(j, "threshold", "", problems, true)) spec.threshold = *v;
    if (auto v = read_field<std::size_t>(j, "epochs", "", problems, true)) spec.epochs = *v;
    if (auto v = read_field<std::size_t>(j, "runs", "", problems, false)) spec.runs = *v;
    if (auto v = read_field<std::uint64_t>(j, "seed", "", problems, false)) spec.seed = *v;
    if (auto v = read_field<int>(j, "states_per_action", "", problems, false)) {
        spec.states_per_action = *v;
    }
    if (const auto it = j.find("checkpoints"); it != j.end()) {
        if (!it->is_array()) {
            problems.push_back("checkpoints: must be an array of epoch numbers");
        } else {
            for (const auto& c : *it) {
                if (!c.is_number_integer() || (!c.is_number_unsigned() && c.get<long long>() < 0)) {
                    problems.push_back("checkpoints: entries must be nonnegative integers");
                    break;
                }
                spec.checkpoints.push_back(c.get<std::size_t>());
            }
        }
    }

    if (const auto it = j.find("dataset"); it == j.end() || !it->is_object()) {
        problems.push_back("dataset: required object");
    } else {
        const auto type = read_field<std::string>(*it, "type", "dataset.", problems, true);
        if (type == "synthetic") {
            detail::reject_unknown(*it, "dataset.", {"type", "count", "variables"}, problems);
            SyntheticSource src;
            if (auto v = read_field<std::size_t>(*it, "count", "dataset.", problems, false)) {
                src.count = *v;
            }
            if (auto v = read_field<std::size_t>(*it, "variables", "dataset.", problems, false)) {
                if (*v == 6) {
                    src.layout = SyntheticLayout::SixVariable;
                } else if (*v == 7) {
                    src.layout = SyntheticLayout::SevenVariable;
                } else {
                    problems.push_back("dataset.variables: must be 6 or 7");
                }
            }
            spec.dataset = src;
        } else if (type == "iris") {
            detail::reject_unknown(*it, "dataset.", {"type", "path", "int_bits", "frac_bits"},
                                   problems);
            IrisSource src;
            if (auto v = read_field<std::string>(*it, "path", "dataset.", problems, true)) {
                src.path = *v;
            }
            if (auto v = read_field<std::size_t>(*it, "int_bits", "dataset.", problems, false)) {
                src.encoding.int_bits = *v;
            }
            if (auto v = read_field<std::size_t>(*it, "frac_bits", "dataset.", problems, false)) {
                src.encoding.frac_bits = *v;
            }
            spec.dataset = src;
        } else if (type == "fixture") {
            detail::reject_unknown(*it, "dataset.", {"type", "path", "test_path"}, problems);
            FixtureSource src;
            if (auto v = read_field<std::string>(*it, "path", "dataset.", problems, true)) {
                src.path = *v;
            }
            if (auto v = read_field<std::string>(*it, "test_path", "dataset.", problems, false)) {
                src.test_path = *v;
            }
            spec.dataset = src;
        } else if (type) {
            problems.push_back("dataset.type: expected 'synthetic', 'iris' or 'fixture'");
        }
    }

    if (const auto it = j.find("splits"); it != j.end()) {
        if (!it->is_object()) {
            problems.push_back("splits: must be an object");
        } else {
            detail::reject_unknown(*it, "splits.", {"count", "test_fraction"}, problems);
            SplitPlan plan;
            if (auto v = read_field<std::size_t>(*it, "count", "splits.", problems, false)) {
                plan.count = *v;
            }
            if (auto v = read_field<double>(*it, "test_fraction", "splits.", problems, false)) {
                plan.test_fraction = *v;
            }
            spec.splits = plan;
        }
    }

    if (problems.empty()) problems = spec.problems();
    if (!problems.empty()) {
        std::string msg = "invalid experiment spec:";
        for (const auto& s : problems) msg += "\n  " + s;
        throw SpecError(msg);
    }
    return spec;
}

inline ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(path + ": " + e.what());
    }
    try {
        return spec_from_json(j);
    } catch (const SpecError& e) {
        throw SpecError(path + ": " + e.what());
    }
}

/// Resolves a data path: as given if it exists, else under $TSETLIN_DATA_DIR.
inline std::string resolve_data_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path) || fs::path(path).is_absolute()) return path;
    const std::string dir = detail::env_data_dir();
    if (!dir.empty()) {
        const fs::path candidate = fs::path(dir) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

/// One independent training: run index r on split p.
struct UnitResult {
    std::size_t run = 0;
    std::size_t split = 0;
    std::uint64_t seed = 0;
    std::vector<double> accuracy;  ///< one entry per checkpoint
    double seconds = 0.0;

    /// Timing is excluded: it is the only nondeterministic field.
    friend bool operator==(const UnitResult& a, const UnitResult& b) {
        return a.run == b.run && a.split == b.split && a.seed == b.seed && a.accuracy == b.accuracy;
    }
};

struct RunResult {
    std::uint64_t seed = 0;
    int threshold_abs = 0;
    std::vector<std::size_t> checkpoints;
    std::vector<double> mean;
    std::vector<double> stddev;  ///< sample standard deviation; 0 for a single unit
    std::vector<UnitResult> units;

    double final_mean() const { return mean.empty() ? 0.0 : mean.back(); }

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Mean and sample standard deviation per checkpoint.
inline void aggregate(RunResult& result) {
    const std::size_t k = result.checkpoints.size();
    result.mean.assign(k, 0.0);
    result.stddev.assign(k, 0.0);
    const auto n = static_cast<double>(result.units.size());
    if (result.units.empty()) return;
    for (std::size_t c = 0; c < k; ++c) {
        double sum = 0.0;
        for (const auto& u : result.units) sum += u.accuracy.at(c);
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& u : result.units) ss += (u.accuracy[c] - mean) * (u.accuracy[c] - mean);
        result.mean[c] = mean;
        result.stddev[c] = result.units.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
}

struct RunOptions {
    unsigned threads = 1;
    /// When set, receives the model trained by unit 0 (run 0, split 0).
    Machine* first_model = nullptr;
};

namespace detail {

struct PreparedData {
    BinaryDataset train;
    BinaryDataset test;
};

struct DataShape {
    std::size_t feature_dim = 0;
    std::size_t class_count = 0;
    std::vector<std::string> label_names;
};

inline ClausePool make_pool(const ExperimentSpec& spec, std::size_t feature_dim) {
    if (const auto* c = std::get_if<ClassicMachine>(&spec.machine)) {
        return ClausePool::classic(feature_dim, spec.clauses, c->specificity, spec.threshold,
                                   spec.states_per_action);
    }
    return build_mtm(spec.clauses, spec.threshold, feature_dim,
                     std::get<MultigranularMachine>(spec.machine).range, spec.states_per_action);
}

inline Machine make_machine(const ExperimentSpec& spec, const DataShape& shape) {
    if (shape.class_count <= 2) return make_pool(spec, shape.feature_dim);
    auto names = shape.label_names;
    if (names.empty()) {
        for (std::size_t k = 0; k < shape.class_count; ++k) names.push_back(std::to_string(k));
    }
    return MultiClassClassifier::build(std::move(names),
                                       [&] { return make_pool(spec, shape.feature_dim); });
}

/// Data for each slot: one per run for synthetic data, one per split
/// otherwise (shared by all runs on that split).
inline std::vector<PreparedData> prepare_data(const ExperimentSpec& spec, DataShape& shape) {
    std::vector<PreparedData> slots;
    std::visit(
        [&](const auto& src) {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, SyntheticSource>) {
                for (std::size_t r = 0; r < spec.runs; ++r) {
                    Rng rng(derive_seed(spec.seed, SeedStream::Data, r));
                    auto train = generate_synthetic(src.count, rng, src.layout);
                    auto test = generate_synthetic(src.count, rng, src.layout);
                    slots.push_back({std::move(train), std::move(test)});
                }
                shape = {synthetic_features(src.layout), 2, {}};
            } else {
                BinaryDataset full;
                if constexpr (std::is_same_v<T, IrisSource>) {
                    full = load_iris(resolve_data_path(src.path), src.encoding);
                } else {
                    full = load_fixture(resolve_data_path(src.path));
                }
                shape = {full.feature_dim(), full.class_count(), full.label_names()};
                if constexpr (std::is_same_v<T, FixtureSource>) {
                    if (!src.test_path.empty()) {
                        auto test = load_fixture(resolve_data_path(src.test_path));
                        if (test.feature_dim() != full.feature_dim()) {
                            throw FormatError("test fixture dimension does not match training data");
                        }
                        shape.class_count = std::max(shape.class_count, test.class_count());
                        slots.push_back({std::move(full), std::move(test)});
                        return;
                    }
                }
                for (std::size_t p = 0; p < spec.splits->count; ++p) {
                    Rng rng(derive_seed(spec.seed, SeedStream::Split, p));
                    auto [train, test] = split(full, spec.splits->test_fraction, rng);
                    slots.push_back({std::move(train), std::move(test)});
                }
            }
        },
        spec.dataset);
    return slots;
}

}  // namespace detail

/// Trains one unit from scratch and scores it at each checkpoint.
inline UnitResult train_unit(const ExperimentSpec& spec, const Machine& blank,
                             const BinaryDataset& train, const BinaryDataset& test, std::size_t run,
                             std::size_t split_index, Machine* keep = nullptr) {
    UnitResult out;
    out.run = run;
    out.split = split_index;
    out.seed = derive_seed(spec.seed, SeedStream::Training, run, split_index);
    const auto checkpoints = spec.resolved_checkpoints();
    const auto start = std::chrono::steady_clock::now();

    Machine machine = blank;
    Rng rng(out.seed);
    std::size_t next = 0;
    for (std::size_t epoch = 1; epoch <= spec.epochs && next < checkpoints.size(); ++epoch) {
        fit_epoch(machine, train, rng);
        if (epoch == checkpoints[next]) {
            out.accuracy.push_back(accuracy(machine, test));
            ++next;
        }
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (keep) *keep = std::move(machine);
    return out;
}

/// Runs every (split, run) unit and aggregates test accuracy per checkpoint.
///
/// Units are independent and may run on several threads; results are stored
/// by unit index, so the output does not depend on scheduling.
inline RunResult run_experiment(const ExperimentSpec& spec, const RunOptions& options = {}) {
    spec.validate();
    detail::DataShape shape;
    const auto slots = detail::prepare_data(spec, shape);
    const Machine blank = detail::make_machine(spec, shape);

    const bool synthetic = std::holds_alternative<SyntheticSource>(spec.dataset);
    const std::size_t split_count = synthetic ? 1 : slots.size();
    const std::size_t unit_count = split_count * spec.runs;

    RunResult result;
    result.seed = spec.seed;
    result.threshold_abs = absolute_threshold(spec.threshold, spec.clauses);
    result.checkpoints = spec.resolved_checkpoints();
    result.units.resize(unit_count);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t u = next.fetch_add(1);
            if (u >= unit_count) return;
            const std::size_t p = u / spec.runs;
            const std::size_t r = u % spec.runs;
            const auto& data = slots[synthetic ? r : p];
            try {
                result.units[u] = train_unit(spec, blank, data.train, data.test, r, p,
                                             u == 0 ? options.first_model : nullptr);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = unit_count;
            }
        }
    };
    const unsigned threads =
        std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(unit_count)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    aggregate(result);
    return result;
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct SweepGrid {
    bool multigranular = false;
    std::vector<double> s_values;  ///< empty for a threshold-only sweep
    std::vector<double> t_values;
    /// Row-major |rows| x |t_values|; nullopt marks a cell that failed.
    std::vector<std::optional<double>> accuracy;
    std::size_t clauses = 0;
    std::size_t epochs = 0;
    std::uint64_t seed = 0;

    std::size_t rows() const noexcept { return multigranular ? 1 : s_values.size(); }
    std::size_t cols() const noexcept { return t_values.size(); }

    std::optional<double> at(std::size_t row, std::size_t col) const {
        return accuracy.at(row * cols() + col);
    }

    struct Cell {
        std::size_t row = 0;
        std::size_t col = 0;
        double accuracy = 0.0;
    };

    /// Highest cell; earliest in row-major order on ties.
    std::optional<Cell> best() const {
        std::optional<Cell> out;
        for (std::size_t r = 0; r < rows(); ++r) {
            for (std::size_t c = 0; c < cols(); ++c) {
                const auto v = at(r, c);
                if (v && (!out || *v > out->accuracy)) out = Cell{r, c, *v};
            }
        }
        return out;
    }

    std::optional<double> worst_accuracy() const {
        std::optional<double> out;
        for (const auto& v : accuracy) {
            if (v && (!out || *v < *out)) out = v;
        }
        return out;
    }

    std::size_t missing() const {
        return static_cast<std::size_t>(
            std::count_if(accuracy.begin(), accuracy.end(), [](const auto& v) { return !v; }));
    }

    friend bool operator==(const SweepGrid&, const SweepGrid&) = default;
};

/// Evaluates run_experiment on every (s, T) cell with the base seed, so all
/// cells see the same data and training seeds. A multigranular base sweeps
/// T only and `s_values` must be empty.
inline SweepGrid grid_search(const ExperimentSpec& base, const std::vector<double>& s_values,
                             const std::vector<double>& t_values, const RunOptions& options = {}) {
    if (t_values.empty()) throw std::invalid_argument("threshold axis must be nonempty");
    SweepGrid grid;
    grid.multigranular = base.is_multigranular();
    if (grid.multigranular && !s_values.empty()) {
        throw SpecError("multigranular sweeps take no specificity axis");
    }
    if (!grid.multigranular && s_values.empty()) {
        throw std::invalid_argument("specificity axis must be nonempty for a classic sweep");
    }
    grid.s_values = s_values;
    grid.t_values = t_values;
    grid.clauses = base.clauses;
    grid.epochs = base.epochs;
    grid.seed = base.seed;
    grid.accuracy.reserve(grid.rows() * grid.cols());

    RunOptions cell_options = options;
    cell_options.first_model = nullptr;
    for (std::size_t r = 0; r < grid.rows(); ++r) {
        for (double t : t_values) {
            ExperimentSpec cell = base;
            cell.threshold = t;
            if (!grid.multigranular) cell.machine = ClassicMachine{s_values[r]};
            try {
                grid.accuracy.push_back(run_experiment(cell, cell_options).final_mean());
            } catch (const std::exception&) {
                grid.accuracy.push_back(std::nullopt);
            }
        }
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Emitters
// ---------------------------------------------------------------------------

enum class OutputFormat { Csv, Json };

/// Shortest representation that round-trips.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline nlohmann::json to_json(const RunResult& r, bool include_timing = false) {
    nlohmann::json j;
    j["seed"] = r.seed;
    j["threshold_abs"] = r.threshold_abs;
    j["checkpoints"] = r.checkpoints;
    j["mean"] = r.mean;
    j["stddev"] = r.stddev;
    j["units"] = nlohmann::json::array();
    for (const auto& u : r.units) {
        nlohmann::json ju{{"run", u.run}, {"split", u.split}, {"seed", u.seed},
                          {"accuracy", u.accuracy}};
        if (include_timing) ju["seconds"] = u.seconds;
        j["units"].push_back(std::move(ju));
    }
    return j;
}

inline RunResult run_result_from_json(const nlohmann::json& j) {
    RunResult r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.threshold_abs = j.at("threshold_abs").get<int>();
    r.checkpoints = j.at("checkpoints").get<std::vector<std::size_t>>();
    r.mean = j.at("mean").get<std::vector<double>>();
    r.stddev = j.at("stddev").get<std::vector<double>>();
    for (const auto& ju : j.at("units")) {
        UnitResult u;
        u.run = ju.at("run").get<std::size_t>();
        u.split = ju.at("split").get<std::size_t>();
        u.seed = ju.at("seed").get<std::uint64_t>();
        u.accuracy = ju.at("accuracy").get<std::vector<double>>();
        u.seconds = ju.value("seconds", 0.0);
        r.units.push_back(std::move(u));
    }
    return r;
}

inline nlohmann::json to_json(const SweepGrid& g) {
    nlohmann::json j;
    j["machine"] = g.multigranular ? "multigranular" : "classic";
    j["clauses"] = g.clauses;
    j["epochs"] = g.epochs;
    j["seed"] = g.seed;
    j["s_values"] = g.s_values;
    j["t_values"] = g.t_values;
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < g.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (std::size_t c = 0; c < g.cols(); ++c) {
            const auto v = g.at(r, c);
            row.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
        }
        rows.push_back(std::move(row));
    }
    j["accuracy"] = std::move(rows);
    if (const auto best = g.best()) {
        j["best"] = {{"threshold", g.t_values[best->col]}, {"accuracy", best->accuracy}};
        if (!g.multigranular) j["best"]["specificity"] = g.s_values[best->row];
    }
    return j;
}

inline SweepGrid sweep_grid_from_json(const nlohmann::json& j) {
    SweepGrid g;
    g.multigranular = j.at("machine").get<std::string>() == "multigranular";
    g.clauses = j.at("clauses").get<std::size_t>();
    g.epochs = j.at("epochs").get<std::size_t>();
    g.seed = j.at("seed").get<std::uint64_t>();
    g.s_values = j.at("s_values").get<std::vector<double>>();
    g.t_values = j.at("t_values").get<std::vector<double>>();
    for (const auto& row : j.at("accuracy")) {
        for (const auto& v : row) {
            g.accuracy.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
        }
    }
    if (g.accuracy.size() != g.rows() * g.cols()) throw FormatError("sweep grid shape mismatch");
    return g;
}

/// Header row of threshold values, one row per specificity (a single
/// "multigranular" row for a threshold-only sweep). Failed cells are empty.
inline void write_csv(std::ostream& out, const SweepGrid& g) {
    out << (g.multigranular ? "machine" : "s");
    for (double t : g.t_values) out << ',' << format_number(t);
    out << '\n';
    for (std::size_t r = 0; r < g.rows(); ++r) {
        out << (g.multigranular ? std::string("multigranular") : format_number(g.s_values[r]));
        for (std::size_t c = 0; c < g.cols(); ++c) {
            out << ',';
            if (const auto v = g.at(r, c)) out << format_number(*v);
        }
        out << '\n';
    }
}

/// One line per unit with an accuracy column per checkpoint, then mean and
/// stddev rows.
inline void write_csv(std::ostream& out, const RunResult& r) {
    out << "row,run,split,seed";
    for (std::size_t c : r.checkpoints) out << ",epoch_" << c;
    out << '\n';
    for (std::size_t i = 0; i < r.units.size(); ++i) {
        const auto& u = r.units[i];
        out << i << ',' << u.run << ',' << u.split << ',' << u.seed;
        for (double a : u.accuracy) out << ',' << format_number(a);
        out << '\n';
    }
    out << "mean,,,";
    for (double m : r.mean) out << ',' << format_number(m);
    out << "\nstddev,,,";
    for (double s : r.stddev) out << ',' << format_number(s);
    out << '\n';
}

template <typename Result>
void emit_results(const Result& result, OutputFormat format, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    if (format == OutputFormat::Csv) {
        write_csv(out, result);
    } else {
        out << to_json(result).dump(2) << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace tsetlin
