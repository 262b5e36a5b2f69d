#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tsetlin/harness.hpp"

namespace tsetlin {
namespace {

ExperimentSpec small_synthetic(bool multigranular) {
    ExperimentSpec spec;
    if (multigranular) {
        spec.machine = MultigranularMachine{};
    } else {
        spec.machine = ClassicMachine{10.0};
    }
    spec.clauses = 20;
    spec.threshold = 0.1;
    spec.epochs = 5;
    spec.runs = 3;
    spec.seed = 17;
    spec.dataset = SyntheticSource{60, SyntheticLayout::SixVariable};
    return spec;
}

ExperimentSpec small_iris() {
    ExperimentSpec spec;
    spec.machine = ClassicMachine{5.0};
    spec.clauses = 10;
    spec.threshold = 0.2;
    spec.epochs = 3;
    spec.runs = 2;
    spec.splits = SplitPlan{3, 0.2};
    spec.seed = 5;
    spec.dataset = IrisSource{TSETLIN_SOURCE_DATA_DIR "/iris.data", {}};
    return spec;
}

std::string spec_error(const nlohmann::json& j) {
    try {
        spec_from_json(j);
    } catch (const SpecError& e) {
        return e.what();
    }
    return {};
}

nlohmann::json minimal_json() {
    return nlohmann::json::parse(R"({
        "machine": {"type": "classic", "specificity": 5},
        "clauses": 20, "threshold": 0.1, "epochs": 3,
        "dataset": {"type": "synthetic"}
    })");
}

TEST(SpecSchema, MinimalDocumentAndDefaults) {
    const auto spec = spec_from_json(minimal_json());
    EXPECT_EQ(std::get<ClassicMachine>(spec.machine).specificity, 5.0);
    EXPECT_EQ(spec.runs, 1u);
    EXPECT_EQ(std::get<SyntheticSource>(spec.dataset), SyntheticSource{});
    EXPECT_EQ(spec.resolved_checkpoints(), (std::vector<std::size_t>{3}));
}

TEST(SpecSchema, MultigranularRejectsSpecificity) {
    const auto j = nlohmann::json::parse(R"({
        "machine": {"type": "multigranular", "specificity": 5},
        "clauses": 20, "threshold": 0.1, "epochs": 3,
        "dataset": {"type": "synthetic"}
    })");
    const auto msg = spec_error(j);
    EXPECT_NE(msg.find("machine.specificity"), std::string::npos) << msg;
    EXPECT_NE(msg.find("no global specificity"), std::string::npos) << msg;
}

TEST(SpecSchema, UnknownKeysRejected) {
    auto j = minimal_json();
    j["learning_rate"] = 0.1;
    j["dataset"]["noise"] = 0.2;
    const auto msg = spec_error(j);
    EXPECT_NE(msg.find("learning_rate: unknown key"), std::string::npos) << msg;
    EXPECT_NE(msg.find("dataset.noise: unknown key"), std::string::npos) << msg;
}

TEST(SpecSchema, ListsEveryProblem) {
    auto j = minimal_json();
    j["clauses"] = 7;
    j["threshold"] = 1.5;
    j["epochs"] = 0;
    const auto msg = spec_error(j);
    EXPECT_NE(msg.find("clauses:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("threshold:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("epochs:"), std::string::npos) << msg;

    auto iris = minimal_json();
    iris["dataset"] = {{"type", "iris"}, {"path", "iris.data"}};
    EXPECT_NE(spec_error(iris).find("splits: required"), std::string::npos);

    auto synthetic_split = minimal_json();
    synthetic_split["splits"] = {{"count", 2}};
    EXPECT_NE(spec_error(synthetic_split).find("pre-split"), std::string::npos);

    auto seven = minimal_json();
    seven["dataset"]["variables"] = 8;
    EXPECT_NE(spec_error(seven).find("6 or 7"), std::string::npos);

    auto wrong_type = minimal_json();
    wrong_type["clauses"] = "many";
    EXPECT_NE(spec_error(wrong_type).find("clauses:"), std::string::npos);
}

TEST(SpecSchema, JsonRoundTrip) {
    auto spec = small_iris();
    spec.checkpoints = {1, 3};
    EXPECT_EQ(spec_from_json(to_json(spec)), spec);
    auto mtm = small_synthetic(true);
    std::get<MultigranularMachine>(mtm.machine).range = {3.0, 50.0};
    mtm.dataset = SyntheticSource{40, SyntheticLayout::SevenVariable};
    EXPECT_EQ(spec_from_json(to_json(mtm)), mtm);
    ExperimentSpec fixture = small_synthetic(false);
    fixture.dataset = FixtureSource{"a.txt", "b.txt"};
    EXPECT_EQ(spec_from_json(to_json(fixture)), fixture);
}

TEST(HarnessProperty, DeterministicForFixedSeed) {
    for (bool mtm : {false, true}) {
        const auto spec = small_synthetic(mtm);
        EXPECT_EQ(run_experiment(spec), run_experiment(spec));
    }
    EXPECT_EQ(run_experiment(small_iris()), run_experiment(small_iris()));
}

TEST(HarnessProperty, ThreadedMatchesSequential) {
    const auto spec = small_iris();
    EXPECT_EQ(run_experiment(spec, {.threads = 4}), run_experiment(spec));
}

TEST(HarnessProperty, AggregatesRecomputeFromUnits) {
    auto spec = small_iris();
    spec.checkpoints = {1, 2, 3};
    const auto result = run_experiment(spec);
    ASSERT_EQ(result.units.size(), 6u);
    for (std::size_t c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (const auto& u : result.units) sum += u.accuracy[c];
        const double mean = sum / 6.0;
        double ss = 0.0;
        for (const auto& u : result.units) ss += std::pow(u.accuracy[c] - mean, 2);
        EXPECT_NEAR(result.mean[c], mean, 1e-12);
        EXPECT_NEAR(result.stddev[c], std::sqrt(ss / 5.0), 1e-12);
    }
}

TEST(HarnessProperty, UnitsAreIndependent) {
    // Unit (r, p) must not depend on how many other units the experiment has.
    auto spec = small_iris();
    const auto full = run_experiment(spec);
    spec.runs = 1;
    spec.splits->count = 1;
    const auto single = run_experiment(spec);
    EXPECT_EQ(single.units.front(), full.units.front());

    auto synthetic = small_synthetic(true);
    const auto three = run_experiment(synthetic);
    synthetic.runs = 1;
    EXPECT_EQ(run_experiment(synthetic).units.front(), three.units.front());
}

TEST(HarnessProperty, SeedsAndLayout) {
    const auto spec = small_iris();
    const auto result = run_experiment(spec);
    ASSERT_EQ(result.units.size(), spec.runs * spec.splits->count);
    for (std::size_t u = 0; u < result.units.size(); ++u) {
        const auto& unit = result.units[u];
        EXPECT_EQ(unit.split, u / spec.runs);
        EXPECT_EQ(unit.run, u % spec.runs);
        EXPECT_EQ(unit.seed, derive_seed(spec.seed, SeedStream::Training, unit.run, unit.split));
        for (double a : unit.accuracy) {
            EXPECT_GE(a, 0.0);
            EXPECT_LE(a, 1.0);
        }
    }
    EXPECT_EQ(result.threshold_abs, 2);
}

TEST(Harness, SingleExampleSmoke) {
    const auto dir = std::filesystem::temp_directory_path();
    const auto train = dir / "tsetlin_smoke_train.txt";
    const auto test = dir / "tsetlin_smoke_test.txt";
    std::ofstream(train) << "101 1\n";
    std::ofstream(test) << "101 1\n";
    ExperimentSpec spec;
    spec.machine = ClassicMachine{3.0};
    spec.clauses = 4;
    spec.threshold = 0.5;
    spec.epochs = 1;
    spec.runs = 1;
    spec.dataset = FixtureSource{train.string(), test.string()};
    Machine model = ClausePool::classic(1, 2, 1.0, 1.0);
    const auto result = run_experiment(spec, {.threads = 1, .first_model = &model});
    ASSERT_EQ(result.units.size(), 1u);
    ASSERT_EQ(result.units[0].accuracy.size(), 1u);
    EXPECT_GE(result.units[0].accuracy[0], 0.0);
    EXPECT_LE(result.units[0].accuracy[0], 1.0);
    EXPECT_EQ(result.stddev[0], 0.0);
    EXPECT_EQ(feature_dim(model), 3u);
    std::filesystem::remove(train);
    std::filesystem::remove(test);
}

TEST(Harness, DataDirectoryFallback) {
    ::setenv("TSETLIN_DATA_DIR", TSETLIN_SOURCE_DATA_DIR, 1);
    EXPECT_EQ(resolve_data_path("iris.data"), std::string(TSETLIN_SOURCE_DATA_DIR) + "/iris.data");
    ::unsetenv("TSETLIN_DATA_DIR");
    EXPECT_EQ(resolve_data_path("no-such-file"), "no-such-file");
}

TEST(Harness, MissingDataFails) {
    auto spec = small_iris();
    spec.dataset = IrisSource{"/nonexistent/iris.data", {}};
    EXPECT_THROW(run_experiment(spec), std::runtime_error);
    auto bad = small_iris();
    bad.clauses = 3;
    EXPECT_THROW(run_experiment(bad), SpecError);
}

TEST(GridSearch, SingleCellMatchesRunExperiment) {
    auto spec = small_synthetic(false);
    const auto grid = grid_search(spec, {10.0}, {0.1});
    ASSERT_EQ(grid.accuracy.size(), 1u);
    EXPECT_EQ(*grid.accuracy[0], run_experiment(spec).final_mean());

    const auto mtm = small_synthetic(true);
    const auto mtm_grid = grid_search(mtm, {}, {0.1});
    EXPECT_EQ(*mtm_grid.accuracy[0], run_experiment(mtm).final_mean());
    EXPECT_THROW(grid_search(mtm, {5.0}, {0.1}), SpecError);
    EXPECT_THROW(grid_search(spec, {}, {0.1}), std::invalid_argument);
}

TEST(GridSearch, FailedCellsAreMissing) {
    auto spec = small_synthetic(false);
    spec.epochs = 1;
    spec.runs = 1;
    const auto grid = grid_search(spec, {0.5, 5.0}, {0.1, 2.0});
    EXPECT_EQ(grid.missing(), 3u);  // s < 1 fails both cells, T > 1 fails the other
    EXPECT_TRUE(grid.at(1, 0).has_value());
    ASSERT_TRUE(grid.best());
    EXPECT_EQ(grid.best()->row, 1u);
    EXPECT_EQ(grid.best()->col, 0u);
}

TEST(SweepGrid, BestAndCsv) {
    SweepGrid g;
    g.s_values = {2.0, 3.5};
    g.t_values = {0.1, 0.25};
    g.accuracy = {0.5, 0.9, std::nullopt, 0.9};
    g.clauses = 10;
    g.epochs = 4;
    const auto best = g.best();
    ASSERT_TRUE(best);
    EXPECT_EQ(best->row, 0u);
    EXPECT_EQ(best->col, 1u);
    EXPECT_EQ(g.worst_accuracy(), 0.5);
    EXPECT_EQ(g.missing(), 1u);

    std::ostringstream csv;
    write_csv(csv, g);
    EXPECT_EQ(csv.str(), "s,0.1,0.25\n2,0.5,0.9\n3.5,,0.9\n");

    EXPECT_EQ(sweep_grid_from_json(to_json(g)), g);

    SweepGrid mtm;
    mtm.multigranular = true;
    mtm.t_values = {0.05};
    mtm.accuracy = {0.75};
    std::ostringstream mtm_csv;
    write_csv(mtm_csv, mtm);
    EXPECT_EQ(mtm_csv.str(), "machine,0.05\nmultigranular,0.75\n");
}

TEST(RunResultOutput, CsvAndJson) {
    auto spec = small_synthetic(true);
    spec.checkpoints = {2, 5};
    const auto result = run_experiment(spec);
    std::ostringstream csv;
    write_csv(csv, result);
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    EXPECT_EQ(header, "row,run,split,seed,epoch_2,epoch_5");
    std::size_t count = 1;
    for (std::string line; std::getline(lines, line);) ++count;
    EXPECT_EQ(count, 1 + spec.runs + 2);

    EXPECT_EQ(run_result_from_json(to_json(result)), result);
    EXPECT_EQ(run_result_from_json(nlohmann::json::parse(to_json(result).dump())), result);
}

}  // namespace
}  // namespace tsetlin
