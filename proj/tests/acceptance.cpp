// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Long-running (tens of minutes on one core).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsetlin/tsetlin.hpp"

using namespace tsetlin;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string pct(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * a);
    return buf;
}

ExperimentSpec synthetic(std::size_t m, std::optional<double> s, double t, std::size_t runs) {
    ExperimentSpec spec;
    if (s) {
        spec.machine = ClassicMachine{*s};
    } else {
        spec.machine = MultigranularMachine{};
    }
    spec.clauses = m;
    spec.threshold = t;
    spec.epochs = 500;
    spec.runs = runs;
    spec.seed = 42;
    spec.dataset = SyntheticSource{300, SyntheticLayout::SixVariable};
    return spec;
}

Outcome large_capacity() {
    Outcome o;
    const double mtm = run_experiment(synthetic(500, std::nullopt, 0.01, 10)).final_mean();
    const double tm = run_experiment(synthetic(500, 35.0, 0.01, 10)).final_mean();
    o.require(mtm >= 0.96, "MTM m=500 T=0.01: " + pct(mtm) + " >= 96%");
    o.require(tm >= 0.96, "TM m=500 s=35 T=0.01: " + pct(tm) + " >= 96%");
    return o;
}

Outcome small_capacity() {
    Outcome o;
    const double mtm = run_experiment(synthetic(10, std::nullopt, 0.16, 10)).final_mean();
    const double tm = run_experiment(synthetic(10, 110.0, 0.1, 10)).final_mean();
    o.require(mtm >= 0.72 && mtm <= 0.82, "MTM m=10 T=0.16: " + pct(mtm) + " in [72%, 82%]");
    o.require(tm >= 0.72 && tm <= 0.82, "TM m=10 s=110 T=0.1: " + pct(tm) + " in [72%, 82%]");
    return o;
}

Outcome iris() {
    Outcome o;
    ExperimentSpec spec;
    spec.clauses = 100;
    spec.epochs = 500;
    spec.runs = 10;
    spec.splits = SplitPlan{10, 0.2};
    spec.seed = 42;
    spec.dataset = IrisSource{TSETLIN_SOURCE_DATA_DIR "/iris.data", {3, 2}};

    spec.machine = ClassicMachine{5.0};
    spec.threshold = 0.2;
    const double tm = run_experiment(spec).final_mean();
    spec.machine = MultigranularMachine{};
    spec.threshold = 0.05;
    const double mtm = run_experiment(spec).final_mean();

    o.require(tm >= 0.925 && tm <= 0.975, "TM s=5 T=0.2: " + pct(tm) + " in [92.5%, 97.5%]");
    o.require(mtm >= 0.92 && mtm <= 0.97, "MTM T=0.05: " + pct(mtm) + " in [92%, 97%]");
    o.require(tm - mtm <= 0.015, "TM - MTM = " + pct(tm - mtm) + " <= 1.5 points");
    return o;
}

Outcome search_reduction() {
    Outcome o;
    const auto doc = nlohmann::json::parse(R"({
        "machine": {"type": "multigranular", "specificity": 10},
        "clauses": 100, "threshold": 0.05, "epochs": 500, "dataset": {"type": "synthetic"}})");
    bool rejected = false;
    try {
        spec_from_json(doc);
    } catch (const SpecError&) {
        rejected = true;
    }
    const auto accepted = to_json(synthetic(100, std::nullopt, 0.05, 1));
    o.require(rejected && !accepted["machine"].contains("specificity"),
              "multigranular schema has no specificity field");

    const std::vector<double> s_axis{2, 5, 10, 20, 35, 50, 65, 100, 150, 200};
    const std::vector<double> t_axis{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1, 0.15, 0.2};
    const auto tm_grid = grid_search(synthetic(100, 10.0, 0.05, 10), s_axis, t_axis);
    const auto mtm_grid = grid_search(synthetic(100, std::nullopt, 0.05, 10), {}, t_axis);
    const auto tm_best = tm_grid.best();
    const auto mtm_best = mtm_grid.best();
    if (!tm_best || !mtm_best) {
        o.require(false, "sweeps produced results");
        return o;
    }
    std::ostringstream what;
    what << "best MTM " << pct(mtm_best->accuracy) << " (T=" << t_axis[mtm_best->col]
         << ") vs best TM " << pct(tm_best->accuracy) << " (s=" << s_axis[tm_best->row]
         << ", T=" << t_axis[tm_best->col] << ") within 2 points";
    o.require(tm_best->accuracy - mtm_best->accuracy <= 0.02, what.str());
    return o;
}

// In-process versions of the property suites; no external data needed.
Outcome properties() {
    Outcome o;
    Rng rng(20240601);

    bool bounds = true;
    for (int trial = 0; trial < 40 && bounds; ++trial) {
        const std::size_t n = 1 + rng.below(8);
        const int states = 1 + static_cast<int>(rng.below(5));
        Clause c(n, Polarity::Positive, 1.0 + 20.0 * rng.uniform(), states);
        std::vector<std::uint8_t> x(n);
        for (int step = 0; step < 2000 && bounds; ++step) {
            for (auto& b : x) b = static_cast<std::uint8_t>(rng.below(2));
            const LiteralVector lits(x);
            const auto kind = rng.bernoulli(0.5) ? FeedbackKind::TypeI : FeedbackKind::TypeII;
            c.apply_feedback(kind, lits, c.evaluate(lits, EvalMode::Train), rng);
            for (const auto& ta : c.automata()) bounds = bounds && ta.state() >= 1 && ta.state() <= 2 * states;
        }
    }
    o.require(bounds, "automaton states stay in [1, 2N] under fuzzed feedback");

    bool conj = true;
    for (std::size_t n = 1; n <= 10; ++n) {
        for (int trial = 0; trial < 8; ++trial) {
            Clause c(n, Polarity::Negative, 3.0);
            for (std::size_t l = 0; l < 2 * n; ++l) {
                c.set_state(l, rng.bernoulli(0.2) ? kDefaultStatesPerAction + 1 : kDefaultStatesPerAction);
            }
            for (std::uint32_t v = 0; v < (1U << n); ++v) {
                std::vector<std::uint8_t> x(n);
                for (std::size_t k = 0; k < n; ++k) x[k] = (v >> k) & 1U;
                bool expected = true;
                for (std::size_t l = 0; l < 2 * n; ++l) {
                    if (c.automata()[l].state() > kDefaultStatesPerAction) {
                        expected = expected && (l % 2 == 0 ? x[l / 2] == 1 : x[l / 2] == 0);
                    }
                }
                conj = conj && c.evaluate(x, EvalMode::Train) == expected;
            }
        }
    }
    o.require(conj, "clause output equals brute-force conjunction for n <= 10");

    bool labels = true;
    for (std::uint32_t v = 0; v < 128; ++v) {
        std::vector<std::uint8_t> x(7);
        for (std::size_t k = 0; k < 7; ++k) x[k] = (v >> k) & 1U;
        const bool par = (x[2] + x[3] + x[4] + x[5] + x[6]) % 2 == 1;
        const bool y1 = (!x[0] && x[1]) || (x[0] && par);
        labels = labels && synthetic_label(x, SyntheticLayout::SevenVariable) == (y1 ? 1u : 0u);
        if (v < 64) {
            const std::span<const std::uint8_t> six(x.data(), 6);
            const bool par6 = (x[1] + x[2] + x[3] + x[4] + x[5]) % 2 == 1;
            const bool y6 = (!x[0] && x[1]) || (x[0] && par6);
            labels = labels && synthetic_label(six, SyntheticLayout::SixVariable) == (y6 ? 1u : 0u);
        }
    }
    o.require(labels, "synthetic labeler equals the pattern formulas on all inputs");

    bool schedule = true;
    for (std::size_t m = 2; m <= 400; m += 3) {
        const auto s = specificity_schedule(m, {2.0, 200.0});
        schedule = schedule && s.front() == 200.0 && s.back() == 2.0;
        for (std::size_t i = 1; i < m; ++i) schedule = schedule && s[i] < s[i - 1];
        const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(m);
        schedule = schedule && std::abs(mean - 101.0) < 1e-9;
    }
    o.require(schedule, "specificity schedule endpoints, monotonicity and mean");

    bool votes = true;
    {
        ClausePool pool = ClausePool::classic(6, 20, 4.0, 0.1);
        Rng train_rng(5);
        const auto data = generate_synthetic(100, train_rng);
        for (int e = 0; e < 5; ++e) pool.fit_epoch(data, train_rng);
        for (std::size_t i = 0; i < data.rows(); ++i) {
            const int v = pool.vote_sum(data.row(i), EvalMode::Infer);
            votes = votes && v >= -10 && v <= 10 && pool.classify(data.row(i)) == (v >= 0 ? 1 : 0);
        }
        const ClausePool empty = ClausePool::classic(6, 20, 4.0, 0.1);
        votes = votes && empty.vote_sum(data.row(0), EvalMode::Infer) == 0 && empty.classify(data.row(0)) == 1;
    }
    o.require(votes, "vote sum in [-m/2, m/2] and a tie classifies as 1");

    bool probs = true;
    for (int t : {1, 5, 50}) {
        probs = probs && feedback_probability(1, t, t) == 0.0 && feedback_probability(1, -t, t) == 1.0 &&
                feedback_probability(0, -t, t) == 0.0 && feedback_probability(0, t, t) == 1.0;
    }
    o.require(probs, "feedback probability endpoints at v = +/-T");

    ExperimentSpec spec = synthetic(20, std::nullopt, 0.1, 3);
    spec.epochs = 10;
    o.require(run_experiment(spec) == run_experiment(spec), "bit-identical RunResults for a fixed seed");

    Machine model = ClausePool::classic(1, 2, 1.0, 1.0);
    run_experiment(spec, {1, &model});
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    write_machine(buf, model);
    const Machine loaded = read_machine(buf);
    o.require(std::get<ClausePool>(loaded) == std::get<ClausePool>(model), "model persistence round trip");
    return o;
}

Outcome surface(const std::string& csv_path) {
    Outcome o;
    const std::vector<double> s_axis{5, 35, 65, 95, 125, 155, 185, 200};
    const std::vector<double> t_axis{0.01, 0.02, 0.03, 0.04, 0.05, 0.075, 0.1, 0.125, 0.15, 0.2};
    const auto grid = grid_search(synthetic(100, 5.0, 0.05, 3), s_axis, t_axis);
    std::ofstream out(csv_path);
    write_csv(out, grid);
    out.close();

    std::ifstream in(csv_path);
    std::size_t lines = 0, empty_cells = 0;
    for (std::string line; std::getline(in, line); ++lines) {
        if (line.find(",,") != std::string::npos || line.back() == ',') ++empty_cells;
    }
    o.require(grid.missing() == 0 && lines == s_axis.size() + 1 && empty_cells == 0,
              "complete " + std::to_string(s_axis.size()) + "x" + std::to_string(t_axis.size()) +
                  " CSV surface at " + csv_path);
    const double hi = grid.best()->accuracy;
    const double lo = *grid.worst_accuracy();
    o.require(hi - lo >= 0.05, "max " + pct(hi) + " - min " + pct(lo) + " >= 5 points");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string csv_path = "sensitivity_surface.csv";
    std::vector<int> only;
    app.add_option("--csv", csv_path, "Where to write the sweep surface");
    app.add_option("--only", only, "Run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"synthetic m=500, TM and MTM >= 96%", large_capacity},
        {"synthetic m=10, TM and MTM in [72%, 82%]", small_capacity},
        {"Iris m=100, TM and MTM windows, gap <= 1.5 points", iris},
        {"no specificity in MTM schema; T-only sweep within 2 points of s x T grid", search_reduction},
        {"property suites", properties},
        {"sensitivity surface complete with >= 5 point spread", [&] { return surface(csv_path); }},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d: %s [%s] (%.0fs)\n", o.pass ? "PASS" : "FAIL", id,
                    criteria[k].first.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
