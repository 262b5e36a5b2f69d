// Trains a classic and a multigranular machine on the synthetic task and
// prints test accuracy plus the clauses the multigranular machine learned.

#include <cstdio>
#include <string>

#include "tsetlin/tsetlin.hpp"

using namespace tsetlin;

namespace {

std::string describe(const Clause& c) {
    std::string out;
    for (std::size_t l = 0; l < c.literal_count(); ++l) {
        if (!c.includes(l)) continue;
        if (!out.empty()) out += " & ";
        out += (l % 2 ? "!x" : "x") + std::to_string(l / 2 + 1);
    }
    return out.empty() ? "(empty)" : out;
}

}  // namespace

int main() {
    Rng data_rng(derive_seed(1, SeedStream::Data, 0));
    const auto train = generate_synthetic(300, data_rng);
    const auto test = generate_synthetic(300, data_rng);

    Machine classic = ClausePool::classic(train.feature_dim(), 100, 60.0, 0.03);
    Machine mtm = build_mtm(100, 0.02, train.feature_dim());

    Rng rng(derive_seed(1, SeedStream::Training, 0));
    for (int epoch = 1; epoch <= 200; ++epoch) {
        fit_epoch(classic, train, rng);
        fit_epoch(mtm, train, rng);
    }
    std::printf("classic (s=60):       %.3f\n", accuracy(classic, test));
    std::printf("multigranular (2-200): %.3f\n", accuracy(mtm, test));

    const auto& pool = std::get<ClausePool>(mtm);
    std::printf("\nevery 10th multigranular clause:\n");
    for (std::size_t j = 0; j < pool.clause_count(); j += 10) {
        const Clause& c = pool.clause(j);
        std::printf("  %c s=%6.1f  %s\n", c.polarity() == Polarity::Positive ? '+' : '-',
                    c.specificity(), describe(c).c_str());
    }
}
