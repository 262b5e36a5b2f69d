#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsetlin/automaton.hpp"
#include "tsetlin/literals.hpp"
#include "tsetlin/random.hpp"

namespace tsetlin {

enum class Polarity : std::uint8_t { Negative = 0, Positive = 1 };

/// Train mode lets an empty clause fire so it can pick up Type I feedback;
/// Infer mode treats an empty clause as silent.
enum class EvalMode : std::uint8_t { Train, Infer };

enum class FeedbackKind : std::uint8_t { TypeI = 0, TypeII = 1 };

// ---------------------------------------------------------------------------
// Feedback tables
//
// One rule per (feedback kind, clause output c, literal value L, current
// action). Chance says how likely the step is for a clause of specificity s.
// ---------------------------------------------------------------------------

enum class Chance : std::uint8_t {
    Never,
    Low,   ///< 1/s
    High,  ///< (s-1)/s
    Always,
};

enum class Step : std::int8_t { TowardExclude = -1, None = 0, TowardInclude = 1 };

struct FeedbackRule {
    Chance chance = Chance::Never;
    Step step = Step::None;
};

namespace detail {
inline constexpr FeedbackRule kNoOp{Chance::Never, Step::None};
inline constexpr FeedbackRule kErode{Chance::Low, Step::TowardExclude};
inline constexpr FeedbackRule kMemorize{Chance::High, Step::TowardInclude};
inline constexpr FeedbackRule kBlock{Chance::Always, Step::TowardInclude};
}  // namespace detail

/// kFeedbackTable[kind][c][L][action]. Entries with c=1, L=0, Include cannot
/// occur in Train mode (an included false literal forces c=0) and are no-ops.
inline constexpr FeedbackRule kFeedbackTable[2][2][2][2] = {
    // Type I
    {
        // c = 0: every automaton is nudged toward Exclude with probability 1/s.
        {{detail::kErode, detail::kErode}, {detail::kErode, detail::kErode}},
        // c = 1
        {
            {detail::kErode, detail::kNoOp},       // L = 0 {Exclude, Include}
            {detail::kMemorize, detail::kMemorize},  // L = 1 {Exclude, Include}
        },
    },
    // Type II
    {
        {{detail::kNoOp, detail::kNoOp}, {detail::kNoOp, detail::kNoOp}},
        {
            {detail::kBlock, detail::kNoOp},
            {detail::kNoOp, detail::kNoOp},
        },
    },
};

constexpr const FeedbackRule& feedback_rule(FeedbackKind kind, bool clause_output,
                                            bool literal_value, Action action) noexcept {
    return kFeedbackTable[static_cast<int>(kind)][clause_output][literal_value]
                         [static_cast<int>(action)];
}

/// A conjunction of literals chosen by a team of 2n Tsetlin automata.
class Clause {
public:
    Clause(std::size_t feature_dim, Polarity polarity, double specificity,
           int states_per_action = kDefaultStatesPerAction)
        : feature_dim_(feature_dim),
          states_per_action_(states_per_action),
          polarity_(polarity),
          specificity_(specificity),
          automata_(2 * feature_dim, TsetlinAutomaton(states_per_action)),
          include_mask_(words_for(2 * feature_dim), 0) {
        if (feature_dim == 0) throw std::invalid_argument("clause feature dimension must be >= 1");
        if (states_per_action < 1) throw std::invalid_argument("states per action must be >= 1");
        if (!(specificity >= 1.0)) {
            throw std::invalid_argument("specificity must be >= 1, got " +
                                        std::to_string(specificity));
        }
        set_probabilities();
    }

    std::size_t feature_dim() const noexcept { return feature_dim_; }
    std::size_t literal_count() const noexcept { return automata_.size(); }
    int states_per_action() const noexcept { return states_per_action_; }
    Polarity polarity() const noexcept { return polarity_; }
    double specificity() const noexcept { return specificity_; }

    std::span<const TsetlinAutomaton> automata() const noexcept { return automata_; }

    bool includes(std::size_t literal) const noexcept {
        return (include_mask_[literal / kWordBits] >> (literal % kWordBits)) & 1U;
    }

    std::size_t included_count() const noexcept { return included_; }

    /// Overwrites one automaton state; used by persistence and tests.
    void set_state(std::size_t literal, std::int32_t state) {
        if (literal >= automata_.size()) throw std::out_of_range("literal index out of range");
        if (state < 1 || state > 2 * states_per_action_) {
            throw std::out_of_range("automaton state " + std::to_string(state) +
                                    " outside [1, " + std::to_string(2 * states_per_action_) +
                                    "]");
        }
        automata_[literal] = TsetlinAutomaton(state);
        sync_include_bit(literal);
    }

    bool evaluate(const LiteralVector& literals, EvalMode mode) const {
        check_dim(literals.feature_dim());
        return evaluate_unchecked(literals, mode);
    }

    bool evaluate(BitSpan input, EvalMode mode) const {
        return evaluate(LiteralVector(input), mode);
    }

    /// Applies one round of feedback given this clause's Train-mode output.
    void apply_feedback(FeedbackKind kind, const LiteralVector& literals, bool clause_output,
                        Rng& rng) {
        check_dim(literals.feature_dim());
        if (kind == FeedbackKind::TypeII && !clause_output) return;
        for (std::size_t k = 0; k < automata_.size(); ++k) {
            TsetlinAutomaton& ta = automata_[k];
            const FeedbackRule& rule =
                feedback_rule(kind, clause_output, literals[k], ta.action(states_per_action_));
            bool fire = false;
            switch (rule.chance) {
                case Chance::Never: break;
                case Chance::Low: fire = rng.bernoulli(low_probability_); break;
                case Chance::High: fire = rng.bernoulli(high_probability_); break;
                case Chance::Always: fire = true; break;
            }
            if (!fire) continue;
            if (rule.step == Step::TowardInclude) {
                ta.step_toward_include(states_per_action_);
            } else if (rule.step == Step::TowardExclude) {
                ta.step_toward_exclude();
            }
            sync_include_bit(k);
        }
    }

    // Hot path for the pool: dimension already validated.
    bool evaluate_unchecked(const LiteralVector& literals, EvalMode mode) const noexcept {
        const auto lit = literals.words();
        for (std::size_t w = 0; w < include_mask_.size(); ++w) {
            if (include_mask_[w] & ~lit[w]) return false;
        }
        return mode == EvalMode::Train || included_ > 0;
    }

    friend bool operator==(const Clause& a, const Clause& b) {
        return a.feature_dim_ == b.feature_dim_ &&
               a.states_per_action_ == b.states_per_action_ && a.polarity_ == b.polarity_ &&
               a.specificity_ == b.specificity_ && a.automata_ == b.automata_;
    }

private:
    void set_probabilities() {
        low_probability_ = 1.0 / specificity_;
        high_probability_ = (specificity_ - 1.0) / specificity_;
    }

    void check_dim(std::size_t n) const {
        if (n != feature_dim_) {
            throw std::invalid_argument("input has " + std::to_string(n) +
                                        " features, clause expects " +
                                        std::to_string(feature_dim_));
        }
    }

    void sync_include_bit(std::size_t literal) noexcept {
        const std::uint64_t bit = std::uint64_t{1} << (literal % kWordBits);
        std::uint64_t& word = include_mask_[literal / kWordBits];
        const bool was = word & bit;
        const bool now = automata_[literal].action(states_per_action_) == Action::Include;
        if (was == now) return;
        word ^= bit;
        if (now) {
            ++included_;
        } else {
            --included_;
        }
    }

    std::size_t feature_dim_;
    int states_per_action_;
    Polarity polarity_;
    double specificity_;
    double low_probability_ = 0.0;
    double high_probability_ = 0.0;
    std::vector<TsetlinAutomaton> automata_;
    std::vector<std::uint64_t> include_mask_;
    std::size_t included_ = 0;
};

inline bool evaluate_clause(const Clause& clause, BitSpan input, EvalMode mode) {
    return clause.evaluate(input, mode);
}

/// Type I feedback; the clause output is computed here in Train mode.
inline void apply_type_i(Clause& clause, BitSpan input, Rng& rng) {
    const LiteralVector literals(input);
    clause.apply_feedback(FeedbackKind::TypeI, literals, clause.evaluate(literals, EvalMode::Train),
                          rng);
}

/// Type II feedback. Deterministic: no random draws are consumed.
inline void apply_type_ii(Clause& clause, BitSpan input) {
    const LiteralVector literals(input);
    Rng unused(0);
    clause.apply_feedback(FeedbackKind::TypeII, literals,
                          clause.evaluate(literals, EvalMode::Train), unused);
}

}  // namespace tsetlin
