#pragma once

#include <cstdint>

namespace tsetlin {

/// Number of states on each side of the include/exclude boundary.
inline constexpr int kDefaultStatesPerAction = 100;

enum class Action : std::uint8_t { Exclude, Include };

/// A two-action Tsetlin automaton with 2N states.
///
/// States 1..N select Exclude, N+1..2N select Include. The automaton does
/// not store N itself: every automaton in a clause shares the same N, which
/// the clause owns and passes in.
class TsetlinAutomaton {
public:
    constexpr TsetlinAutomaton() = default;
    constexpr explicit TsetlinAutomaton(std::int32_t state) : state_(state) {}

    constexpr std::int32_t state() const noexcept { return state_; }

    constexpr Action action(int states_per_action) const noexcept {
        return state_ > states_per_action ? Action::Include : Action::Exclude;
    }

    /// Moves one step toward (or deeper into) Include, saturating at 2N.
    constexpr void step_toward_include(int states_per_action) noexcept {
        if (state_ < 2 * states_per_action) ++state_;
    }

    /// Moves one step toward (or deeper into) Exclude, saturating at 1.
    constexpr void step_toward_exclude() noexcept {
        if (state_ > 1) --state_;
    }

    friend constexpr bool operator==(TsetlinAutomaton, TsetlinAutomaton) = default;

private:
    std::int32_t state_ = 1;
};

}  // namespace tsetlin
