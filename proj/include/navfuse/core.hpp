#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace navfuse {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Discrete action set. Index order is fixed and shared by distributions,
// serialization, and parameter heads.
enum class Action : int {
    Stop = 0,
    MoveForward = 1,
    TurnLeft = 2,
    TurnRight = 3,
    LookUp = 4,
    LookDown = 5,
};

inline constexpr int kNumActions = 6;

inline constexpr std::array<std::string_view, kNumActions> kActionNames = {
    "stop", "move_forward", "turn_left", "turn_right", "look_up", "look_down"};

inline std::string_view action_name(Action a) { return kActionNames[static_cast<int>(a)]; }

inline Action action_from_index(int i) {
    if (i < 0 || i >= kNumActions) throw Error("action index out of range: " + std::to_string(i));
    return static_cast<Action>(i);
}

enum class GoalCategory : int {
    Chair = 0,
    Bed = 1,
    Plant = 2,
    Toilet = 3,
    TvMonitor = 4,
    Sofa = 5,
};

inline constexpr int kNumGoalCategories = 6;

inline constexpr std::array<std::string_view, kNumGoalCategories> kGoalLabels = {
    "chair", "bed", "plant", "toilet", "tv_monitor", "sofa"};

inline std::string_view goal_label(GoalCategory g) { return kGoalLabels[static_cast<int>(g)]; }

inline GoalCategory goal_from_index(int i) {
    if (i < 0 || i >= kNumGoalCategories) throw Error("goal index out of range: " + std::to_string(i));
    return static_cast<GoalCategory>(i);
}

inline std::optional<GoalCategory> goal_from_label(std::string_view label) {
    for (int i = 0; i < kNumGoalCategories; ++i)
        if (kGoalLabels[i] == label) return static_cast<GoalCategory>(i);
    return std::nullopt;
}

// Tolerance on the probability-sum invariant.
inline constexpr double kProbSumTol = 1e-9;

// Six non-negative probabilities over the action set, summing to 1.
struct ActionDistribution {
    std::array<double, kNumActions> p{};

    double& operator[](Action a) { return p[static_cast<int>(a)]; }
    double operator[](Action a) const { return p[static_cast<int>(a)]; }
    double& operator[](int i) { return p[static_cast<size_t>(i)]; }
    double operator[](int i) const { return p[static_cast<size_t>(i)]; }

    double sum() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }

    bool valid() const {
        for (double v : p)
            if (!(v >= 0.0) || !std::isfinite(v)) return false;
        return std::abs(sum() - 1.0) <= kProbSumTol;
    }

    void check_valid(const char* who) const {
        if (!valid()) throw Error(std::string(who) + ": invalid action distribution");
    }

    // Lowest index wins ties.
    Action argmax() const {
        int best = 0;
        for (int i = 1; i < kNumActions; ++i)
            if (p[i] > p[best]) best = i;
        return static_cast<Action>(best);
    }

    double entropy() const {
        double h = 0.0;
        for (double v : p)
            if (v > 0.0) h -= v * std::log(v);
        return h;
    }

    static ActionDistribution uniform() {
        ActionDistribution d;
        d.p.fill(1.0 / kNumActions);
        return d;
    }

    static ActionDistribution onehot(Action a) {
        ActionDistribution d;
        d.p[static_cast<int>(a)] = 1.0;
        return d;
    }
};

inline bool operator==(const ActionDistribution& a, const ActionDistribution& b) {
    return a.p == b.p;
}

// Small value-type set of actions (used for collision masks).
struct ActionSet {
    std::uint8_t bits = 0;

    void insert(Action a) { bits |= static_cast<std::uint8_t>(1u << static_cast<int>(a)); }
    bool contains(Action a) const { return (bits >> static_cast<int>(a)) & 1u; }
    bool empty() const { return bits == 0; }
    int count() const {
        int n = 0;
        for (int i = 0; i < kNumActions; ++i) n += (bits >> i) & 1u;
        return n;
    }
};

inline bool operator==(ActionSet a, ActionSet b) { return a.bits == b.bits; }

}  // namespace navfuse
