#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "navfuse/core.hpp"
#include "navfuse/observe.hpp"

namespace navfuse {

// Clause order and wording of the action-probability sentence.
inline constexpr std::array<std::string_view, kNumActions> kActionPhrases = {
    "Stop", "move forward", "turn left", "turn right", "look up", "look down"};

inline constexpr double kParseSumTolerance = 0.05;

class ParseError : public Error {
public:
    enum class Kind { MissingClause, DuplicateClause, BadNumber, BadSum };

    ParseError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

namespace detail {

// Two-decimal units (hundredths) per action via largest-remainder rounding:
// the printed values always sum to exactly 1.00. Ties break by index order.
inline std::array<int, kNumActions> hundredths(const ActionDistribution& d) {
    std::array<int, kNumActions> units{};
    std::array<double, kNumActions> rem{};
    int assigned = 0;
    for (int i = 0; i < kNumActions; ++i) {
        const double scaled = d[i] * 100.0;
        units[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(scaled));
        rem[static_cast<std::size_t>(i)] = scaled - std::floor(scaled);
        assigned += units[static_cast<std::size_t>(i)];
    }
    int leftover = 100 - assigned;
    std::array<int, kNumActions> order = {0, 1, 2, 3, 4, 5};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return rem[static_cast<std::size_t>(a)] > rem[static_cast<std::size_t>(b)]; });
    for (int k = 0; k < leftover && k < kNumActions; ++k)
        ++units[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    // degenerate fp overshoot: reclaim from the smallest remainders
    for (int k = kNumActions - 1; leftover < 0 && k >= 0; --k) {
        auto& u = units[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        if (u > 0) {
            --u;
            ++leftover;
        }
    }
    return units;
}

inline std::string format_hundredths(int units) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%d.%02d", units / 100, units % 100);
    return buf;
}

}  // namespace detail

// "Stop with probability 0.03, move forward with probability 0.44, ... and
// look down with probability 0.01" -- fixed clause order, two decimals, comma
// separated, "and " before the final clause.
inline std::string serialize_distribution(const ActionDistribution& d) {
    d.check_valid("serialize_distribution");
    const auto units = detail::hundredths(d);
    std::string out;
    for (int i = 0; i < kNumActions; ++i) {
        if (i > 0) out += ", ";
        if (i == kNumActions - 1) out += "and ";
        out += kActionPhrases[static_cast<std::size_t>(i)];
        out += " with probability ";
        out += detail::format_hundredths(units[static_cast<std::size_t>(i)]);
    }
    return out;
}

// Case-insensitive parse of the six clauses in any order; flexible whitespace,
// optional "and", optional trailing period. Values are clamped to >= 0 and the
// result is renormalized when the sum is within kParseSumTolerance of 1.
inline ActionDistribution parse_distribution(std::string_view text) {
    std::string low(text);
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    auto is_word = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };

    ActionDistribution d;
    for (int i = 0; i < kNumActions; ++i) {
        std::string phrase(kActionPhrases[static_cast<std::size_t>(i)]);
        std::transform(phrase.begin(), phrase.end(), phrase.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        int found = 0;
        double value = 0.0;
        std::size_t at = 0;
        while ((at = low.find(phrase, at)) != std::string::npos) {
            const std::size_t end = at + phrase.size();
            const bool lb = at == 0 || !is_word(low[at - 1]);
            const bool rb = end >= low.size() || !is_word(low[end]);
            if (!lb || !rb) {
                at = end;
                continue;
            }
            // expect: <ws> with <ws> probability <ws> <number>
            std::size_t p = end;
            auto skip_ws = [&]() {
                while (p < low.size() && std::isspace(static_cast<unsigned char>(low[p]))) ++p;
            };
            auto expect_word = [&](std::string_view w) {
                skip_ws();
                if (low.compare(p, w.size(), w) != 0) return false;
                p += w.size();
                return true;
            };
            if (!expect_word("with") || !expect_word("probability")) {
                at = end;
                continue;
            }
            skip_ws();
            const std::size_t num_start = p;
            if (p < low.size() && (low[p] == '-' || low[p] == '+')) ++p;
            bool digits = false, dot = false;
            while (p < low.size()) {
                if (std::isdigit(static_cast<unsigned char>(low[p]))) {
                    digits = true;
                    ++p;
                } else if (low[p] == '.' && !dot) {
                    dot = true;
                    ++p;
                } else {
                    break;
                }
            }
            // a bare trailing period is sentence punctuation, not a decimal
            if (dot && p > num_start && low[p - 1] == '.' &&
                (p >= low.size() || !std::isdigit(static_cast<unsigned char>(low[p])))) {
                --p;
                dot = false;
            }
            if (!digits)
                throw ParseError(ParseError::Kind::BadNumber,
                                 "parse_distribution: non-numeric value for clause '" +
                                     std::string(kActionPhrases[static_cast<std::size_t>(i)]) + "'");
            value = std::strtod(low.substr(num_start, p - num_start).c_str(), nullptr);
            ++found;
            at = end;
        }
        if (found == 0)
            throw ParseError(ParseError::Kind::MissingClause,
                             "parse_distribution: missing clause: " +
                                 std::string(kActionPhrases[static_cast<std::size_t>(i)]));
        if (found > 1)
            throw ParseError(ParseError::Kind::DuplicateClause,
                             "parse_distribution: duplicate clause: " +
                                 std::string(kActionPhrases[static_cast<std::size_t>(i)]));
        d[i] = std::max(0.0, value);
    }
    const double sum = d.sum();
    if (std::abs(sum - 1.0) > kParseSumTolerance) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f", sum);
        throw ParseError(ParseError::Kind::BadSum,
                         std::string("parse_distribution: clause values sum to ") + buf +
                             ", outside 1 +/- 0.05");
    }
    for (int i = 0; i < kNumActions; ++i) d[i] /= sum;
    return d;
}

// ---- prompt templates ----

inline constexpr std::string_view kGoalPlaceholder = "⟨GoalHere⟩";
inline constexpr std::string_view kImagePlaceholder = "⟨ImageHere⟩";
inline constexpr std::string_view kHistoryPlaceholder = "⟨HistoryHere⟩";
inline constexpr std::string_view kActionProbPlaceholder = "⟨ActionProbHere⟩";

// Variant 0 is the verbatim template sentence; the rest are paraphrases.
inline constexpr std::string_view kDefaultTemplateText =
    "Imagine you are a robot, and you are navigating to find "
    "⟨Goal⟩⟨GoalHere⟩⟨/Goal⟩. With current observation "
    "⟨Img⟩⟨ImageHere⟩⟨/Img⟩, history tokens "
    "⟨History⟩⟨HistoryHere⟩⟨/History⟩, and suggested actions "
    "probabilities ⟨ActionProb⟩⟨ActionProbHere⟩⟨/ActionProb⟩, "
    "please plan out your following action.\n"
    "---\n"
    "You are a robot searching for ⟨Goal⟩⟨GoalHere⟩⟨/Goal⟩. Your "
    "current observation is ⟨Img⟩⟨ImageHere⟩⟨/Img⟩, your history "
    "tokens are ⟨History⟩⟨HistoryHere⟩⟨/History⟩, and the "
    "suggested action probabilities are "
    "⟨ActionProb⟩⟨ActionProbHere⟩⟨/ActionProb⟩. Decide your next "
    "action.\n"
    "---\n"
    "Act as a navigation robot looking for ⟨Goal⟩⟨GoalHere⟩⟨/Goal⟩. "
    "Given the observation ⟨Img⟩⟨ImageHere⟩⟨/Img⟩, the history "
    "⟨History⟩⟨HistoryHere⟩⟨/History⟩, and suggested action "
    "probabilities ⟨ActionProb⟩⟨ActionProbHere⟩⟨/ActionProb⟩, plan "
    "your following move.\n"
    "---\n"
    "Suppose you are a robot whose goal is to reach "
    "⟨Goal⟩⟨GoalHere⟩⟨/Goal⟩. Using the current observation "
    "⟨Img⟩⟨ImageHere⟩⟨/Img⟩ together with history tokens "
    "⟨History⟩⟨HistoryHere⟩⟨/History⟩ and the action probability "
    "suggestion ⟨ActionProb⟩⟨ActionProbHere⟩⟨/ActionProb⟩, choose "
    "what to do next.\n"
    "---\n"
    "Imagine being a navigation agent tasked with finding "
    "⟨Goal⟩⟨GoalHere⟩⟨/Goal⟩. The observation is "
    "⟨Img⟩⟨ImageHere⟩⟨/Img⟩, the collected history is "
    "⟨History⟩⟨HistoryHere⟩⟨/History⟩, and suggested actions "
    "probabilities are ⟨ActionProb⟩⟨ActionProbHere⟩⟨/ActionProb⟩. "
    "Please plan out your following action.\n";

inline std::vector<std::string> parse_template_text(std::string_view text) {
    std::vector<std::string> variants;
    std::string cur;
    std::istringstream in{std::string(text)};
    std::string line;
    auto flush = [&]() {
        while (!cur.empty() && (cur.back() == '\n' || cur.back() == ' ')) cur.pop_back();
        if (!cur.empty()) variants.push_back(cur);
        cur.clear();
    };
    while (std::getline(in, line)) {
        if (line == "---") {
            flush();
            continue;
        }
        cur += line;
        cur += "\n";
    }
    flush();
    for (const auto& v : variants) {
        for (std::string_view ph : {kGoalPlaceholder, kImagePlaceholder, kHistoryPlaceholder,
                                    kActionProbPlaceholder}) {
            std::size_t first = v.find(ph);
            if (first == std::string::npos)
                throw Error("prompt template variant missing placeholder " + std::string(ph));
            if (v.find(ph, first + 1) != std::string::npos)
                throw Error("prompt template variant repeats placeholder " + std::string(ph));
        }
    }
    return variants;
}

inline const std::vector<std::string>& default_templates() {
    static const std::vector<std::string> variants = parse_template_text(kDefaultTemplateText);
    return variants;
}

inline std::vector<std::string> load_templates(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read template file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_template_text(ss.str());
}

// 11 lines of the world-aligned patch ('#' occupied, '.' free, '@' agent)
// followed by one gps/compass line. Top line is the largest y offset.
inline std::string render_patch_text(const Observation& o) {
    std::string out;
    for (int dy = kPatchRadius; dy >= -kPatchRadius; --dy) {
        for (int dx = -kPatchRadius; dx <= kPatchRadius; ++dx) {
            if (dx == 0 && dy == 0) {
                out += '@';
                continue;
            }
            out += o.patch[static_cast<std::size_t>(Observation::patch_index(dx, dy))] ? '#' : '.';
        }
        out += '\n';
    }
    char buf[80];
    std::snprintf(buf, sizeof buf, "gps=(%.2f,%.2f) compass=%.3frad", o.gps_dx_m, o.gps_dy_m,
                  o.compass_rad);
    out += buf;
    return out;
}

inline std::string replace_once(std::string text, std::string_view placeholder,
                                std::string_view value) {
    const std::size_t at = text.find(placeholder);
    if (at == std::string::npos) throw Error("prompt template lost a placeholder");
    text.replace(at, placeholder.size(), value);
    return text;
}

inline std::string render_prompt(GoalCategory goal, const Observation& obs,
                                 std::string_view history_summary,
                                 const ActionDistribution& p_sota, std::size_t variant_index,
                                 const std::vector<std::string>& templates = default_templates()) {
    if (variant_index >= templates.size())
        throw Error("render_prompt: template variant index out of range: " +
                    std::to_string(variant_index));
    std::string text = templates[variant_index];
    text = replace_once(std::move(text), kGoalPlaceholder, goal_label(goal));
    text = replace_once(std::move(text), kImagePlaceholder, render_patch_text(obs));
    text = replace_once(std::move(text), kHistoryPlaceholder, history_summary);
    text = replace_once(std::move(text), kActionProbPlaceholder, serialize_distribution(p_sota));
    return text;
}

}  // namespace navfuse
