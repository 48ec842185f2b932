#include "ale/grade_scale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "ale/errors.hpp"

namespace ale {

namespace {

struct ScalePoint {
    std::string_view symbol;
    double value;
};

// Indexed by the enum's underlying value.
constexpr std::array<ScalePoint, 12> kScale = {{
    {"A+", 4.0},
    {"A", 4.0},
    {"A-", 3.67},
    {"B+", 3.33},
    {"B", 3.0},
    {"B-", 2.67},
    {"C+", 2.33},
    {"C", 2.0},
    {"C-", 1.67},
    {"D+", 1.33},
    {"D", 1.0},
    {"F", 0.0},
}};

constexpr double kTieEpsilon = 1e-9;

constexpr std::size_t idx(LetterGrade g) { return static_cast<std::size_t>(g); }

}  // namespace

std::string_view symbol(LetterGrade grade) noexcept { return kScale[idx(grade)].symbol; }

LetterGrade parse_letter(std::string_view token) {
    for (LetterGrade g : kLadder) {
        if (kScale[idx(g)].symbol == token) return g;
    }
    throw ParseError("unknown grade symbol '" + std::string(token) + "'");
}

double letter_to_numeric(LetterGrade grade) noexcept { return kScale[idx(grade)].value; }

double clamp_grade(double value) noexcept { return std::clamp(value, kMinGrade, kMaxGrade); }

LetterGrade numeric_to_letter(double value) {
    if (!std::isfinite(value)) throw NumericError("cannot convert non-finite grade to a letter");
    const double v = clamp_grade(value);
    // Walk from A downward; a later letter wins only when strictly closer, so
    // ties resolve toward the higher grade.
    LetterGrade best = LetterGrade::A;
    double best_dist = std::abs(v - letter_to_numeric(best));
    for (std::size_t i = idx(LetterGrade::AMinus); i < kLadder.size(); ++i) {
        const double d = std::abs(v - kScale[i].value);
        if (d < best_dist - kTieEpsilon) {
            best = kLadder[i];
            best_dist = d;
        }
    }
    return best;
}

int ladder_position(LetterGrade grade) noexcept {
    return grade == LetterGrade::APlus ? 0 : static_cast<int>(idx(grade)) - 1;
}

int tick_distance(LetterGrade a, LetterGrade b) noexcept {
    return std::abs(ladder_position(a) - ladder_position(b));
}

}  // namespace ale
