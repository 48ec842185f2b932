#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace ale {

/// Letter grades on the 4.0 ladder, highest first.
enum class LetterGrade : std::uint8_t { APlus, A, AMinus, BPlus, B, BMinus, CPlus, C, CMinus, DPlus, D, F };

inline constexpr std::array<LetterGrade, 12> kLadder = {
    LetterGrade::APlus, LetterGrade::A,     LetterGrade::AMinus, LetterGrade::BPlus,
    LetterGrade::B,     LetterGrade::BMinus, LetterGrade::CPlus, LetterGrade::C,
    LetterGrade::CMinus, LetterGrade::DPlus, LetterGrade::D,     LetterGrade::F,
};

inline constexpr double kMinGrade = 0.0;
inline constexpr double kMaxGrade = 4.0;

std::string_view symbol(LetterGrade grade) noexcept;

/// Throws ParseError naming the token when it is not on the ladder.
LetterGrade parse_letter(std::string_view token);

double letter_to_numeric(LetterGrade grade) noexcept;

/// Nearest letter to `value` after clamping into [0, 4]. Ties go to the
/// higher grade and A+ is never returned. Throws NumericError on NaN/inf.
LetterGrade numeric_to_letter(double value);

/// Rung on the canonical ladder; A+ and A share rung 0, F is rung 10.
int ladder_position(LetterGrade grade) noexcept;

/// Number of ticks between two letters.
int tick_distance(LetterGrade a, LetterGrade b) noexcept;

double clamp_grade(double value) noexcept;

}  // namespace ale
