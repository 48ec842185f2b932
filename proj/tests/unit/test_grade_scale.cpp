#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ale/errors.hpp"
#include "ale/grade_scale.hpp"

using namespace ale;

namespace {

// Written out independently of the library.
const std::vector<std::pair<std::string, double>> kTable = {
    {"A+", 4.0}, {"A", 4.0},  {"A-", 3.67}, {"B+", 3.33}, {"B", 3.0},  {"B-", 2.67},
    {"C+", 2.33}, {"C", 2.0}, {"C-", 1.67}, {"D+", 1.33}, {"D", 1.0}, {"F", 0.0},
};

std::string brute_nearest(double x) {
    x = std::min(4.0, std::max(0.0, x));
    std::string best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [sym, v] : kTable) {
        if (sym == "A+") continue;
        const double d = std::abs(v - x);
        if (d < best_d - 1e-9) {
            best = sym;
            best_d = d;
        }
    }
    return best;  // table is descending, so ties keep the higher grade
}

int brute_ticks(const std::string& a, const std::string& b) {
    // Walk the canonical ladder (A+ folded onto A) and count steps.
    const std::vector<std::string> ladder = {"A", "A-", "B+", "B", "B-", "C+", "C", "C-", "D+", "D", "F"};
    auto pos = [&](std::string s) {
        if (s == "A+") s = "A";
        for (int i = 0; i < static_cast<int>(ladder.size()); ++i)
            if (ladder[i] == s) return i;
        return -1;
    };
    return std::abs(pos(a) - pos(b));
}

}  // namespace

TEST_SUITE("grade_scale") {
    TEST_CASE("letter values follow the 4.0 ladder") {
        CHECK(letter_to_numeric(LetterGrade::AMinus) == doctest::Approx(3.67).epsilon(1e-12));
        CHECK(letter_to_numeric(LetterGrade::APlus) == 4.0);
        CHECK(letter_to_numeric(LetterGrade::BPlus) == doctest::Approx(3.33).epsilon(1e-12));
        CHECK(letter_to_numeric(LetterGrade::F) == 0.0);
        for (const auto& [sym, v] : kTable) CHECK(letter_to_numeric(parse_letter(sym)) == v);
    }

    TEST_CASE("adjacent steps alternate between 0.33 and 0.34 down to D") {
        for (std::size_t i = 2; i + 2 < kTable.size(); ++i) {
            const double step = kTable[i - 1].second - kTable[i].second;
            CHECK((std::abs(step - 0.33) < 1e-9 || std::abs(step - 0.34) < 1e-9));
        }
    }

    TEST_CASE("parse rejects unknown symbols") {
        CHECK_THROWS_AS(parse_letter("W"), ParseError);
        CHECK_THROWS_AS(parse_letter(""), ParseError);
        CHECK_THROWS_AS(parse_letter("a"), ParseError);
        for (LetterGrade g : kLadder) CHECK(parse_letter(symbol(g)) == g);
    }

    TEST_CASE("numeric to letter examples") {
        CHECK(numeric_to_letter(3.67) == LetterGrade::AMinus);
        CHECK(numeric_to_letter(3.5) == LetterGrade::AMinus);
        CHECK(numeric_to_letter(5.2) == LetterGrade::A);
        CHECK(numeric_to_letter(-3.0) == LetterGrade::F);
        CHECK(numeric_to_letter(0.5) == LetterGrade::D);
        CHECK_THROWS_AS(numeric_to_letter(std::nan("")), NumericError);
        CHECK_THROWS_AS(numeric_to_letter(std::numeric_limits<double>::infinity()), NumericError);
    }

    TEST_CASE("numeric to letter matches a brute-force nearest search") {
        for (int i = -100; i <= 500; ++i) {
            const double x = i / 100.0;
            CHECK(std::string(symbol(numeric_to_letter(x))) == brute_nearest(x));
        }
        for (const auto& [sym, v] : kTable) {
            if (sym != "A+") CHECK(std::string(symbol(numeric_to_letter(v))) == sym);
        }
    }

    TEST_CASE("A+ is never produced") {
        for (int i = 0; i <= 4000; ++i) CHECK(numeric_to_letter(i / 1000.0) != LetterGrade::APlus);
    }

    TEST_CASE("tick distance") {
        CHECK(tick_distance(LetterGrade::CPlus, LetterGrade::C) == 1);
        CHECK(tick_distance(LetterGrade::C, LetterGrade::CMinus) == 1);
        CHECK(tick_distance(LetterGrade::B, LetterGrade::B) == 0);
        CHECK(tick_distance(LetterGrade::A, LetterGrade::BMinus) == 4);
        CHECK(tick_distance(LetterGrade::APlus, LetterGrade::A) == 0);
        for (LetterGrade a : kLadder)
            for (LetterGrade b : kLadder) {
                CHECK(tick_distance(a, b) == brute_ticks(std::string(symbol(a)), std::string(symbol(b))));
                CHECK(tick_distance(a, b) == tick_distance(b, a));
            }
    }

    TEST_CASE("clamp") {
        CHECK(clamp_grade(-0.1) == 0.0);
        CHECK(clamp_grade(4.2) == 4.0);
        CHECK(clamp_grade(2.5) == 2.5);
    }
}
