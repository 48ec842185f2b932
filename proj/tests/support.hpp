#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ale/dataset.hpp"
#include "ale/model.hpp"

namespace ale::test {

inline GradeRow row(std::string student, std::string course, int term, std::string_view grade,
                    std::string instructor = "i1", int start = 0, std::string major = "CS",
                    std::string subject = "CS", int level = 100, Cohort cohort = Cohort::FTF) {
    GradeRow r;
    r.student_id = std::move(student);
    r.course_id = std::move(course);
    r.instructor_id = std::move(instructor);
    r.term = term;
    r.grade = parse_letter(grade);
    r.student_start_term = start;
    r.student_major = std::move(major);
    r.course_subject = std::move(subject);
    r.course_level = level;
    r.cohort = cohort;
    return r;
}

// A fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("ale_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void fill_uniform(ModelParams& params, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    for (auto& t : params.tables)
        for (double& v : t.values) v = u(rng);
}

}  // namespace ale::test
