#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ale/grade_scale.hpp"

namespace ale {

enum class Cohort { FTF, TR };

std::string_view to_string(Cohort cohort) noexcept;
Cohort parse_cohort(std::string_view token);

inline constexpr int kCourseLevels[] = {100, 200, 300, 400};

/// Bidirectional map between opaque string ids and dense indices, assigned
/// in first-seen order.
class Vocabulary {
public:
    std::size_t add(std::string_view id);
    std::optional<std::size_t> find(std::string_view id) const;
    const std::string& id(std::size_t index) const { return ids_.at(index); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    std::size_t size() const noexcept { return ids_.size(); }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.ids_ == b.ids_; }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct StudentProfile {
    std::string id;
    int start_term = 0;
    std::string major;
    Cohort cohort = Cohort::FTF;
};

struct CourseProfile {
    std::string id;
    std::string subject;
    int level = 100;
};

/// One CSV row with every field still keyed by its external id.
struct GradeRow {
    std::string student_id;
    std::string course_id;
    std::string instructor_id;
    int term = 0;
    LetterGrade grade = LetterGrade::F;
    int student_start_term = 0;
    std::string student_major;
    std::string course_subject;
    int course_level = 100;
    Cohort cohort = Cohort::FTF;
};

/// A grade observation with entities resolved to dense indices of the
/// owning Dataset.
struct GradeRecord {
    std::size_t student = 0;
    std::size_t course = 0;
    std::size_t instructor = 0;
    int term = 0;
    LetterGrade grade = LetterGrade::F;
    double numeric = 0.0;
};

/// Immutable, term-partitioned collection of grade records with entity
/// tables and per-student chronological timelines.
class Dataset {
public:
    Dataset() = default;

    /// Validates and indexes rows. Errors name the 1-based data row.
    static Dataset from_rows(std::vector<GradeRow> rows);

    std::span<const GradeRecord> records() const noexcept { return records_; }
    std::span<const GradeRow> rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    std::span<const StudentProfile> students() const noexcept { return students_; }
    std::span<const CourseProfile> courses() const noexcept { return courses_; }
    const Vocabulary& student_ids() const noexcept { return student_ids_; }
    const Vocabulary& course_ids() const noexcept { return course_ids_; }
    const Vocabulary& instructor_ids() const noexcept { return instructor_ids_; }
    const Vocabulary& majors() const noexcept { return majors_; }
    const Vocabulary& subjects() const noexcept { return subjects_; }

    /// Distinct terms present, ascending.
    std::vector<int> terms() const;

    /// Record indices of G_t, in input order. Empty when the term is absent.
    std::span<const std::size_t> term_group(int term) const;

    /// |G^t|: number of records with term <= t.
    std::size_t cumulative_size(int term) const;

    /// Record indices of one student, sorted by term (stable in input order).
    std::span<const std::size_t> timeline(std::size_t student) const { return timelines_.at(student); }

    /// Records of `student` strictly before `term`, chronological.
    std::span<const std::size_t> student_history(std::size_t student, int term) const;
    /// Same, by external id. Throws LookupError for an unknown student.
    std::span<const std::size_t> student_history(std::string_view student_id, int term) const;

    int academic_level(const GradeRecord& record) const {
        return record.term - students_[record.student].start_term;
    }

    double mean_grade() const;

    /// New dataset over the rows whose term satisfies lo <= term < hi.
    Dataset select_terms(int lo, int hi) const;

private:
    std::vector<GradeRow> rows_;
    std::vector<GradeRecord> records_;
    std::vector<StudentProfile> students_;
    std::vector<CourseProfile> courses_;
    Vocabulary student_ids_;
    Vocabulary course_ids_;
    Vocabulary instructor_ids_;
    Vocabulary majors_;
    Vocabulary subjects_;
    std::map<int, std::vector<std::size_t>> term_groups_;
    std::vector<std::vector<std::size_t>> timelines_;
};

inline constexpr std::string_view kCsvHeader =
    "student_id,course_id,instructor_id,term,grade,student_start_term,student_major,"
    "course_subject,course_level,cohort";

Dataset parse_csv(std::istream& in);
Dataset load_csv(const std::string& path);
void write_csv(std::ostream& out, const Dataset& data);

/// (G^{T-1}, G_T). Throws ProtocolError when T < 1 or either side is empty.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, int test_term);

/// (G^{T-2}, G_{T-1}) carved out of a training set for test term T.
std::pair<Dataset, Dataset> validation_split(const Dataset& train, int test_term);

}  // namespace ale
