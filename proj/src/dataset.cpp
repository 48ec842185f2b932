#include "ale/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

#include "ale/errors.hpp"

namespace ale {

namespace {

std::string row_error(std::size_t row, const std::string& what) {
    return "row " + std::to_string(row) + ": " + what;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

int parse_int(std::string_view token, std::string_view column, std::size_t row) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError(row_error(row, "column " + std::string(column) + " is not an integer: '" +
                                            std::string(token) + "'"));
    }
    return value;
}

constexpr std::array<std::string_view, 10> kColumns = {
    "student_id",    "course_id",     "instructor_id", "term",         "grade",
    "student_start_term", "student_major", "course_subject", "course_level", "cohort",
};

}  // namespace

std::string_view to_string(Cohort cohort) noexcept { return cohort == Cohort::FTF ? "FTF" : "TR"; }

Cohort parse_cohort(std::string_view token) {
    if (token == "FTF") return Cohort::FTF;
    if (token == "TR") return Cohort::TR;
    throw ParseError("unknown cohort '" + std::string(token) + "'");
}

std::size_t Vocabulary::add(std::string_view id) {
    auto [it, inserted] = index_.try_emplace(std::string(id), ids_.size());
    if (inserted) ids_.emplace_back(id);
    return it->second;
}

std::optional<std::size_t> Vocabulary::find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Dataset Dataset::from_rows(std::vector<GradeRow> rows) {
    Dataset d;
    d.records_.reserve(rows.size());
    std::set<std::tuple<std::size_t, std::size_t, int>> seen;

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const GradeRow& r = rows[i];
        const std::size_t row_no = i + 1;
        if (r.student_id.empty() || r.course_id.empty() || r.instructor_id.empty())
            throw ParseError(row_error(row_no, "empty identifier"));
        if (r.term < 0) throw ParseError(row_error(row_no, "negative term"));
        if (r.student_start_term < 0) throw ParseError(row_error(row_no, "negative start term"));
        if (r.term < r.student_start_term)
            throw ParseError(row_error(row_no, "term " + std::to_string(r.term) + " precedes start term " +
                                                   std::to_string(r.student_start_term)));
        if (r.student_major.empty()) throw ParseError(row_error(row_no, "empty major"));
        if (std::find(std::begin(kCourseLevels), std::end(kCourseLevels), r.course_level) ==
            std::end(kCourseLevels))
            throw ParseError(row_error(row_no, "course level must be 100/200/300/400"));

        const std::size_t s = d.student_ids_.add(r.student_id);
        if (s == d.students_.size()) {
            d.students_.push_back({r.student_id, r.student_start_term, r.student_major, r.cohort});
            d.majors_.add(r.student_major);
        } else {
            const StudentProfile& p = d.students_[s];
            if (p.start_term != r.student_start_term || p.major != r.student_major || p.cohort != r.cohort)
                throw ParseError(row_error(row_no, "conflicting profile for student " + r.student_id));
        }

        const std::size_t c = d.course_ids_.add(r.course_id);
        if (c == d.courses_.size()) {
            d.courses_.push_back({r.course_id, r.course_subject, r.course_level});
            d.subjects_.add(r.course_subject);
        } else {
            const CourseProfile& p = d.courses_[c];
            if (p.subject != r.course_subject || p.level != r.course_level)
                throw ParseError(row_error(row_no, "conflicting profile for course " + r.course_id));
        }

        const std::size_t in = d.instructor_ids_.add(r.instructor_id);

        if (!seen.emplace(s, c, r.term).second)
            throw ParseError(row_error(row_no, "duplicate (student, course, term) = (" + r.student_id + ", " +
                                                   r.course_id + ", " + std::to_string(r.term) + ")"));

        d.records_.push_back({s, c, in, r.term, r.grade, letter_to_numeric(r.grade)});
        d.term_groups_[r.term].push_back(i);
    }

    d.timelines_.resize(d.students_.size());
    for (std::size_t i = 0; i < d.records_.size(); ++i) d.timelines_[d.records_[i].student].push_back(i);
    for (auto& tl : d.timelines_) {
        std::stable_sort(tl.begin(), tl.end(),
                         [&](std::size_t a, std::size_t b) { return d.records_[a].term < d.records_[b].term; });
    }
    d.rows_ = std::move(rows);
    return d;
}

std::vector<int> Dataset::terms() const {
    std::vector<int> out;
    out.reserve(term_groups_.size());
    for (const auto& [t, _] : term_groups_) out.push_back(t);
    return out;
}

std::span<const std::size_t> Dataset::term_group(int term) const {
    const auto it = term_groups_.find(term);
    if (it == term_groups_.end()) return {};
    return it->second;
}

std::size_t Dataset::cumulative_size(int term) const {
    std::size_t n = 0;
    for (const auto& [t, group] : term_groups_) {
        if (t > term) break;
        n += group.size();
    }
    return n;
}

std::span<const std::size_t> Dataset::student_history(std::size_t student, int term) const {
    std::span<const std::size_t> tl = timelines_.at(student);
    const auto end = std::partition_point(tl.begin(), tl.end(),
                                          [&](std::size_t r) { return records_[r].term < term; });
    return tl.first(static_cast<std::size_t>(end - tl.begin()));
}

std::span<const std::size_t> Dataset::student_history(std::string_view student_id, int term) const {
    const auto s = student_ids_.find(student_id);
    if (!s) throw LookupError("unknown student '" + std::string(student_id) + "'");
    return student_history(*s, term);
}

double Dataset::mean_grade() const {
    if (records_.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : records_) sum += r.numeric;
    return sum / static_cast<double>(records_.size());
}

Dataset Dataset::select_terms(int lo, int hi) const {
    std::vector<GradeRow> rows;
    for (const auto& r : rows_) {
        if (r.term >= lo && r.term < hi) rows.push_back(r);
    }
    return from_rows(std::move(rows));
}

Dataset parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input: header row required");
    const auto header = split_fields(trim(line));
    std::array<std::size_t, kColumns.size()> col{};
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
        const auto it = std::find_if(header.begin(), header.end(),
                                     [&](std::string_view h) { return trim(h) == kColumns[c]; });
        if (it == header.end()) throw ParseError("missing column '" + std::string(kColumns[c]) + "'");
        col[c] = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<GradeRow> rows;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        ++row_no;
        const auto f = split_fields(text);
        if (f.size() != header.size())
            throw ParseError(row_error(row_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                                   std::to_string(f.size())));
        auto field = [&](std::size_t c) { return trim(f[col[c]]); };
        GradeRow r;
        r.student_id = field(0);
        r.course_id = field(1);
        r.instructor_id = field(2);
        r.term = parse_int(field(3), kColumns[3], row_no);
        try {
            r.grade = parse_letter(field(4));
            r.cohort = parse_cohort(field(9));
        } catch (const ParseError& e) {
            throw ParseError(row_error(row_no, e.what()));
        }
        r.student_start_term = parse_int(field(5), kColumns[5], row_no);
        r.student_major = field(6);
        r.course_subject = field(7);
        r.course_level = parse_int(field(8), kColumns[8], row_no);
        rows.push_back(std::move(r));
    }
    return Dataset::from_rows(std::move(rows));
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    out << kCsvHeader << '\n';
    for (const auto& r : data.rows()) {
        out << r.student_id << ',' << r.course_id << ',' << r.instructor_id << ',' << r.term << ','
            << symbol(r.grade) << ',' << r.student_start_term << ',' << r.student_major << ','
            << r.course_subject << ',' << r.course_level << ',' << to_string(r.cohort) << '\n';
    }
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, int test_term) {
    if (test_term < 1) throw ProtocolError("test term must be >= 1 so that training data exists");
    if (data.term_group(test_term).empty())
        throw ProtocolError("test term " + std::to_string(test_term) + " has no records");
    Dataset train = data.select_terms(0, test_term);
    if (train.empty()) throw ProtocolError("no records before test term " + std::to_string(test_term));
    return {std::move(train), data.select_terms(test_term, test_term + 1)};
}

std::pair<Dataset, Dataset> validation_split(const Dataset& train, int test_term) {
    if (test_term < 2) throw ProtocolError("validation split needs test term >= 2");
    return split_train_test(train, test_term - 1);
}

}  // namespace ale
