#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ale/dataset.hpp"

namespace ale {

enum class Variant { MF, MFBias, MFDomain, ACK, ACKBias, ALE, ALEBias };
enum class StudentGroup { None, Major, AcademicLevel };
enum class CourseGroup { None, Subject, CourseLevel };
enum class CkNormalization { Count, None };

std::string_view to_string(Variant v) noexcept;
std::string_view to_string(StudentGroup g) noexcept;
std::string_view to_string(CourseGroup g) noexcept;
std::string_view to_string(CkNormalization n) noexcept;
// Case-insensitive; accepts "mf", "mf-b", "mf-d", "ack", "ack-b", "ale", "ale-b".
Variant parse_variant(std::string_view s);
StudentGroup parse_student_group(std::string_view s);
CourseGroup parse_course_group(std::string_view s);
CkNormalization parse_ck_normalization(std::string_view s);

/// Selects the prediction formula. Ablation flags only matter for ALE and
/// ALE-b; grouping keys only for MF-d.
struct ModelSpec {
    Variant variant = Variant::ALE;
    bool use_al = true;
    bool use_in = true;
    bool use_g = true;
    StudentGroup student_group = StudentGroup::None;
    CourseGroup course_group = CourseGroup::None;
    CkNormalization ck_normalization = CkNormalization::Count;

    bool mf_family() const noexcept {
        return variant == Variant::MF || variant == Variant::MFBias || variant == Variant::MFDomain;
    }
    bool ck_family() const noexcept { return !mf_family(); }
    bool ale_family() const noexcept { return variant == Variant::ALE || variant == Variant::ALEBias; }
    bool has_bias() const noexcept {
        return variant == Variant::MFBias || variant == Variant::ACKBias || variant == Variant::ALEBias;
    }
    bool academic_level_on() const noexcept { return ale_family() && use_al; }
    bool instructor_on() const noexcept { return ale_family() && use_in; }
    bool global_on() const noexcept { return ale_family() && use_g; }

    /// Short label such as "ALE", "ALE-no-in" or "MF-d(major,subject)".
    std::string label() const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct HyperParams {
    int k = 5;
    double decay = 0.01;   // lambda, per term
    double gamma = 0.01;   // L2 weight
    double alpha1 = 0.01;  // L1 on academic-level and instructor factors
    double alpha2 = 0.1;   // L1 on student global factors
    double eta = 0.01;     // learning rate
    int max_iter = 200;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

inline constexpr std::size_t kAcademicLevels = 13;  // levels 0..12, clamped

enum class Family : std::uint8_t {
    StudentFactor,     // p_s (MF family)
    CourseRequired,    // q_c
    CourseProvided,    // k_c (CK family)
    AcademicLevel,     // p_al
    Instructor,        // q_in
    StudentGlobal,     // p_g
    StudentBias,       // b_s
    CourseBias,        // b_c
    StudentGroupBias,  // b_s^{phi(c)}: row = student, column = course group
    CourseGroupBias,   // b_c^{phi(s)}: row = course, column = student group
};
inline constexpr std::size_t kFamilyCount = 10;

std::string_view family_name(Family f) noexcept;
Family parse_family(std::string_view name);

/// Dense row-major table; zero rows means the family is not allocated.
struct FactorTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    FactorTable() = default;
    FactorTable(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
    bool allocated() const noexcept { return rows > 0; }

    friend bool operator==(const FactorTable&, const FactorTable&) = default;
};

struct EntityCounts {
    std::size_t students = 0;
    std::size_t courses = 0;
    std::size_t instructors = 0;
    std::size_t majors = 0;
    std::size_t subjects = 0;
};

/// Every learned table of one model plus what is needed to score new data:
/// the entity vocabularies it was fit on, the decay rate and the global
/// mean used for cold starts.
struct ModelParams {
    ModelSpec spec;
    int k = 0;
    double decay = 0.0;
    std::uint64_t seed = 0;
    double global_mean = 0.0;

    Vocabulary students;
    Vocabulary courses;
    Vocabulary instructors;
    Vocabulary majors;
    Vocabulary subjects;

    std::array<FactorTable, kFamilyCount> tables;

    FactorTable& table(Family f) { return tables[static_cast<std::size_t>(f)]; }
    const FactorTable& table(Family f) const { return tables[static_cast<std::size_t>(f)]; }
    bool has(Family f) const { return table(f).allocated(); }

    std::size_t student_group_count() const;
    std::size_t course_group_count() const;

    EntityCounts counts() const {
        return {students.size(), courses.size(), instructors.size(), majors.size(), subjects.size()};
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Families the spec allocates, in a fixed order.
std::vector<Family> required_families(const ModelSpec& spec);

/// Allocates the families demanded by `spec`; latent entries i.i.d.
/// uniform on (0, 1), biases zero. Each family draws from its own named
/// stream, so enabling an ablation does not reshuffle the others.
ModelParams init_params(const ModelSpec& spec, const EntityCounts& counts, int k, std::uint64_t seed);

/// Same, and copies the dataset's vocabularies and mean grade into the model.
ModelParams init_params(const ModelSpec& spec, const Dataset& data, int k, std::uint64_t seed);

/// A prior grade in model index space.
struct HistoryEntry {
    std::size_t course = 0;
    int term = 0;
    double grade = 0.0;
};

/// One prediction request with every entity resolved against the model.
struct Query {
    std::size_t student = 0;
    std::size_t course = 0;
    std::optional<std::size_t> instructor;  // nullopt: cold-start, q_in = 0
    int term = 0;
    int academic_level = 0;                  // clamped to [0, 12]
    std::optional<std::size_t> student_group;  // MF-d; nullopt: unseen key
    std::optional<std::size_t> course_group;
    std::span<const HistoryEntry> history;  // strictly before `term`
};

int clamp_academic_level(int raw) noexcept;

/// Time-decayed, grade-weighted sum of provided-knowledge vectors, divided by
/// |history| under Count normalization. Throws std::logic_error when an
/// entry is not strictly before `term`.
void cumulative_knowledge(const FactorTable& provided, std::span<const HistoryEntry> history, int term,
                          double decay, CkNormalization norm, std::span<double> out);
std::vector<double> cumulative_knowledge(const FactorTable& provided, std::span<const HistoryEntry> history,
                                         int term, double decay, CkNormalization norm);

/// Unclamped prediction of the spec's formula.
double predict(const ModelParams& params, const Query& query);

struct Contributions {
    double ck = 0.0;    // p_ck^T (q_c + q_in)
    double al = 0.0;    // p_al^T (q_c + q_in)
    double g = 0.0;     // p_g^T q_c
    double bias = 0.0;  // b_s + b_c
    double total() const noexcept { return ck + al + g + bias; }
};

/// Additive split of an ALE / ALE-b prediction. Throws ConfigError for
/// other variants.
Contributions decompose_contributions(const ModelParams& params, const Query& query);

/// Resolves records of a target dataset, with histories drawn from a source
/// dataset, into queries against a fitted model. Entity lookups are
/// precomputed so scoring and training stay on dense indices.
class QueryResolver {
public:
    QueryResolver(const ModelParams& params, const Dataset& target, const Dataset& history_source);

    /// nullopt when the student or course is unknown to the model.
    std::optional<Query> resolve(std::size_t record_index) const;

    /// Prediction with the cold-start fallback to the global mean.
    double predict(std::size_t record_index) const;

private:
    const ModelParams& params_;
    const Dataset& target_;
    std::vector<std::optional<std::size_t>> student_map_;
    std::vector<std::optional<std::size_t>> course_map_;
    std::vector<std::optional<std::size_t>> instructor_map_;
    std::vector<std::optional<std::size_t>> major_map_;
    std::vector<std::optional<std::size_t>> subject_map_;
    std::vector<std::optional<std::size_t>> history_student_;
    // Per source student, prior grades in model space, sorted by term.
    std::vector<std::vector<HistoryEntry>> histories_;
};

/// Predictions (unclamped) for every record of `target`, in record order.
std::vector<double> predict_dataset(const ModelParams& params, const Dataset& target,
                                    const Dataset& history_source);

}  // namespace ale
