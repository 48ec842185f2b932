#include "ale/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "ale/errors.hpp"
#include "ale/rng.hpp"

namespace ale {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

constexpr std::array<std::string_view, kFamilyCount> kFamilyNames = {
    "P", "Q", "K", "P_al", "Q_in", "P_g", "b_s", "b_c", "b_s_group", "b_c_group",
};

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::MF: return "MF";
        case Variant::MFBias: return "MF-b";
        case Variant::MFDomain: return "MF-d";
        case Variant::ACK: return "ACK";
        case Variant::ACKBias: return "ACK-b";
        case Variant::ALE: return "ALE";
        case Variant::ALEBias: return "ALE-b";
    }
    return "?";
}

std::string_view to_string(StudentGroup g) noexcept {
    switch (g) {
        case StudentGroup::None: return "none";
        case StudentGroup::Major: return "major";
        case StudentGroup::AcademicLevel: return "academic-level";
    }
    return "?";
}

std::string_view to_string(CourseGroup g) noexcept {
    switch (g) {
        case CourseGroup::None: return "none";
        case CourseGroup::Subject: return "subject";
        case CourseGroup::CourseLevel: return "course-level";
    }
    return "?";
}

std::string_view to_string(CkNormalization n) noexcept { return n == CkNormalization::Count ? "count" : "none"; }

Variant parse_variant(std::string_view s) {
    const std::string v = lower(s);
    if (v == "mf") return Variant::MF;
    if (v == "mf-b") return Variant::MFBias;
    if (v == "mf-d") return Variant::MFDomain;
    if (v == "ack") return Variant::ACK;
    if (v == "ack-b") return Variant::ACKBias;
    if (v == "ale") return Variant::ALE;
    if (v == "ale-b") return Variant::ALEBias;
    throw ConfigError("unknown variant '" + std::string(s) + "'");
}

StudentGroup parse_student_group(std::string_view s) {
    const std::string v = lower(s);
    if (v == "none") return StudentGroup::None;
    if (v == "major") return StudentGroup::Major;
    if (v == "academic-level" || v == "academic_level") return StudentGroup::AcademicLevel;
    throw ConfigError("unknown student group '" + std::string(s) + "'");
}

CourseGroup parse_course_group(std::string_view s) {
    const std::string v = lower(s);
    if (v == "none") return CourseGroup::None;
    if (v == "subject") return CourseGroup::Subject;
    if (v == "course-level" || v == "course_level") return CourseGroup::CourseLevel;
    throw ConfigError("unknown course group '" + std::string(s) + "'");
}

CkNormalization parse_ck_normalization(std::string_view s) {
    const std::string v = lower(s);
    if (v == "count") return CkNormalization::Count;
    if (v == "none") return CkNormalization::None;
    throw ConfigError("unknown ck normalization '" + std::string(s) + "'");
}

std::string ModelSpec::label() const {
    std::string out(to_string(variant));
    if (ale_family()) {
        if (!use_al) out += "-no-al";
        if (!use_in) out += "-no-in";
        if (!use_g) out += "-no-g";
    }
    if (variant == Variant::MFDomain) {
        out += "(" + std::string(to_string(student_group)) + "," + std::string(to_string(course_group)) + ")";
    }
    return out;
}

void HyperParams::validate() const {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (!(decay >= 0.0) || !(gamma >= 0.0) || !(alpha1 >= 0.0) || !(alpha2 >= 0.0))
        throw ConfigError("decay, gamma, alpha1 and alpha2 must be non-negative");
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("learning rate must be finite and non-negative");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
}

std::string_view family_name(Family f) noexcept { return kFamilyNames[static_cast<std::size_t>(f)]; }

Family parse_family(std::string_view name) {
    for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
        if (kFamilyNames[i] == name) return static_cast<Family>(i);
    }
    throw ParseError("unknown parameter family '" + std::string(name) + "'");
}

std::size_t ModelParams::student_group_count() const {
    switch (spec.student_group) {
        case StudentGroup::None: return 1;
        case StudentGroup::Major: return std::max<std::size_t>(majors.size(), 1);
        case StudentGroup::AcademicLevel: return kAcademicLevels;
    }
    return 1;
}

std::size_t ModelParams::course_group_count() const {
    switch (spec.course_group) {
        case CourseGroup::None: return 1;
        case CourseGroup::Subject: return std::max<std::size_t>(subjects.size(), 1);
        case CourseGroup::CourseLevel: return std::size(kCourseLevels);
    }
    return 1;
}

std::vector<Family> required_families(const ModelSpec& spec) {
    std::vector<Family> out;
    if (spec.mf_family()) out.push_back(Family::StudentFactor);
    out.push_back(Family::CourseRequired);
    if (spec.ck_family()) out.push_back(Family::CourseProvided);
    if (spec.academic_level_on()) out.push_back(Family::AcademicLevel);
    if (spec.instructor_on()) out.push_back(Family::Instructor);
    if (spec.global_on()) out.push_back(Family::StudentGlobal);
    if (spec.has_bias()) {
        out.push_back(Family::StudentBias);
        out.push_back(Family::CourseBias);
    }
    if (spec.variant == Variant::MFDomain) {
        out.push_back(Family::StudentGroupBias);
        out.push_back(Family::CourseGroupBias);
    }
    return out;
}

ModelParams init_params(const ModelSpec& spec, const EntityCounts& counts, int k, std::uint64_t seed) {
    if (k < 1) throw ConfigError("k must be >= 1");
    ModelParams p;
    p.spec = spec;
    p.k = k;
    p.seed = seed;
    // Group counts read the vocabulary sizes, so size placeholders first.
    for (std::size_t i = 0; i < counts.majors; ++i) p.majors.add("major" + std::to_string(i));
    for (std::size_t i = 0; i < counts.subjects; ++i) p.subjects.add("subject" + std::to_string(i));

    const auto kk = static_cast<std::size_t>(k);
    for (Family f : required_families(spec)) {
        FactorTable t;
        bool latent = true;
        switch (f) {
            case Family::StudentFactor:
            case Family::StudentGlobal: t = FactorTable(counts.students, kk); break;
            case Family::CourseRequired:
            case Family::CourseProvided: t = FactorTable(counts.courses, kk); break;
            case Family::AcademicLevel: t = FactorTable(kAcademicLevels, kk); break;
            case Family::Instructor: t = FactorTable(counts.instructors, kk); break;
            case Family::StudentBias: t = FactorTable(counts.students, 1); latent = false; break;
            case Family::CourseBias: t = FactorTable(counts.courses, 1); latent = false; break;
            case Family::StudentGroupBias:
                t = FactorTable(counts.students, p.course_group_count());
                latent = false;
                break;
            case Family::CourseGroupBias:
                t = FactorTable(counts.courses, p.student_group_count());
                latent = false;
                break;
        }
        if (latent) {
            Rng rng = make_stream(seed, "init/" + std::string(family_name(f)));
            for (double& v : t.values) v = uniform_open01(rng);
        }
        p.table(f) = std::move(t);
    }
    return p;
}

ModelParams init_params(const ModelSpec& spec, const Dataset& data, int k, std::uint64_t seed) {
    ModelParams p = init_params(spec,
                                EntityCounts{data.students().size(), data.courses().size(),
                                             data.instructor_ids().size(), data.majors().size(),
                                             data.subjects().size()},
                                k, seed);
    p.students = data.student_ids();
    p.courses = data.course_ids();
    p.instructors = data.instructor_ids();
    p.majors = data.majors();
    p.subjects = data.subjects();
    p.global_mean = data.mean_grade();
    return p;
}

int clamp_academic_level(int raw) noexcept {
    return std::clamp(raw, 0, static_cast<int>(kAcademicLevels) - 1);
}

void cumulative_knowledge(const FactorTable& provided, std::span<const HistoryEntry> history, int term,
                          double decay, CkNormalization norm, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (history.empty()) return;
    for (const HistoryEntry& h : history) {
        if (h.term >= term) throw std::logic_error("history entry is not strictly before the target term");
        const double w = std::exp(-decay * static_cast<double>(term - h.term)) * h.grade;
        const auto kc = provided.row(h.course);
        for (std::size_t d = 0; d < out.size(); ++d) out[d] += w * kc[d];
    }
    if (norm == CkNormalization::Count) {
        const double inv = 1.0 / static_cast<double>(history.size());
        for (double& v : out) v *= inv;
    }
}

std::vector<double> cumulative_knowledge(const FactorTable& provided, std::span<const HistoryEntry> history,
                                         int term, double decay, CkNormalization norm) {
    std::vector<double> out(provided.cols, 0.0);
    cumulative_knowledge(provided, history, term, decay, norm, out);
    return out;
}

namespace {

double bias_term(const ModelParams& p, const Query& q) {
    double b = 0.0;
    if (p.spec.has_bias()) {
        b += p.table(Family::StudentBias).values[q.student];
        b += p.table(Family::CourseBias).values[q.course];
    }
    return b;
}

Contributions ck_contributions(const ModelParams& p, const Query& q) {
    const auto k = static_cast<std::size_t>(p.k);
    std::vector<double> pck(k);
    cumulative_knowledge(p.table(Family::CourseProvided), q.history, q.term, p.decay, p.spec.ck_normalization, pck);

    const auto qc = p.table(Family::CourseRequired).row(q.course);
    std::vector<double> qen(qc.begin(), qc.end());
    if (p.spec.instructor_on() && q.instructor) {
        const auto qin = p.table(Family::Instructor).row(*q.instructor);
        for (std::size_t d = 0; d < k; ++d) qen[d] += qin[d];
    }

    Contributions c;
    c.ck = dot(pck, qen);
    if (p.spec.academic_level_on()) {
        c.al = dot(p.table(Family::AcademicLevel).row(static_cast<std::size_t>(clamp_academic_level(q.academic_level))),
                   qen);
    }
    if (p.spec.global_on()) c.g = dot(p.table(Family::StudentGlobal).row(q.student), qc);
    c.bias = bias_term(p, q);
    return c;
}

}  // namespace

double predict(const ModelParams& p, const Query& q) {
    if (p.spec.ck_family()) return ck_contributions(p, q).total();

    double g = dot(p.table(Family::StudentFactor).row(q.student), p.table(Family::CourseRequired).row(q.course));
    g += bias_term(p, q);
    if (p.spec.variant == Variant::MFDomain) {
        if (q.course_group) g += p.table(Family::StudentGroupBias).row(q.student)[*q.course_group];
        if (q.student_group) g += p.table(Family::CourseGroupBias).row(q.course)[*q.student_group];
    }
    return g;
}

Contributions decompose_contributions(const ModelParams& p, const Query& q) {
    if (!p.spec.ale_family()) throw ConfigError("contribution decomposition needs an ALE-family model");
    return ck_contributions(p, q);
}

QueryResolver::QueryResolver(const ModelParams& params, const Dataset& target, const Dataset& history_source)
    : params_(params), target_(target) {
    auto map_vocab = [](const Vocabulary& from, const Vocabulary& to) {
        std::vector<std::optional<std::size_t>> m(from.size());
        for (std::size_t i = 0; i < from.size(); ++i) m[i] = to.find(from.id(i));
        return m;
    };
    student_map_ = map_vocab(target.student_ids(), params.students);
    course_map_ = map_vocab(target.course_ids(), params.courses);
    instructor_map_ = map_vocab(target.instructor_ids(), params.instructors);
    major_map_ = map_vocab(target.majors(), params.majors);
    subject_map_ = map_vocab(target.subjects(), params.subjects);
    history_student_ = map_vocab(target.student_ids(), history_source.student_ids());

    const auto source_courses = map_vocab(history_source.course_ids(), params.courses);
    const auto records = history_source.records();
    histories_.resize(history_source.students().size());
    for (std::size_t s = 0; s < histories_.size(); ++s) {
        for (std::size_t r : history_source.timeline(s)) {
            const GradeRecord& rec = records[r];
            if (const auto c = source_courses[rec.course]) histories_[s].push_back({*c, rec.term, rec.numeric});
        }
    }
}

std::optional<Query> QueryResolver::resolve(std::size_t record_index) const {
    const GradeRecord& r = target_.records()[record_index];
    const auto s = student_map_[r.student];
    const auto c = course_map_[r.course];
    if (!s || !c) return std::nullopt;

    Query q;
    q.student = *s;
    q.course = *c;
    q.instructor = instructor_map_[r.instructor];
    q.term = r.term;
    q.academic_level = clamp_academic_level(target_.academic_level(r));

    if (params_.spec.variant == Variant::MFDomain) {
        const StudentProfile& sp = target_.students()[r.student];
        const CourseProfile& cp = target_.courses()[r.course];
        switch (params_.spec.student_group) {
            case StudentGroup::None: q.student_group = 0; break;
            case StudentGroup::Major:
                q.student_group = major_map_[*target_.majors().find(sp.major)];
                break;
            case StudentGroup::AcademicLevel: q.student_group = static_cast<std::size_t>(q.academic_level); break;
        }
        switch (params_.spec.course_group) {
            case CourseGroup::None: q.course_group = 0; break;
            case CourseGroup::Subject:
                q.course_group = subject_map_[*target_.subjects().find(cp.subject)];
                break;
            case CourseGroup::CourseLevel: q.course_group = static_cast<std::size_t>(cp.level / 100 - 1); break;
        }
    }

    if (const auto hs = history_student_[r.student]) {
        const auto& h = histories_[*hs];
        const auto end =
            std::partition_point(h.begin(), h.end(), [&](const HistoryEntry& e) { return e.term < r.term; });
        q.history = std::span<const HistoryEntry>(h.data(), static_cast<std::size_t>(end - h.begin()));
    }
    return q;
}

double QueryResolver::predict(std::size_t record_index) const {
    const auto q = resolve(record_index);
    return q ? ale::predict(params_, *q) : params_.global_mean;
}

std::vector<double> predict_dataset(const ModelParams& params, const Dataset& target,
                                    const Dataset& history_source) {
    const QueryResolver resolver(params, target, history_source);
    std::vector<double> out(target.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = resolver.predict(i);
    return out;
}

}  // namespace ale
