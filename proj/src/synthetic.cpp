#include "ale/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "ale/errors.hpp"
#include "ale/rng.hpp"

namespace ale {

namespace {

std::string make_id(const char* prefix, int i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, i);
    return buf;
}

}  // namespace

void SynthConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("synthetic config: " + what); };
    if (n_students < 1 || n_courses < 1 || n_instructors < 1 || n_terms < 1)
        fail("entity counts and n_terms must be positive");
    if (k < 1) fail("k must be >= 1");
    if (min_courses_per_term < 1 || min_courses_per_term > max_courses_per_term)
        fail("need 1 <= min_courses_per_term <= max_courses_per_term");
    if (max_courses_per_term > n_courses) fail("courses per term exceeds n_courses");
    if (max_terms_enrolled < 1) fail("max_terms_enrolled must be >= 1");
    if (max_start_term >= n_terms) fail("max_start_term must be < n_terms");
    if (instructors_per_course < 1 || instructors_per_course > n_instructors)
        fail("instructors_per_course must be in [1, n_instructors]");
    if (n_majors < 1 || n_subjects < 1) fail("n_majors and n_subjects must be positive");
    if (!(ftf_fraction >= 0.0 && ftf_fraction <= 1.0)) fail("ftf_fraction must be in [0, 1]");
    if (!(noise_sigma >= 0.0)) fail("noise_sigma must be non-negative");
    if (!(decay >= 0.0)) fail("decay must be non-negative");
    for (double s : {scale_provided, scale_required, scale_academic_level, scale_instructor, scale_global}) {
        if (!(s >= 0.0)) fail("family scales must be non-negative");
    }
}

SynthResult generate_synthetic(const SynthConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const int max_start = cfg.max_start_term < 0 ? cfg.n_terms / 2 : cfg.max_start_term;

    // Planted model over the full generated vocabulary.
    ModelSpec spec;
    spec.variant = Variant::ALE;
    EntityCounts counts{static_cast<std::size_t>(cfg.n_students), static_cast<std::size_t>(cfg.n_courses),
                        static_cast<std::size_t>(cfg.n_instructors), static_cast<std::size_t>(cfg.n_majors),
                        static_cast<std::size_t>(cfg.n_subjects)};
    ModelParams planted = init_params(spec, counts, cfg.k, seed);
    planted.decay = cfg.decay;
    auto scale = [&](Family f, double s) {
        for (double& v : planted.table(f).values) v = cfg.fixed_latent_value ? *cfg.fixed_latent_value : v * s;
    };
    scale(Family::CourseProvided, cfg.scale_provided);
    scale(Family::CourseRequired, cfg.scale_required);
    scale(Family::AcademicLevel, cfg.scale_academic_level);
    scale(Family::Instructor, cfg.scale_instructor);
    scale(Family::StudentGlobal, cfg.scale_global);

    std::vector<std::string> majors, subjects;
    planted.majors = {};
    planted.subjects = {};
    for (int i = 0; i < cfg.n_majors; ++i) majors.push_back(planted.majors.id(planted.majors.add(make_id("M", i, 2))));
    for (int i = 0; i < cfg.n_subjects; ++i)
        subjects.push_back(planted.subjects.id(planted.subjects.add(make_id("SUB", i, 2))));
    for (int i = 0; i < cfg.n_students; ++i) planted.students.add(make_id("s", i, 4));
    for (int i = 0; i < cfg.n_courses; ++i) planted.courses.add(make_id("c", i, 3));
    for (int i = 0; i < cfg.n_instructors; ++i) planted.instructors.add(make_id("i", i, 3));

    // Profiles.
    Rng profile_rng = make_stream(seed, "synth/profiles");
    std::vector<StudentProfile> students(static_cast<std::size_t>(cfg.n_students));
    {
        std::uniform_int_distribution<int> start(0, max_start);
        std::uniform_int_distribution<int> major(0, cfg.n_majors - 1);
        std::bernoulli_distribution ftf(cfg.ftf_fraction);
        for (int s = 0; s < cfg.n_students; ++s) {
            auto& p = students[static_cast<std::size_t>(s)];
            p.id = planted.students.id(static_cast<std::size_t>(s));
            p.start_term = start(profile_rng);
            p.major = majors[static_cast<std::size_t>(major(profile_rng))];
            p.cohort = ftf(profile_rng) ? Cohort::FTF : Cohort::TR;
        }
    }
    std::vector<CourseProfile> courses(static_cast<std::size_t>(cfg.n_courses));
    std::vector<std::vector<int>> pools(courses.size());
    {
        std::uniform_int_distribution<int> subject(0, cfg.n_subjects - 1);
        std::uniform_int_distribution<int> level(0, 3);
        std::vector<int> all(static_cast<std::size_t>(cfg.n_instructors));
        std::iota(all.begin(), all.end(), 0);
        for (std::size_t c = 0; c < courses.size(); ++c) {
            courses[c].id = planted.courses.id(c);
            courses[c].subject = subjects[static_cast<std::size_t>(subject(profile_rng))];
            courses[c].level = kCourseLevels[level(profile_rng)];
            std::shuffle(all.begin(), all.end(), profile_rng);
            pools[c].assign(all.begin(), all.begin() + cfg.instructors_per_course);
        }
    }

    Rng enroll_rng = make_stream(seed, "synth/enroll");
    Rng offering_rng = make_stream(seed, "synth/offering");
    Rng noise_rng = make_stream(seed, "synth/noise");
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<int> load(cfg.min_courses_per_term, cfg.max_courses_per_term);

    std::vector<std::vector<HistoryEntry>> history(students.size());
    std::vector<std::vector<int>> untaken(students.size());
    for (auto& u : untaken) {
        u.resize(courses.size());
        std::iota(u.begin(), u.end(), 0);
    }

    std::vector<GradeRow> rows;
    for (int t = 0; t < cfg.n_terms; ++t) {
        // One instructor per offering, drawn on first enrolment.
        std::map<int, int> offering;
        auto instructor_for = [&](int c) {
            auto it = offering.find(c);
            if (it != offering.end()) return it->second;
            const auto& pool = pools[static_cast<std::size_t>(c)];
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            return offering.emplace(c, pool[pick(offering_rng)]).first->second;
        };

        std::vector<std::vector<HistoryEntry>> this_term(students.size());
        for (std::size_t s = 0; s < students.size(); ++s) {
            const StudentProfile& sp = students[s];
            if (t < sp.start_term || t >= sp.start_term + cfg.max_terms_enrolled) continue;
            auto& u = untaken[s];
            const auto n = std::min<std::size_t>(static_cast<std::size_t>(load(enroll_rng)), u.size());
            for (std::size_t j = 0; j < n; ++j) {
                std::uniform_int_distribution<std::size_t> pick(j, u.size() - 1);
                std::swap(u[j], u[pick(enroll_rng)]);
            }
            std::vector<int> chosen(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(n));
            u.erase(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(n));
            std::sort(chosen.begin(), chosen.end());

            for (int c : chosen) {
                const int in = instructor_for(c);
                Query q;
                q.student = s;
                q.course = static_cast<std::size_t>(c);
                q.instructor = static_cast<std::size_t>(in);
                q.term = t;
                q.academic_level = clamp_academic_level(t - sp.start_term);
                q.history = history[s];
                double g = predict(planted, q);
                if (cfg.noise_sigma > 0.0) g += cfg.noise_sigma * noise(noise_rng);
                const LetterGrade letter = numeric_to_letter(clamp_grade(g));

                const CourseProfile& cp = courses[static_cast<std::size_t>(c)];
                rows.push_back({sp.id, cp.id, planted.instructors.id(static_cast<std::size_t>(in)), t, letter,
                                sp.start_term, sp.major, cp.subject, cp.level, sp.cohort});
                this_term[s].push_back({static_cast<std::size_t>(c), t, letter_to_numeric(letter)});
            }
        }
        for (std::size_t s = 0; s < students.size(); ++s)
            history[s].insert(history[s].end(), this_term[s].begin(), this_term[s].end());
    }

    SynthResult result{Dataset::from_rows(std::move(rows)), std::move(planted)};
    result.planted.global_mean = result.data.mean_grade();
    return result;
}

}  // namespace ale
