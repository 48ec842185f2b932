#pragma once

#include <cstdint>
#include <optional>

#include "ale/dataset.hpp"
#include "ale/model.hpp"

namespace ale {

/// Shape of a synthetic transcript set. Planted latent entries are drawn
/// uniform on (0, 1) and then multiplied by the per-family scale, which is
/// how experiments dial an effect up (dominant instructors) or off (zero).
struct SynthConfig {
    int n_students = 300;
    int n_courses = 60;
    int n_instructors = 25;
    int n_terms = 10;
    int k = 3;
    int min_courses_per_term = 2;
    int max_courses_per_term = 4;
    int max_terms_enrolled = 12;
    int max_start_term = -1;  // -1: half of n_terms
    int instructors_per_course = 3;
    int n_majors = 4;
    int n_subjects = 6;
    double ftf_fraction = 0.5;
    double noise_sigma = 0.15;
    double decay = 0.1;

    double scale_provided = 0.5;        // k_c
    double scale_required = 1.0;        // q_c
    double scale_academic_level = 1.0;  // p_al
    double scale_instructor = 0.5;      // q_in
    double scale_global = 1.5;          // p_g

    // When set, every planted latent entry takes this value instead.
    std::optional<double> fixed_latent_value;

    /// Throws ConfigError for infeasible settings.
    void validate() const;
};

struct SynthResult {
    Dataset data;
    ModelParams planted;  // ALE, count normalization, keyed by the generated ids
};

/// Deterministic for a fixed (config, seed). Students enrol term by term from
/// their start term, each term drawing courses they have not yet taken; each
/// (course, term) offering gets one instructor from the course's pool. A
/// grade is the planted ALE prediction given the student's realised history,
/// plus Gaussian noise, clamped to [0, 4] and snapped to the nearest letter.
SynthResult generate_synthetic(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace ale
