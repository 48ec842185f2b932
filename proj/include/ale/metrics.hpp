#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ale/grade_scale.hpp"

namespace ale {

struct Prediction {
    std::string student_id;
    std::string course_id;
    int term = 0;
    LetterGrade truth = LetterGrade::F;
    double predicted = 0.0;  // unclamped model output
    LetterGrade predicted_letter = LetterGrade::F;
};

using PredictionSet = std::vector<Prediction>;

/// Fills predicted_letter from the clamped numeric prediction.
Prediction make_prediction(std::string student_id, std::string course_id, int term, LetterGrade truth,
                           double predicted);

/// Mean |truth - clamp(predicted)|. Throws ProtocolError on an empty set.
double mae(std::span<const Prediction> preds);

/// Fraction of predictions within `ticks` ticks of the true letter.
double pta(std::span<const Prediction> preds, int ticks);

struct MetricsReport {
    std::string partition = "ALL";
    std::size_t n = 0;
    double mae = 0.0;
    double pta0 = 0.0;
    double pta1 = 0.0;
    double pta2 = 0.0;
};

MetricsReport compute_metrics(std::span<const Prediction> preds, std::string partition = "ALL");

/// CSV `student_id,course_id,term,true_grade,pred_numeric,pred_grade`,
/// pred_numeric with six decimals.
void write_predictions_csv(std::ostream& out, std::span<const Prediction> preds);
PredictionSet read_predictions_csv(std::istream& in);

}  // namespace ale
