#include "ale/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "ale/errors.hpp"
#include "ale/snapshot.hpp"

namespace ale {

Prediction make_prediction(std::string student_id, std::string course_id, int term, LetterGrade truth,
                           double predicted) {
    return {std::move(student_id), std::move(course_id), term, truth, predicted,
            numeric_to_letter(clamp_grade(predicted))};
}

double mae(std::span<const Prediction> preds) {
    if (preds.empty()) throw ProtocolError("MAE of an empty prediction set");
    double sum = 0.0;
    for (const auto& p : preds) sum += std::abs(letter_to_numeric(p.truth) - clamp_grade(p.predicted));
    return sum / static_cast<double>(preds.size());
}

double pta(std::span<const Prediction> preds, int ticks) {
    if (preds.empty()) throw ProtocolError("PTA of an empty prediction set");
    if (ticks < 0) throw ConfigError("tick tolerance must be non-negative");
    std::size_t hits = 0;
    for (const auto& p : preds) {
        if (tick_distance(p.truth, p.predicted_letter) <= ticks) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

MetricsReport compute_metrics(std::span<const Prediction> preds, std::string partition) {
    return {std::move(partition), preds.size(), mae(preds), pta(preds, 0), pta(preds, 1), pta(preds, 2)};
}

void write_predictions_csv(std::ostream& out, std::span<const Prediction> preds) {
    out << "student_id,course_id,term,true_grade,pred_numeric,pred_grade\n";
    char buf[64];
    for (const auto& p : preds) {
        std::snprintf(buf, sizeof buf, "%.6f", p.predicted);
        out << p.student_id << ',' << p.course_id << ',' << p.term << ',' << symbol(p.truth) << ',' << buf << ','
            << symbol(p.predicted_letter) << '\n';
    }
}

PredictionSet read_predictions_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("predictions: missing header");
    PredictionSet out;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 6) throw ParseError("predictions row " + std::to_string(row) + ": expected 6 fields");
        Prediction p;
        p.student_id = f[0];
        p.course_id = f[1];
        p.term = std::stoi(f[2]);
        p.truth = parse_letter(f[3]);
        p.predicted = parse_real(f[4]);
        p.predicted_letter = parse_letter(f[5]);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace ale
