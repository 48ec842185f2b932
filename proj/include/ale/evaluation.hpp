#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ale/dataset.hpp"
#include "ale/metrics.hpp"
#include "ale/model.hpp"
#include "ale/trainer.hpp"

namespace ale {

enum class PartitionKey { All, Cohort, StartTerm, Major };

std::string_view to_string(PartitionKey key) noexcept;
PartitionKey parse_partition(std::string_view s);  // all, cohort, start-term, major

/// Label of each record of `data` under `key` ("ALL" for All).
std::vector<std::string> partition_labels(const Dataset& data, PartitionKey key);

/// Distinct labels in report order: integers numerically, then the rest
/// lexicographically.
std::vector<std::string> ordered_labels(std::span<const std::string> labels);

/// One prediction per test record, histories taken from `history`.
PredictionSet predict_records(const ModelParams& params, const Dataset& test, const Dataset& history);

struct Evaluation {
    PredictionSet predictions;
    std::vector<std::string> labels;     // aligned with predictions
    std::vector<MetricsReport> reports;  // "ALL" first, then one per partition
};

/// Scores the single test term in `test` with histories from G^{T-1}.
/// Unknown entities fall back to cold-start predictions, never errors.
Evaluation evaluate(const ModelParams& params, const Dataset& test, const Dataset& history,
                    PartitionKey key = PartitionKey::All);

/// "ALL" report followed by per-label reports (omitted for a single ALL label).
std::vector<MetricsReport> partitioned_metrics(std::span<const Prediction> preds,
                                               std::span<const std::string> labels);

// --- Ablation -------------------------------------------------------------

/// ALE and its three single-effect ablations, in that order.
std::vector<ModelSpec> ablation_specs(bool with_bias = false);

struct AblationRow {
    std::string partition;
    std::string variant;
    double pta0 = 0.0;
    std::size_t n = 0;
};

/// Trains each ablation spec on `train` with the same config and seed and
/// reports PTA0 on `test`: four rows per partition, "ALL" first.
std::vector<AblationRow> ablation_suite(const Dataset& train, const Dataset& test, const TrainConfig& cfg,
                                        PartitionKey key = PartitionKey::All, int jobs = 1,
                                        bool with_bias = false);

void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows);

// --- Importance -----------------------------------------------------------

struct ContributionFractions {
    double ck = 0.0;
    double al = 0.0;
    double g = 0.0;
    double bias = 0.0;
};

inline constexpr double kImportanceMinPrediction = 1e-6;

/// Each component divided by the prediction; nullopt when |prediction| is
/// below kImportanceMinPrediction.
std::optional<ContributionFractions> contribution_fractions(const Contributions& c);

struct ImportanceReport {
    std::string partition = "ALL";
    double i_ck = 0.0;
    double i_al = 0.0;
    double i_g = 0.0;
    double i_bias = 0.0;
    std::size_t n_used = 0;
    std::size_t n_excluded = 0;  // near-zero predictions and cold starts
};

/// Mean contribution fractions over the test set, "ALL" first then per
/// partition. Throws ProtocolError if every record is excluded.
std::vector<ImportanceReport> importance_report(const ModelParams& params, const Dataset& test,
                                                const Dataset& history, PartitionKey key = PartitionKey::All);

}  // namespace ale
