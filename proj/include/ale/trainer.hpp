#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ale/dataset.hpp"
#include "ale/model.hpp"
#include "ale/synthetic.hpp"

namespace ale {

// SignAware subtracts alpha*sign(x); PaperLiteral subtracts the constant
// alpha, which only behaves while entries stay positive.
enum class L1Mode { SignAware, PaperLiteral };
enum class StopMetric { TrainMae, ValidationMae };

struct TrainConfig {
    HyperParams hyper;
    L1Mode l1_mode = L1Mode::SignAware;
    bool shuffle = true;
    std::uint64_t seed = 0;
    StopMetric stop_metric = StopMetric::TrainMae;
};

struct EpochStats {
    int epoch = 0;
    double loss = 0.0;       // sum of squared errors over the training set
    double train_mae = 0.0;  // clamped predictions
    std::optional<double> validation_mae;
    double seconds = 0.0;
};

struct TrainReport {
    int epochs_run = 0;
    int best_epoch = 0;  // 0 means the initialisation was never improved on
    double initial_metric = 0.0;
    std::vector<EpochStats> trajectory;
};

struct TrainResult {
    ModelParams params;
    TrainReport report;
};

/// Sweeps SGD over the training records until the stop metric fails to
/// decrease or max_iter epochs have run, and returns the parameters of the
/// best epoch. `validation` supplies G_{T-1} when stopping on validation
/// MAE; its histories are drawn from `data`.
TrainResult train(const ModelSpec& spec, const Dataset& data, const TrainConfig& cfg,
                  const Dataset* validation = nullptr);

/// Same, starting from given parameters (their vocabularies must match
/// `data`).
TrainResult train_from(ModelParams init, const Dataset& data, const TrainConfig& cfg,
                       const Dataset* validation = nullptr);

/// One stochastic update for a single observation. MF-family factors move
/// simultaneously; CK-family factors move in the order k_c', p_al, q_c, q_in,
/// p_g, all driven by the error computed once before any update. Returns
/// that error.
double sgd_step(ModelParams& params, const Query& query, double target, const TrainConfig& cfg);

/// One pass over `order` (record indices of `data`). Throws DivergenceError
/// if a touched parameter becomes non-finite.
void sgd_epoch(ModelParams& params, const Dataset& data, std::span<const std::size_t> order,
               const TrainConfig& cfg, int epoch = 1);

struct ScalingPoint {
    int n_students = 0;
    std::size_t n_records = 0;
    double seconds_per_epoch = 0.0;
};

/// Mean wall time of one SGD epoch on synthetic sets that differ only in
/// student count, averaged over `repeats` sweeps each.
std::vector<ScalingPoint> epoch_scaling_probe(const ModelSpec& spec, const SynthConfig& base,
                                              std::span<const int> student_counts, const TrainConfig& cfg,
                                              int repeats = 3);

}  // namespace ale
