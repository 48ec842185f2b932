#pragma once

#include <cstddef>
#include <vector>

#include "ale/dataset.hpp"
#include "ale/model.hpp"
#include "ale/trainer.hpp"

namespace ale {

/// Candidate values per axis. An empty axis keeps the default from the base
/// TrainConfig; at least one axis must be non-empty.
struct HyperGrid {
    std::vector<int> k;
    std::vector<double> decay;
    std::vector<double> gamma;
    std::vector<double> alpha1;
    std::vector<double> alpha2;
    std::vector<double> eta;

    bool empty() const noexcept {
        return k.empty() && decay.empty() && gamma.empty() && alpha1.empty() && alpha2.empty() && eta.empty();
    }
};

/// Cartesian product in a fixed order: k outermost, then decay, gamma,
/// alpha1, alpha2, eta. Throws ConfigError for an empty grid.
std::vector<HyperParams> expand_grid(const HyperGrid& grid, const HyperParams& defaults);

struct GridRow {
    HyperParams hyper;
    double validation_mae = 0.0;
    int epochs_run = 0;
};

struct GridSearchResult {
    HyperParams best;
    std::size_t best_index = 0;
    std::vector<GridRow> table;  // grid order
    TrainResult final_model;     // retrained on all of G^{T-1}
};

/// Fits every grid point on G^{T-2}, scores MAE on G_{T-1}, keeps the first
/// minimum and refits it on the full training set. `train` is G^{T-1}.
/// Points run on up to `jobs` threads; the table order never depends on it.
GridSearchResult grid_search(const ModelSpec& spec, const Dataset& train, int test_term, const HyperGrid& grid,
                             const TrainConfig& base, int jobs = 1);

}  // namespace ale
