#include "ale/grid_search.hpp"

#include <algorithm>

#include "ale/errors.hpp"
#include "ale/evaluation.hpp"
#include "ale/metrics.hpp"
#include "parallel.hpp"

namespace ale {

namespace {

template <class T>
std::vector<T> axis_or(const std::vector<T>& axis, T fallback) {
    return axis.empty() ? std::vector<T>{fallback} : axis;
}

}  // namespace

std::vector<HyperParams> expand_grid(const HyperGrid& grid, const HyperParams& defaults) {
    if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
    std::vector<HyperParams> out;
    for (int k : axis_or(grid.k, defaults.k))
        for (double decay : axis_or(grid.decay, defaults.decay))
            for (double gamma : axis_or(grid.gamma, defaults.gamma))
                for (double a1 : axis_or(grid.alpha1, defaults.alpha1))
                    for (double a2 : axis_or(grid.alpha2, defaults.alpha2))
                        for (double eta : axis_or(grid.eta, defaults.eta)) {
                            HyperParams h = defaults;
                            h.k = k;
                            h.decay = decay;
                            h.gamma = gamma;
                            h.alpha1 = a1;
                            h.alpha2 = a2;
                            h.eta = eta;
                            h.validate();
                            out.push_back(h);
                        }
    return out;
}

GridSearchResult grid_search(const ModelSpec& spec, const Dataset& train, int test_term, const HyperGrid& grid,
                             const TrainConfig& base, int jobs) {
    const auto points = expand_grid(grid, base.hyper);
    const auto split = validation_split(train, test_term);
    const Dataset& inner = split.first;
    const Dataset& validation = split.second;

    GridSearchResult result;
    result.table.resize(points.size());
    detail::parallel_for(points.size(), jobs, [&](std::size_t i) {
        TrainConfig cfg = base;
        cfg.hyper = points[i];
        const bool stop_on_validation = cfg.stop_metric == StopMetric::ValidationMae;
        const TrainResult fit = ale::train(spec, inner, cfg, stop_on_validation ? &validation : nullptr);
        const PredictionSet preds = predict_records(fit.params, validation, inner);
        result.table[i] = {points[i], mae(preds), fit.report.epochs_run};
    });

    for (std::size_t i = 1; i < result.table.size(); ++i) {
        if (result.table[i].validation_mae < result.table[result.best_index].validation_mae) result.best_index = i;
    }
    result.best = result.table[result.best_index].hyper;

    TrainConfig final_cfg = base;
    final_cfg.hyper = result.best;
    // Validation stopping has no held-out term once G_{T-1} is folded back in.
    if (final_cfg.stop_metric == StopMetric::ValidationMae) final_cfg.stop_metric = StopMetric::TrainMae;
    result.final_model = ale::train(spec, train, final_cfg);
    return result;
}

}  // namespace ale
