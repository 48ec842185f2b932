#include "ale/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ale/errors.hpp"
#include "ale/rng.hpp"

namespace ale {

namespace {

struct StepOutcome {
    double error = 0.0;
    bool finite = true;
};

double l1_term(double x, double alpha, L1Mode mode) {
    if (alpha == 0.0) return 0.0;
    if (mode == L1Mode::PaperLiteral) return alpha;
    return x > 0.0 ? alpha : (x < 0.0 ? -alpha : 0.0);
}

void update_bias(double& b, double e, double eta, double gamma, bool& finite) {
    b += eta * (e - gamma * b);
    finite = finite && std::isfinite(b);
}

StepOutcome mf_step(ModelParams& p, const Query& q, double target, const TrainConfig& cfg) {
    const double eta = cfg.hyper.eta;
    const double gamma = cfg.hyper.gamma;
    const double e = target - predict(p, q);
    StepOutcome out{e, std::isfinite(e)};

    auto ps = p.table(Family::StudentFactor).row(q.student);
    auto qc = p.table(Family::CourseRequired).row(q.course);
    for (std::size_t d = 0; d < ps.size(); ++d) {
        const double ps_old = ps[d];
        ps[d] += eta * (e * qc[d] - gamma * ps[d]);
        qc[d] += eta * (e * ps_old - gamma * qc[d]);
        out.finite = out.finite && std::isfinite(ps[d]) && std::isfinite(qc[d]);
    }
    if (p.spec.has_bias()) {
        update_bias(p.table(Family::StudentBias).values[q.student], e, eta, gamma, out.finite);
        update_bias(p.table(Family::CourseBias).values[q.course], e, eta, gamma, out.finite);
    }
    if (p.spec.variant == Variant::MFDomain) {
        if (q.course_group)
            update_bias(p.table(Family::StudentGroupBias).row(q.student)[*q.course_group], e, eta, gamma, out.finite);
        if (q.student_group)
            update_bias(p.table(Family::CourseGroupBias).row(q.course)[*q.student_group], e, eta, gamma, out.finite);
    }
    return out;
}

StepOutcome ck_step(ModelParams& p, const Query& q, double target, const TrainConfig& cfg) {
    const double eta = cfg.hyper.eta;
    const double gamma = cfg.hyper.gamma;
    const double alpha1 = cfg.hyper.alpha1;
    const double alpha2 = cfg.hyper.alpha2;
    const ModelSpec& spec = p.spec;
    const auto k = static_cast<std::size_t>(p.k);

    thread_local std::vector<double> pck, qen, weights;
    pck.assign(k, 0.0);
    qen.resize(k);
    weights.resize(q.history.size());

    // Forward pass: p_ck, q_c + q_in and the prediction.
    FactorTable& K = p.table(Family::CourseProvided);
    const double scale = (spec.ck_normalization == CkNormalization::Count && !q.history.empty())
                             ? 1.0 / static_cast<double>(q.history.size())
                             : 1.0;
    for (std::size_t j = 0; j < q.history.size(); ++j) {
        const HistoryEntry& h = q.history[j];
        weights[j] = std::exp(-p.decay * static_cast<double>(q.term - h.term)) * h.grade * scale;
        const auto kr = K.row(h.course);
        for (std::size_t d = 0; d < k; ++d) pck[d] += weights[j] * kr[d];
    }

    auto qc = p.table(Family::CourseRequired).row(q.course);
    const bool use_al = spec.academic_level_on();
    const bool use_in = spec.instructor_on() && q.instructor.has_value();
    const bool use_g = spec.global_on();
    std::span<double> pal, qin, pg;
    if (use_al) pal = p.table(Family::AcademicLevel).row(static_cast<std::size_t>(clamp_academic_level(q.academic_level)));
    if (use_in) qin = p.table(Family::Instructor).row(*q.instructor);
    if (use_g) pg = p.table(Family::StudentGlobal).row(q.student);

    double pred = 0.0;
    for (std::size_t d = 0; d < k; ++d) {
        qen[d] = qc[d] + (use_in ? qin[d] : 0.0);
        const double pen = pck[d] + (use_al ? pal[d] : 0.0);
        pred += pen * qen[d] + (use_g ? pg[d] * qc[d] : 0.0);
    }
    if (spec.has_bias()) {
        pred += p.table(Family::StudentBias).values[q.student] + p.table(Family::CourseBias).values[q.course];
    }
    const double e = target - pred;
    StepOutcome out{e, std::isfinite(e)};

    // k_c' for every prior course.
    for (std::size_t j = 0; j < q.history.size(); ++j) {
        auto kr = K.row(q.history[j].course);
        const double coef = weights[j] * e;
        for (std::size_t d = 0; d < k; ++d) {
            kr[d] += eta * (qen[d] * coef - gamma * kr[d]);
            out.finite = out.finite && std::isfinite(kr[d]);
        }
    }
    // p_al
    if (use_al) {
        for (std::size_t d = 0; d < k; ++d) {
            pal[d] += eta * (qen[d] * e - gamma * pal[d] - l1_term(pal[d], alpha1, cfg.l1_mode));
            out.finite = out.finite && std::isfinite(pal[d]);
        }
    }
    // q_c
    for (std::size_t d = 0; d < k; ++d) {
        const double dir = pck[d] + (use_al ? pal[d] : 0.0) + (use_g ? pg[d] : 0.0);
        qc[d] += eta * (dir * e - gamma * qc[d]);
        out.finite = out.finite && std::isfinite(qc[d]);
    }
    // q_in
    if (use_in) {
        for (std::size_t d = 0; d < k; ++d) {
            const double dir = pck[d] + (use_al ? pal[d] : 0.0);
            qin[d] += eta * (dir * e - gamma * qin[d] - l1_term(qin[d], alpha1, cfg.l1_mode));
            out.finite = out.finite && std::isfinite(qin[d]);
        }
    }
    // p_g
    if (use_g) {
        for (std::size_t d = 0; d < k; ++d) {
            pg[d] += eta * (qc[d] * e - gamma * pg[d] - l1_term(pg[d], alpha2, cfg.l1_mode));
            out.finite = out.finite && std::isfinite(pg[d]);
        }
    }
    if (spec.has_bias()) {
        update_bias(p.table(Family::StudentBias).values[q.student], e, eta, gamma, out.finite);
        update_bias(p.table(Family::CourseBias).values[q.course], e, eta, gamma, out.finite);
    }
    return out;
}

StepOutcome step_impl(ModelParams& p, const Query& q, double target, const TrainConfig& cfg) {
    return p.spec.mf_family() ? mf_step(p, q, target, cfg) : ck_step(p, q, target, cfg);
}

void run_epoch(ModelParams& params, const QueryResolver& resolver, const Dataset& data,
               std::span<const std::size_t> order, const TrainConfig& cfg, int epoch) {
    const auto records = data.records();
    for (std::size_t r : order) {
        const auto q = resolver.resolve(r);
        if (!q) continue;  // cannot happen when params were built from `data`
        const StepOutcome o = step_impl(params, *q, records[r].numeric, cfg);
        if (!o.finite) throw DivergenceError(epoch, r, "non-finite parameter or error");
    }
}

struct Fit {
    double loss = 0.0;
    double mae = 0.0;
};

Fit measure(const ModelParams& params, const Dataset& target, const Dataset& history) {
    const auto preds = predict_dataset(params, target, history);
    const auto records = target.records();
    Fit f;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double diff = records[i].numeric - preds[i];
        f.loss += diff * diff;
        f.mae += std::abs(records[i].numeric - clamp_grade(preds[i]));
    }
    f.mae /= static_cast<double>(std::max<std::size_t>(preds.size(), 1));
    return f;
}

}  // namespace

double sgd_step(ModelParams& params, const Query& query, double target, const TrainConfig& cfg) {
    const StepOutcome o = step_impl(params, query, target, cfg);
    if (!o.finite) throw NumericError("sgd step produced a non-finite value");
    return o.error;
}

void sgd_epoch(ModelParams& params, const Dataset& data, std::span<const std::size_t> order,
               const TrainConfig& cfg, int epoch) {
    params.decay = cfg.hyper.decay;
    const QueryResolver resolver(params, data, data);
    run_epoch(params, resolver, data, order, cfg, epoch);
}

TrainResult train(const ModelSpec& spec, const Dataset& data, const TrainConfig& cfg, const Dataset* validation) {
    cfg.hyper.validate();
    if (data.empty()) throw ProtocolError("cannot train on an empty dataset");
    return train_from(init_params(spec, data, cfg.hyper.k, cfg.seed), data, cfg, validation);
}

TrainResult train_from(ModelParams init, const Dataset& data, const TrainConfig& cfg, const Dataset* validation) {
    using Clock = std::chrono::steady_clock;
    cfg.hyper.validate();
    if (data.empty()) throw ProtocolError("cannot train on an empty dataset");
    if (init.k != cfg.hyper.k) throw ConfigError("initial parameters have a different k");
    if (!(init.students == data.student_ids()) || !(init.courses == data.course_ids()) ||
        !(init.instructors == data.instructor_ids()))
        throw ConfigError("initial parameters were not built from this dataset");
    const bool on_validation = cfg.stop_metric == StopMetric::ValidationMae;
    if (on_validation && (validation == nullptr || validation->empty()))
        throw ConfigError("validation-MAE stopping needs a non-empty validation set");

    TrainResult result{std::move(init), {}};
    ModelParams& params = result.params;
    params.decay = cfg.hyper.decay;
    const QueryResolver resolver(params, data, data);

    auto metric_of = [&](EpochStats& stats) {
        const Fit fit = measure(params, data, data);
        stats.loss = fit.loss;
        stats.train_mae = fit.mae;
        if (validation != nullptr && !validation->empty())
            stats.validation_mae = measure(params, *validation, data).mae;
        return on_validation ? *stats.validation_mae : stats.train_mae;
    };

    EpochStats initial;
    double previous = metric_of(initial);
    double best_metric = previous;
    ModelParams best = params;
    TrainReport& report = result.report;
    report.initial_metric = previous;

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = make_stream(cfg.seed, "shuffle");

    for (int epoch = 1; epoch <= cfg.hyper.max_iter; ++epoch) {
        if (cfg.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);
        const auto start = Clock::now();
        run_epoch(params, resolver, data, order, cfg, epoch);
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

        EpochStats stats;
        stats.epoch = epoch;
        stats.seconds = seconds;
        const double metric = metric_of(stats);
        report.trajectory.push_back(stats);
        report.epochs_run = epoch;
        if (!std::isfinite(metric)) throw DivergenceError(epoch, data.size(), "non-finite stop metric");

        if (metric < best_metric) {
            best_metric = metric;
            best = params;
            report.best_epoch = epoch;
        }
        if (!(metric < previous)) break;
        previous = metric;
    }
    result.params = std::move(best);
    return result;
}

std::vector<ScalingPoint> epoch_scaling_probe(const ModelSpec& spec, const SynthConfig& base,
                                              std::span<const int> student_counts, const TrainConfig& cfg,
                                              int repeats) {
    using Clock = std::chrono::steady_clock;
    if (repeats < 1) throw ConfigError("repeats must be >= 1");
    std::vector<ScalingPoint> out;
    for (int n : student_counts) {
        SynthConfig sc = base;
        sc.n_students = n;
        const SynthResult synth = generate_synthetic(sc, cfg.seed);
        ModelParams params = init_params(spec, synth.data, cfg.hyper.k, cfg.seed);
        params.decay = cfg.hyper.decay;
        const QueryResolver resolver(params, synth.data, synth.data);
        std::vector<std::size_t> order(synth.data.size());
        std::iota(order.begin(), order.end(), std::size_t{0});

        double total = 0.0;
        for (int r = 0; r < repeats; ++r) {
            const auto start = Clock::now();
            run_epoch(params, resolver, synth.data, order, cfg, r + 1);
            total += std::chrono::duration<double>(Clock::now() - start).count();
        }
        out.push_back({n, synth.data.size(), total / repeats});
    }
    return out;
}

}  // namespace ale
