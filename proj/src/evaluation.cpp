#include "ale/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "ale/errors.hpp"
#include "ale/snapshot.hpp"
#include "parallel.hpp"

namespace ale {

namespace {

std::optional<long> as_integer(const std::string& s) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

void require_single_term(const Dataset& test) {
    if (test.empty()) throw ProtocolError("test set is empty");
    if (test.terms().size() != 1) throw ProtocolError("test set must hold exactly one term");
}

}  // namespace

std::string_view to_string(PartitionKey key) noexcept {
    switch (key) {
        case PartitionKey::All: return "all";
        case PartitionKey::Cohort: return "cohort";
        case PartitionKey::StartTerm: return "start-term";
        case PartitionKey::Major: return "major";
    }
    return "?";
}

PartitionKey parse_partition(std::string_view s) {
    if (s == "all") return PartitionKey::All;
    if (s == "cohort") return PartitionKey::Cohort;
    if (s == "start-term") return PartitionKey::StartTerm;
    if (s == "major") return PartitionKey::Major;
    throw ConfigError("unknown partition '" + std::string(s) + "'");
}

std::vector<std::string> partition_labels(const Dataset& data, PartitionKey key) {
    std::vector<std::string> out;
    out.reserve(data.size());
    for (const GradeRecord& r : data.records()) {
        const StudentProfile& s = data.students()[r.student];
        switch (key) {
            case PartitionKey::All: out.emplace_back("ALL"); break;
            case PartitionKey::Cohort: out.emplace_back(to_string(s.cohort)); break;
            case PartitionKey::StartTerm: out.push_back(std::to_string(s.start_term)); break;
            case PartitionKey::Major: out.push_back(s.major); break;
        }
    }
    return out;
}

std::vector<std::string> ordered_labels(std::span<const std::string> labels) {
    std::set<std::string> distinct(labels.begin(), labels.end());
    std::vector<std::string> out(distinct.begin(), distinct.end());
    std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
        const auto ia = as_integer(a);
        const auto ib = as_integer(b);
        if (ia && ib) return *ia < *ib;
        if (ia != ib && (ia || ib)) return ia.has_value();
        return a < b;
    });
    return out;
}

PredictionSet predict_records(const ModelParams& params, const Dataset& test, const Dataset& history) {
    const QueryResolver resolver(params, test, history);
    PredictionSet out;
    out.reserve(test.size());
    const auto records = test.records();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const GradeRecord& r = records[i];
        out.push_back(make_prediction(test.student_ids().id(r.student), test.course_ids().id(r.course), r.term,
                                      r.grade, resolver.predict(i)));
    }
    return out;
}

std::vector<MetricsReport> partitioned_metrics(std::span<const Prediction> preds,
                                               std::span<const std::string> labels) {
    std::vector<MetricsReport> out{compute_metrics(preds, "ALL")};
    const auto order = ordered_labels(labels);
    if (order.size() == 1 && order.front() == "ALL") return out;
    for (const auto& label : order) {
        PredictionSet subset;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            if (labels[i] == label) subset.push_back(preds[i]);
        }
        out.push_back(compute_metrics(subset, label));
    }
    return out;
}

Evaluation evaluate(const ModelParams& params, const Dataset& test, const Dataset& history, PartitionKey key) {
    require_single_term(test);
    Evaluation ev;
    ev.predictions = predict_records(params, test, history);
    ev.labels = partition_labels(test, key);
    ev.reports = partitioned_metrics(ev.predictions, ev.labels);
    return ev;
}

std::vector<ModelSpec> ablation_specs(bool with_bias) {
    ModelSpec base;
    base.variant = with_bias ? Variant::ALEBias : Variant::ALE;
    ModelSpec no_al = base, no_in = base, no_g = base;
    no_al.use_al = false;
    no_in.use_in = false;
    no_g.use_g = false;
    return {base, no_al, no_in, no_g};
}

std::vector<AblationRow> ablation_suite(const Dataset& train, const Dataset& test, const TrainConfig& cfg,
                                        PartitionKey key, int jobs, bool with_bias) {
    require_single_term(test);
    const auto specs = ablation_specs(with_bias);
    std::vector<Evaluation> evals(specs.size());
    detail::parallel_for(specs.size(), jobs, [&](std::size_t i) {
        const TrainResult fit = ale::train(specs[i], train, cfg);
        evals[i] = evaluate(fit.params, test, train, key);
    });

    std::vector<AblationRow> rows;
    const std::size_t partitions = evals.front().reports.size();
    for (std::size_t p = 0; p < partitions; ++p) {
        for (std::size_t v = 0; v < specs.size(); ++v) {
            const MetricsReport& m = evals[v].reports[p];
            rows.push_back({m.partition, specs[v].label(), m.pta0, m.n});
        }
    }
    return rows;
}

void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows) {
    out << "partition,variant,pta0,n\n";
    for (const auto& r : rows) out << r.partition << ',' << r.variant << ',' << format_real(r.pta0) << ',' << r.n << '\n';
}

std::optional<ContributionFractions> contribution_fractions(const Contributions& c) {
    const double total = c.total();
    if (!(std::abs(total) >= kImportanceMinPrediction)) return std::nullopt;
    return ContributionFractions{c.ck / total, c.al / total, c.g / total, c.bias / total};
}

std::vector<ImportanceReport> importance_report(const ModelParams& params, const Dataset& test,
                                                const Dataset& history, PartitionKey key) {
    if (!params.spec.ale_family()) throw ConfigError("importance analysis needs an ALE-family model");
    if (test.empty()) throw ProtocolError("test set is empty");
    const QueryResolver resolver(params, test, history);
    const auto labels = partition_labels(test, key);

    struct Acc {
        double ck = 0, al = 0, g = 0, bias = 0;
        std::size_t used = 0, excluded = 0;
    };
    Acc all;
    std::map<std::string, Acc> by_label;
    for (std::size_t i = 0; i < test.size(); ++i) {
        std::optional<ContributionFractions> f;
        if (const auto q = resolver.resolve(i)) f = contribution_fractions(decompose_contributions(params, *q));
        for (Acc* acc : {&all, &by_label[labels[i]]}) {
            if (!f) {
                ++acc->excluded;
                continue;
            }
            acc->ck += f->ck;
            acc->al += f->al;
            acc->g += f->g;
            acc->bias += f->bias;
            ++acc->used;
        }
    }
    if (all.used == 0) throw ProtocolError("every test record was excluded from the importance analysis");

    auto report = [](const std::string& label, const Acc& a) {
        ImportanceReport r;
        r.partition = label;
        r.n_used = a.used;
        r.n_excluded = a.excluded;
        if (a.used > 0) {
            const double n = static_cast<double>(a.used);
            r.i_ck = a.ck / n;
            r.i_al = a.al / n;
            r.i_g = a.g / n;
            r.i_bias = a.bias / n;
        }
        return r;
    };
    std::vector<ImportanceReport> out{report("ALL", all)};
    if (key != PartitionKey::All) {
        for (const auto& label : ordered_labels(labels)) out.push_back(report(label, by_label[label]));
    }
    return out;
}

}  // namespace ale
