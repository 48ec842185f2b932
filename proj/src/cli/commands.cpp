#include "ale/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

#include "ale/cli/manifest.hpp"
#include "ale/dataset.hpp"
#include "ale/errors.hpp"
#include "ale/evaluation.hpp"
#include "ale/grid_search.hpp"
#include "ale/metrics.hpp"
#include "ale/model.hpp"
#include "ale/snapshot.hpp"
#include "ale/synthetic.hpp"
#include "ale/trainer.hpp"

namespace ale::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Options {
    std::string config;
    std::string data;
    std::string params;
    std::string out = "out";
    std::optional<int> test_term;
    std::uint64_t seed = 0;
    int jobs = 1;

    std::string variant = "ALE";
    bool no_academic_level = false;
    bool no_instructor = false;
    bool no_global = false;
    bool with_bias = false;
    std::string student_group = "none";
    std::string course_group = "none";
    std::string ck_normalization = "count";
    std::string l1_mode = "sign-aware";
    std::string stop_metric = "train";
    bool no_shuffle = false;
    HyperParams hyper;

    std::string partition = "all";
    HyperGrid grid;

    SynthConfig synth;
    std::optional<double> fixed_latent;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// --- option wiring --------------------------------------------------------

void add_common(CLI::App& app, Options& o) {
    app.add_option("--config", o.config, "TOML/INI file of option defaults; flags take precedence")
        ->check(CLI::ExistingFile);
    app.add_option("--out", o.out, "Output directory")->capture_default_str();
    app.add_option("--seed", o.seed, "Seed for every random stream")->capture_default_str();
}

void add_data(CLI::App& app, Options& o) {
    app.add_option("--data", o.data, "Grades CSV")->required()->check(CLI::ExistingFile);
    app.add_option("--test-term", o.test_term, "Test term T (default: last term in the data)");
}

void add_partition(CLI::App& app, Options& o) {
    app.add_option("--partition", o.partition, "Report partition")
        ->check(CLI::IsMember({"all", "cohort", "start-term", "major"}))
        ->capture_default_str();
}

void add_model(CLI::App& app, Options& o, bool with_variant) {
    if (with_variant) {
        app.add_option("--variant", o.variant, "MF, MF-b, MF-d, ACK, ACK-b, ALE or ALE-b")->capture_default_str();
        app.add_flag("--no-academic-level", o.no_academic_level, "Drop the academic-level effect");
        app.add_flag("--no-instructor", o.no_instructor, "Drop the instructor effect");
        app.add_flag("--no-global", o.no_global, "Drop the global latent factor");
        app.add_option("--student-group", o.student_group, "MF-d student grouping")
            ->check(CLI::IsMember({"none", "major", "academic-level"}))
            ->capture_default_str();
        app.add_option("--course-group", o.course_group, "MF-d course grouping")
            ->check(CLI::IsMember({"none", "subject", "course-level"}))
            ->capture_default_str();
        app.add_option("--ck-normalization", o.ck_normalization, "Cumulative knowledge normalisation")
            ->check(CLI::IsMember({"count", "none"}))
            ->capture_default_str();
    }
    app.add_option("--l1-mode", o.l1_mode, "L1 subgradient form")
        ->check(CLI::IsMember({"sign-aware", "paper-literal"}))
        ->capture_default_str();
    app.add_flag("--no-shuffle", o.no_shuffle, "Visit records in input order each epoch");
    app.add_option("--k", o.hyper.k, "Latent dimension")->capture_default_str();
    app.add_option("--decay", o.hyper.decay, "Knowledge decay rate per term")->capture_default_str();
    app.add_option("--gamma", o.hyper.gamma, "L2 weight")->capture_default_str();
    app.add_option("--alpha1", o.hyper.alpha1, "L1 weight on p_al and q_in")->capture_default_str();
    app.add_option("--alpha2", o.hyper.alpha2, "L1 weight on p_g")->capture_default_str();
    app.add_option("--eta", o.hyper.eta, "Learning rate")->capture_default_str();
    app.add_option("--max-iter", o.hyper.max_iter, "Maximum epochs")->capture_default_str();
}

void add_synth(CLI::App& app, Options& o) {
    SynthConfig& s = o.synth;
    app.add_option("--students", s.n_students)->capture_default_str();
    app.add_option("--courses", s.n_courses)->capture_default_str();
    app.add_option("--instructors", s.n_instructors)->capture_default_str();
    app.add_option("--terms", s.n_terms)->capture_default_str();
    app.add_option("--k", s.k, "Planted latent dimension")->capture_default_str();
    app.add_option("--decay", s.decay, "Planted decay rate")->capture_default_str();
    app.add_option("--noise-sigma", s.noise_sigma)->capture_default_str();
    app.add_option("--min-courses-per-term", s.min_courses_per_term)->capture_default_str();
    app.add_option("--max-courses-per-term", s.max_courses_per_term)->capture_default_str();
    app.add_option("--max-terms-enrolled", s.max_terms_enrolled)->capture_default_str();
    app.add_option("--max-start-term", s.max_start_term, "-1 means half the terms")->capture_default_str();
    app.add_option("--instructors-per-course", s.instructors_per_course)->capture_default_str();
    app.add_option("--majors", s.n_majors)->capture_default_str();
    app.add_option("--subjects", s.n_subjects)->capture_default_str();
    app.add_option("--ftf-fraction", s.ftf_fraction)->capture_default_str();
    app.add_option("--scale-provided", s.scale_provided)->capture_default_str();
    app.add_option("--scale-required", s.scale_required)->capture_default_str();
    app.add_option("--scale-academic-level", s.scale_academic_level)->capture_default_str();
    app.add_option("--scale-instructor", s.scale_instructor)->capture_default_str();
    app.add_option("--scale-global", s.scale_global)->capture_default_str();
    app.add_option("--fixed-latent", o.fixed_latent, "Plant every latent entry at this value");
}

void add_grid(CLI::App& app, Options& o) {
    app.add_option("--grid-k", o.grid.k)->delimiter(',');
    app.add_option("--grid-decay", o.grid.decay)->delimiter(',');
    app.add_option("--grid-gamma", o.grid.gamma)->delimiter(',');
    app.add_option("--grid-alpha1", o.grid.alpha1)->delimiter(',');
    app.add_option("--grid-alpha2", o.grid.alpha2)->delimiter(',');
    app.add_option("--grid-eta", o.grid.eta)->delimiter(',');
    app.add_option("--stop-metric", o.stop_metric, "Early stopping on train or validation MAE")
        ->check(CLI::IsMember({"train", "validation"}))
        ->capture_default_str();
    app.add_option("--jobs", o.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

// --- resolved settings ----------------------------------------------------

ModelSpec model_spec(const Options& o) {
    ModelSpec spec;
    spec.variant = parse_variant(o.variant);
    spec.use_al = !o.no_academic_level;
    spec.use_in = !o.no_instructor;
    spec.use_g = !o.no_global;
    spec.student_group = parse_student_group(o.student_group);
    spec.course_group = parse_course_group(o.course_group);
    spec.ck_normalization = parse_ck_normalization(o.ck_normalization);
    if (!spec.ale_family() && (o.no_academic_level || o.no_instructor || o.no_global))
        throw ConfigError("ablation switches apply only to ALE variants");
    if (spec.variant != Variant::MFDomain &&
        (spec.student_group != StudentGroup::None || spec.course_group != CourseGroup::None))
        throw ConfigError("grouping flags apply only to MF-d");
    return spec;
}

TrainConfig train_config(const Options& o) {
    TrainConfig cfg;
    cfg.hyper = o.hyper;
    cfg.hyper.validate();
    cfg.l1_mode = o.l1_mode == "paper-literal" ? L1Mode::PaperLiteral : L1Mode::SignAware;
    cfg.stop_metric = o.stop_metric == "validation" ? StopMetric::ValidationMae : StopMetric::TrainMae;
    cfg.shuffle = !o.no_shuffle;
    cfg.seed = o.seed;
    return cfg;
}

json hyper_json(const HyperParams& h) {
    return {{"k", h.k},           {"decay", h.decay}, {"gamma", h.gamma},       {"alpha1", h.alpha1},
            {"alpha2", h.alpha2}, {"eta", h.eta},     {"max_iter", h.max_iter}};
}

json spec_json(const ModelSpec& s) {
    return {{"variant", to_string(s.variant)},
            {"label", s.label()},
            {"academic_level", s.academic_level_on()},
            {"instructor", s.instructor_on()},
            {"global", s.global_on()},
            {"student_group", to_string(s.student_group)},
            {"course_group", to_string(s.course_group)},
            {"ck_normalization", to_string(s.ck_normalization)}};
}

json training_json(const Options& o) {
    return {{"l1_mode", o.l1_mode}, {"shuffle", !o.no_shuffle}, {"stop_metric", o.stop_metric}};
}

json synth_json(const SynthConfig& s) {
    json j = {{"students", s.n_students},
              {"courses", s.n_courses},
              {"instructors", s.n_instructors},
              {"terms", s.n_terms},
              {"k", s.k},
              {"decay", s.decay},
              {"noise_sigma", s.noise_sigma},
              {"min_courses_per_term", s.min_courses_per_term},
              {"max_courses_per_term", s.max_courses_per_term},
              {"max_terms_enrolled", s.max_terms_enrolled},
              {"max_start_term", s.max_start_term},
              {"instructors_per_course", s.instructors_per_course},
              {"majors", s.n_majors},
              {"subjects", s.n_subjects},
              {"ftf_fraction", s.ftf_fraction},
              {"scale_provided", s.scale_provided},
              {"scale_required", s.scale_required},
              {"scale_academic_level", s.scale_academic_level},
              {"scale_instructor", s.scale_instructor},
              {"scale_global", s.scale_global}};
    j["fixed_latent"] = s.fixed_latent_value ? json(*s.fixed_latent_value) : json(nullptr);
    return j;
}

json grid_json(const HyperGrid& g) {
    return {{"k", g.k},           {"decay", g.decay}, {"gamma", g.gamma}, {"alpha1", g.alpha1},
            {"alpha2", g.alpha2}, {"eta", g.eta}};
}

json report_json(const MetricsReport& r) {
    return {{"partition", r.partition}, {"n", r.n},         {"mae", r.mae},
            {"pta0", r.pta0},           {"pta1", r.pta1}, {"pta2", r.pta2}};
}

json train_report_json(const TrainReport& r) {
    json traj = json::array();
    for (const auto& e : r.trajectory) {
        json row = {{"epoch", e.epoch}, {"loss", e.loss}, {"train_mae", e.train_mae}};
        if (e.validation_mae) row["validation_mae"] = *e.validation_mae;
        traj.push_back(row);
    }
    return {{"epochs_run", r.epochs_run},
            {"best_epoch", r.best_epoch},
            {"initial_metric", r.initial_metric},
            {"trajectory", traj}};
}

json epoch_seconds(const TrainReport& r) {
    json out = json::array();
    for (const auto& e : r.trajectory) out.push_back(e.seconds);
    return out;
}

// --- run context ----------------------------------------------------------

class Run {
public:
    Run(std::string command, const Options& o) : opts_(o) {
        manifest_.command = std::move(command);
        manifest_.seed = o.seed;
        manifest_.tool_version = std::string(kToolVersion);
        manifest_.started_at = utc_timestamp();
        fs::create_directories(o.out);
        if (!o.config.empty()) input(o.config);
    }

    json& config() { return manifest_.config; }
    json& timing() { return manifest_.timing; }

    void input(const std::string& path) { manifest_.inputs.emplace_back(path, sha256_file(path)); }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const fs::path path = fs::path(opts_.out) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write '" + path.string() + "'");
        body(out);
        out.flush();
        if (!out) throw Error("write failed for '" + path.string() + "'");
        manifest_.artifacts.push_back(name);
    }

    void write_json(const std::string& name, const json& j) {
        write(name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    }

    void finish(std::ostream& log) {
        manifest_.timing["total_seconds"] = clock_.seconds();
        write_manifest((fs::path(opts_.out) / "manifest.json").string(), manifest_);
        log << manifest_.command << ": wrote " << manifest_.artifacts.size() << " artifact(s) to " << opts_.out
            << '\n';
    }

private:
    const Options& opts_;
    RunManifest manifest_;
    Stopwatch clock_;
};

int test_term_for(const Options& o, const Dataset& data) {
    if (o.test_term) return *o.test_term;
    const auto terms = data.terms();
    if (terms.empty()) throw ProtocolError("dataset has no records");
    return terms.back();
}

void record_data(Run& run, const Options& o, int test_term) {
    run.input(o.data);
    run.config()["data"] = o.data;
    run.config()["test_term"] = test_term;
}

// --- commands -------------------------------------------------------------

void cmd_synth(const Options& o, std::ostream& log) {
    SynthConfig cfg = o.synth;
    cfg.fixed_latent_value = o.fixed_latent;
    cfg.validate();

    Run run("synth", o);
    run.config() = synth_json(cfg);
    Stopwatch clock;
    const SynthResult res = generate_synthetic(cfg, o.seed);
    run.timing()["generate_seconds"] = clock.seconds();
    run.write("grades.csv", [&](std::ostream& out) { write_csv(out, res.data); });
    run.write("planted_params.txt", [&](std::ostream& out) { write_snapshot(out, res.planted); });
    log << "synth: " << res.data.size() << " records\n";
    run.finish(log);
}

void cmd_train(const Options& o, std::ostream& log) {
    const ModelSpec spec = model_spec(o);
    const TrainConfig cfg = train_config(o);
    if (cfg.stop_metric == StopMetric::ValidationMae)
        throw ConfigError("train stops on training MAE; use grid-search for validation stopping");
    const Dataset data = load_csv(o.data);
    const int T = test_term_for(o, data);
    const auto split = split_train_test(data, T);

    Run run("train", o);
    record_data(run, o, T);
    run.config()["model"] = spec_json(spec);
    run.config()["hyper"] = hyper_json(cfg.hyper);
    run.config()["training"] = training_json(o);

    const TrainResult fit = train(spec, split.first, cfg);
    run.timing()["epoch_seconds"] = epoch_seconds(fit.report);

    json report = train_report_json(fit.report);
    report["model"] = spec.label();
    report["train_records"] = split.first.size();
    run.write("params.txt", [&](std::ostream& out) { write_snapshot(out, fit.params); });
    run.write_json("train_report.json", report);
    log << "train: " << spec.label() << " ran " << fit.report.epochs_run << " epoch(s), best " << fit.report.best_epoch
        << '\n';
    run.finish(log);
}

void cmd_grid_search(const Options& o, std::ostream& log) {
    const ModelSpec spec = model_spec(o);
    const TrainConfig cfg = train_config(o);
    const Dataset data = load_csv(o.data);
    const int T = test_term_for(o, data);
    const auto split = split_train_test(data, T);

    Run run("grid-search", o);
    record_data(run, o, T);
    run.config()["model"] = spec_json(spec);
    run.config()["hyper"] = hyper_json(cfg.hyper);
    run.config()["training"] = training_json(o);
    run.config()["grid"] = grid_json(o.grid);
    run.config()["jobs"] = o.jobs;

    const GridSearchResult res = grid_search(spec, split.first, T, o.grid, cfg, o.jobs);

    run.write("grid_table.csv", [&](std::ostream& out) {
        out << "k,decay,gamma,alpha1,alpha2,eta,validation_mae,epochs_run\n";
        for (const auto& row : res.table) {
            const HyperParams& h = row.hyper;
            out << h.k << ',' << format_real(h.decay) << ',' << format_real(h.gamma) << ',' << format_real(h.alpha1)
                << ',' << format_real(h.alpha2) << ',' << format_real(h.eta) << ',' << format_real(row.validation_mae)
                << ',' << row.epochs_run << '\n';
        }
    });
    json best = hyper_json(res.best);
    best["grid_index"] = res.best_index;
    best["validation_mae"] = res.table[res.best_index].validation_mae;
    run.write_json("best_hyper.json", best);
    run.write("params.txt", [&](std::ostream& out) { write_snapshot(out, res.final_model.params); });
    log << "grid-search: " << res.table.size() << " point(s), best validation MAE "
        << res.table[res.best_index].validation_mae << '\n';
    run.finish(log);
}

void cmd_evaluate(const Options& o, std::ostream& log) {
    const ModelParams params = load_snapshot(o.params);
    const Dataset data = load_csv(o.data);
    const int T = test_term_for(o, data);
    const auto split = split_train_test(data, T);
    const PartitionKey key = parse_partition(o.partition);

    Run run("evaluate", o);
    record_data(run, o, T);
    run.input(o.params);
    run.config()["params"] = o.params;
    run.config()["partition"] = o.partition;

    const Evaluation ev = evaluate(params, split.second, split.first, key);
    json reports = json::array();
    for (const auto& r : ev.reports) reports.push_back(report_json(r));
    run.write_json("metrics.json", {{"model", params.spec.label()}, {"test_term", T}, {"reports", reports}});
    run.write("predictions.csv", [&](std::ostream& out) { write_predictions_csv(out, ev.predictions); });
    const MetricsReport& all = ev.reports.front();
    log << "evaluate: n=" << all.n << " MAE=" << all.mae << " PTA0=" << all.pta0 << " PTA1=" << all.pta1
        << " PTA2=" << all.pta2 << '\n';
    run.finish(log);
}

void cmd_ablate(const Options& o, std::ostream& log) {
    const TrainConfig cfg = train_config(o);
    if (cfg.stop_metric == StopMetric::ValidationMae) throw ConfigError("ablate stops on training MAE");
    const Dataset data = load_csv(o.data);
    const int T = test_term_for(o, data);
    const auto split = split_train_test(data, T);
    const PartitionKey key = parse_partition(o.partition);

    Run run("ablate", o);
    record_data(run, o, T);
    run.config()["hyper"] = hyper_json(cfg.hyper);
    run.config()["training"] = training_json(o);
    run.config()["partition"] = o.partition;
    run.config()["with_bias"] = o.with_bias;
    run.config()["jobs"] = o.jobs;

    const auto rows = ablation_suite(split.first, split.second, cfg, key, o.jobs, o.with_bias);
    run.write("ablation.csv", [&](std::ostream& out) { write_ablation_csv(out, rows); });
    for (std::size_t i = 0; i < rows.size() && rows[i].partition == "ALL"; ++i)
        log << "ablate: " << rows[i].variant << " PTA0=" << rows[i].pta0 << '\n';
    run.finish(log);
}

void cmd_importance(const Options& o, std::ostream& log) {
    const Dataset data = load_csv(o.data);
    const int T = test_term_for(o, data);
    const auto split = split_train_test(data, T);
    const PartitionKey key = parse_partition(o.partition);

    Run run("importance", o);
    record_data(run, o, T);
    run.config()["partition"] = o.partition;

    ModelParams params;
    if (!o.params.empty()) {
        run.input(o.params);
        run.config()["params"] = o.params;
        params = load_snapshot(o.params);
    } else {
        const ModelSpec spec = model_spec(o);
        if (!spec.ale_family()) throw ConfigError("importance needs an ALE variant");
        const TrainConfig cfg = train_config(o);
        run.config()["model"] = spec_json(spec);
        run.config()["hyper"] = hyper_json(cfg.hyper);
        run.config()["training"] = training_json(o);
        const TrainResult fit = train(spec, split.first, cfg);
        run.timing()["epoch_seconds"] = epoch_seconds(fit.report);
        params = fit.params;
        run.write("params.txt", [&](std::ostream& out) { write_snapshot(out, params); });
    }

    const auto reports = importance_report(params, split.second, split.first, key);
    json rows = json::array();
    for (const auto& r : reports) {
        rows.push_back({{"partition", r.partition},
                        {"i_ck", r.i_ck},
                        {"i_al", r.i_al},
                        {"i_g", r.i_g},
                        {"i_bias", r.i_bias},
                        {"n_used", r.n_used},
                        {"n_excluded", r.n_excluded}});
    }
    run.write_json("importance.json", {{"model", params.spec.label()}, {"test_term", T}, {"reports", rows}});
    log << "importance: I_ck=" << reports.front().i_ck << " I_al=" << reports.front().i_al
        << " I_g=" << reports.front().i_g << '\n';
    run.finish(log);
}

using Handler = void (*)(const Options&, std::ostream&);

// The command-line surface, bound to one Options instance.
struct Cli {
    explicit Cli(Options& o) : app("Next-term grade prediction with additive latent effect models", "ale") {
        app.set_version_flag("--version", std::string(kToolVersion));
        app.require_subcommand(1);

        auto* synth = app.add_subcommand("synth", "Generate a synthetic transcript set from a planted ALE model");
        add_common(*synth, o);
        add_synth(*synth, o);

        auto* train_cmd = app.add_subcommand("train", "Fit a model on all terms before the test term");
        add_common(*train_cmd, o);
        add_data(*train_cmd, o);
        add_model(*train_cmd, o, true);

        auto* grid = app.add_subcommand("grid-search", "Select hyperparameters on the term before the test term");
        add_common(*grid, o);
        add_data(*grid, o);
        add_model(*grid, o, true);
        add_grid(*grid, o);

        auto* eval = app.add_subcommand("evaluate", "Score a saved model on the test term");
        add_common(*eval, o);
        add_data(*eval, o);
        add_partition(*eval, o);
        eval->add_option("--params", o.params, "Parameter snapshot")->required()->check(CLI::ExistingFile);

        auto* ablate = app.add_subcommand("ablate", "Compare ALE with its single-effect ablations");
        add_common(*ablate, o);
        add_data(*ablate, o);
        add_partition(*ablate, o);
        add_model(*ablate, o, false);
        ablate->add_flag("--with-bias", o.with_bias, "Ablate ALE-b instead of ALE");
        ablate->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

        auto* importance = app.add_subcommand("importance", "Average contribution fractions of the ALE effects");
        add_common(*importance, o);
        add_data(*importance, o);
        add_partition(*importance, o);
        add_model(*importance, o, true);
        importance->add_option("--params", o.params, "Parameter snapshot (default: train one)")
            ->check(CLI::ExistingFile);

        handlers = {{synth, cmd_synth},   {train_cmd, cmd_train}, {grid, cmd_grid_search},
                    {eval, cmd_evaluate}, {ablate, cmd_ablate},   {importance, cmd_importance}};
    }

    void parse(const std::vector<std::string>& args) {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }

    std::pair<CLI::App*, Handler> selected() const {
        for (const auto& [sub, handler] : handlers) {
            if (sub->parsed()) return {sub, handler};
        }
        return {nullptr, nullptr};
    }

    CLI::App app;
    std::map<CLI::App*, Handler> handlers;
};

// Turns the keys of a config file into arguments for `sub`, skipping any
// option already given on the command line. Keys may sit at top level or in
// a section named after the subcommand.
std::vector<std::string> config_arguments(const CLI::App& sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }

    std::vector<std::string> out;
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub.get_name())) continue;
        const std::string flag = "--" + item.name;
        const CLI::Option* opt = sub.get_option_no_throw(flag);
        if (opt == nullptr || item.name == "config")
            throw ConfigError("config '" + path + "': unknown key '" + item.name + "' for " + sub.get_name());
        if (opt->count() > 0) continue;
        std::string value;
        for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
        out.push_back(flag + "=" + value);
    }
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto o = std::make_unique<Options>();
    auto cli = std::make_unique<Cli>(*o);
    try {
        cli->parse(args);
        if (!o->config.empty()) {
            CLI::App* sub = cli->selected().first;
            // The root takes no valued options, so the first match is the subcommand itself.
            const auto name_at = std::find(args.begin(), args.end(), sub->get_name()) + 1;
            std::vector<std::string> merged(args.begin(), name_at);
            const auto from_config = config_arguments(*sub, o->config);
            merged.insert(merged.end(), from_config.begin(), from_config.end());
            merged.insert(merged.end(), name_at, args.end());
            o = std::make_unique<Options>();
            cli = std::make_unique<Cli>(*o);
            cli->parse(merged);
        }
    } catch (const CLI::ParseError& e) {
        const int code = cli->app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    try {
        cli->selected().second(*o, out);
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitOk;
}

}  // namespace ale::cli
