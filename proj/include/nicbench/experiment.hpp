#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nicbench/augment.hpp"
#include "nicbench/dataset.hpp"
#include "nicbench/errors.hpp"
#include "nicbench/loaders/loaders.hpp"
#include "nicbench/model.hpp"
#include "nicbench/train.hpp"

namespace nicbench {

// The baseline plus the ten enhancement techniques, in canonical order.
enum class Technique {
    Baseline,
    Head2,
    Head3,
    RotX,
    RotY,
    RotZ,
    RotAll,
    Noise,
    Ma10,
    Ma25,
    Ma50,
};

inline const std::vector<Technique>& all_techniques() {
    static const std::vector<Technique> order = {
        Technique::Baseline, Technique::Head2, Technique::Head3, Technique::RotX,
        Technique::RotY,     Technique::RotZ,  Technique::RotAll, Technique::Noise,
        Technique::Ma10,     Technique::Ma25,  Technique::Ma50};
    return order;
}

inline const char* technique_id(Technique t) {
    switch (t) {
        case Technique::Baseline: return "baseline";
        case Technique::Head2: return "head2";
        case Technique::Head3: return "head3";
        case Technique::RotX: return "rot_x";
        case Technique::RotY: return "rot_y";
        case Technique::RotZ: return "rot_z";
        case Technique::RotAll: return "rot_all";
        case Technique::Noise: return "noise";
        case Technique::Ma10: return "ma10";
        case Technique::Ma25: return "ma25";
        case Technique::Ma50: return "ma50";
    }
    return "?";
}

inline Technique parse_technique(const std::string& id) {
    for (Technique t : all_techniques())
        if (id == technique_id(t)) return t;
    throw config_error("unknown technique id: " + id);
}

// Per-dataset plan entry. Window and epoch defaults follow the benchmark
// configuration (2 s windows at native rate).
struct DatasetPlan {
    std::string name;
    std::string root;
    std::size_t window_len = 0;
    std::size_t stride = 0;  // 0 -> non-overlapping (stride = window)
    std::size_t epochs = 0;
    double sigma_fraction = 0.05;
    double subject_fraction = 1.0;
};

struct TrainDefaults {
    double lr = 0.001;
    std::size_t batch = 64;
    std::size_t hidden = 128;
    std::size_t filters = 64;
    std::size_t kernel = 5;
    std::size_t pool = 3;
    std::size_t fc_width = 256;
    double dropout_p = 0.25;
    Reduction reduction = Reduction::LastStep;
    bool normalize = true;
    std::size_t eval_every = 1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct ExperimentPlan {
    std::vector<DatasetPlan> datasets;
    std::vector<Technique> techniques = all_techniques();
    std::vector<std::uint64_t> seeds = {42};
    std::string output_dir = "runs";
    double test_fraction = 0.2;
    std::uint64_t split_seed = 42;
    TrainDefaults defaults;
    std::string cache_dir;
    bool save_checkpoints = false;
};

inline std::size_t default_window(const std::string& dataset) {
    if (dataset == "ridi") return 400;
    if (dataset == "motionsense") return 100;
    if (dataset == "uci_har") return 100;
    if (dataset == "usc_sipi") return 200;
    throw config_error("unknown dataset name: " + dataset);
}

inline std::size_t default_epochs(const std::string& dataset) {
    if (dataset == "uci_har") return 50;
    return 30;
}

// Parses the JSON experiment config (see README for the schema).
inline ExperimentPlan load_plan(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw config_error("config parse error in " + path + ": " + e.what());
    }

    ExperimentPlan plan;
    try {
        plan.output_dir = j.value("output_dir", plan.output_dir);
        plan.test_fraction = j.value("test_fraction", plan.test_fraction);
        plan.split_seed = j.value("split_seed", plan.split_seed);
        plan.cache_dir = j.value("cache_dir", plan.cache_dir);
        plan.save_checkpoints = j.value("save_checkpoints", plan.save_checkpoints);

        if (j.contains("seeds")) plan.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        if (plan.seeds.empty()) throw config_error("config: seeds must be nonempty");

        if (j.contains("techniques")) {
            plan.techniques.clear();
            for (const auto& id : j["techniques"]) plan.techniques.push_back(parse_technique(id));
            if (plan.techniques.empty()) throw config_error("config: techniques must be nonempty");
        }

        // Reserved: technique combinations are part of the schema but not
        // supported yet; only an empty list is accepted.
        if (j.contains("combinations") && !j["combinations"].empty())
            throw config_error("config: technique combinations are not supported yet");

        TrainDefaults& d = plan.defaults;
        if (j.contains("defaults")) {
            const auto& jd = j["defaults"];
            d.lr = jd.value("lr", d.lr);
            d.batch = jd.value("batch", d.batch);
            d.hidden = jd.value("hidden", d.hidden);
            d.filters = jd.value("filters", d.filters);
            d.kernel = jd.value("kernel", d.kernel);
            d.pool = jd.value("pool", d.pool);
            d.fc_width = jd.value("fc_width", d.fc_width);
            d.dropout_p = jd.value("dropout", d.dropout_p);
            d.normalize = jd.value("normalize", d.normalize);
            d.eval_every = jd.value("eval_every", d.eval_every);
            d.beta1 = jd.value("beta1", d.beta1);
            d.beta2 = jd.value("beta2", d.beta2);
            d.eps = jd.value("eps", d.eps);
            const std::string red = jd.value("reduction", std::string("last"));
            if (red == "last")
                d.reduction = Reduction::LastStep;
            else if (red == "mean")
                d.reduction = Reduction::MeanPool;
            else
                throw config_error("config: reduction must be 'last' or 'mean'");
        }

        if (!j.contains("datasets") || !j["datasets"].is_object() || j["datasets"].empty())
            throw config_error("config: a nonempty 'datasets' section is required");
        for (const auto& [name, jd] : j["datasets"].items()) {
            DatasetPlan dp;
            dp.name = name;
            dp.window_len = default_window(name);  // validates the name
            dp.epochs = default_epochs(name);
            if (!jd.contains("root")) throw config_error("config: dataset " + name + " needs a root");
            dp.root = jd["root"].get<std::string>();
            dp.window_len = jd.value("window", dp.window_len);
            dp.stride = jd.value("stride", dp.stride);
            dp.epochs = jd.value("epochs", dp.epochs);
            dp.sigma_fraction = jd.value("sigma_fraction", dp.sigma_fraction);
            dp.subject_fraction = jd.value("subject_fraction", dp.subject_fraction);
            plan.datasets.push_back(std::move(dp));
        }
        std::sort(plan.datasets.begin(), plan.datasets.end(),
                  [](const DatasetPlan& a, const DatasetPlan& b) { return a.name < b.name; });

        if (j.contains("epochs_override"))
            for (auto& dp : plan.datasets) dp.epochs = j["epochs_override"].get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config error in " + path + ": " + e.what());
    }
    return plan;
}

// One (dataset, technique, seed) outcome.
struct RunResult {
    std::string dataset;
    std::string technique;
    std::uint64_t seed = 0;
    std::string status = "ok";  // ok | load_failed | train_failed
    double accuracy = 0.0;      // percent
    double baseline_accuracy = 0.0;
    double delta = 0.0;
    double best_accuracy = 0.0;
    std::size_t best_epoch = 0;
    long long wall_ms = 0;
    std::string error;
};

inline nlohmann::json to_json(const RunResult& r) {
    nlohmann::json j;
    j["dataset"] = r.dataset;
    j["technique"] = r.technique;
    j["seed"] = r.seed;
    j["status"] = r.status;
    j["accuracy"] = r.accuracy;
    j["baseline_accuracy"] = r.baseline_accuracy;
    j["delta"] = r.delta;
    j["best_accuracy"] = r.best_accuracy;
    j["best_epoch"] = r.best_epoch;
    j["wall_ms"] = r.wall_ms;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

inline RunResult run_result_from_json(const nlohmann::json& j) {
    RunResult r;
    r.dataset = j.at("dataset").get<std::string>();
    r.technique = j.at("technique").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.status = j.value("status", std::string("ok"));
    r.accuracy = j.value("accuracy", 0.0);
    r.baseline_accuracy = j.value("baseline_accuracy", 0.0);
    r.delta = j.value("delta", 0.0);
    r.best_accuracy = j.value("best_accuracy", 0.0);
    r.best_epoch = j.value("best_epoch", std::size_t(0));
    r.wall_ms = j.value("wall_ms", 0LL);
    r.error = j.value("error", std::string());
    return r;
}

inline std::vector<RunResult> read_results(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open results file: " + path);
    std::vector<RunResult> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(run_result_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw config_error(path + ": bad record on line " + std::to_string(line_no) + ": " +
                               e.what());
        }
    }
    return out;
}

namespace detail {

inline std::optional<RotationAxis> rotation_axis(Technique t) {
    switch (t) {
        case Technique::RotX: return RotationAxis::X;
        case Technique::RotY: return RotationAxis::Y;
        case Technique::RotZ: return RotationAxis::Z;
        case Technique::RotAll: return RotationAxis::All;
        default: return std::nullopt;
    }
}

inline std::size_t ma_window(Technique t) {
    switch (t) {
        case Technique::Ma10: return 10;
        case Technique::Ma25: return 25;
        case Technique::Ma50: return 50;
        default: return 0;
    }
}

inline ModelVariant model_variant(Technique t) {
    if (t == Technique::Head2) return ModelVariant::Head2;
    if (t == Technique::Head3) return ModelVariant::Head3;
    return ModelVariant::Baseline;
}

inline std::string run_tag(const std::string& dataset, Technique t, std::uint64_t seed) {
    return dataset + "_" + technique_id(t) + "_s" + std::to_string(seed);
}

}  // namespace detail

// Runs one technique on one loaded dataset. The pipeline order is fixed:
// denoise (stream level) -> window -> augment train split -> fit stats on
// the augmented train set -> normalize train and test -> train.
inline RunResult run_single(const RawDataset& raw, const ExperimentPlan& plan,
                            const DatasetPlan& dp, Technique tech, std::uint64_t seed) {
    RunResult result;
    result.dataset = dp.name;
    result.technique = technique_id(tech);
    result.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();

    try {
        BuildOptions opts;
        opts.window_len = dp.window_len;
        opts.stride = dp.stride;
        opts.ma_window = detail::ma_window(tech);
        opts.test_fraction = plan.test_fraction;
        opts.split_seed = plan.split_seed;
        opts.subject_fraction = dp.subject_fraction;

        Dataset ds;
        bool cached = false;
        std::filesystem::path cache_path;
        if (!plan.cache_dir.empty()) {
            std::ostringstream key;
            key << dp.name << "_w" << opts.window_len << "_st" << opts.stride << "_ma"
                << opts.ma_window << "_split" << opts.split_seed << "_tf" << opts.test_fraction
                << "_sf" << opts.subject_fraction << ".nicd";
            cache_path = std::filesystem::path(plan.cache_dir) / key.str();
            if (std::filesystem::exists(cache_path)) {
                ds = load_dataset_cache(cache_path.string());
                cached = true;
            }
        }
        if (!cached) {
            ds = build_dataset(raw, opts);
            if (!plan.cache_dir.empty()) {
                std::filesystem::create_directories(cache_path.parent_path());
                save_dataset_cache(ds, cache_path.string());
            }
        }

        std::vector<Window> train = ds.train;
        if (auto axis = detail::rotation_axis(tech)) {
            train = augment_rotation(train, *axis);
        } else if (tech == Technique::Noise) {
            const ChannelStats pre_stats = fit_stats(ds.train);
            NoiseSpec spec;
            spec.sigma_fraction = dp.sigma_fraction;
            spec.seed = substream_seed(seed, 0xA015E);
            train = augment_noise(train, spec, pre_stats);
        }

        std::vector<Window> test = ds.test;
        if (plan.defaults.normalize) {
            const ChannelStats stats = fit_stats(train);
            for (auto& w : train) w = normalize(w, stats);
            for (auto& w : test) w = normalize(w, stats);
        }

        ModelSpec spec;
        spec.variant = detail::model_variant(tech);
        spec.classes = ds.classes.size();
        spec.hidden = plan.defaults.hidden;
        spec.filters = plan.defaults.filters;
        spec.kernel = plan.defaults.kernel;
        spec.pool = plan.defaults.pool;
        spec.fc_width = plan.defaults.fc_width;
        spec.dropout_p = plan.defaults.dropout_p;
        spec.reduction = plan.defaults.reduction;

        ModelState<float> model(spec);
        model.init(seed);

        const auto train_tensors = to_model_inputs<float>(train);
        const auto test_tensors = to_model_inputs<float>(test);

        TrainConfig cfg;
        cfg.lr = plan.defaults.lr;
        cfg.batch = plan.defaults.batch;
        cfg.epochs = dp.epochs;
        cfg.seed = seed;
        cfg.eval_every = plan.defaults.eval_every;
        cfg.beta1 = plan.defaults.beta1;
        cfg.beta2 = plan.defaults.beta2;
        cfg.eps = plan.defaults.eps;

        const auto log_dir = std::filesystem::path(plan.output_dir) / "logs";
        std::filesystem::create_directories(log_dir);
        std::ofstream log_stream(log_dir / (detail::run_tag(dp.name, tech, seed) + ".jsonl"));

        const TrainLog log = train_model(model, train_tensors, test_tensors, cfg, &log_stream);
        result.accuracy = log.final_test_acc;
        result.best_accuracy = log.best_test_acc;
        result.best_epoch = log.best_epoch;

        if (plan.save_checkpoints) {
            const auto ckpt_dir = std::filesystem::path(plan.output_dir) / "checkpoints";
            std::filesystem::create_directories(ckpt_dir);
            save_checkpoint(model,
                            (ckpt_dir / (detail::run_tag(dp.name, tech, seed) + ".ckpt")).string());
        }
    } catch (const std::exception& e) {
        result.status = "train_failed";
        result.error = e.what();
    }

    result.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return result;
}

struct RunOutcome {
    std::vector<RunResult> results;
    bool dataset_failures = false;
    bool train_failures = false;
    std::string results_path;
};

// Executes the full matrix. Baseline always runs first per (dataset, seed)
// so technique deltas are computable; a load failure marks that dataset and
// moves on. Records append to results.jsonl as each run finishes.
inline RunOutcome run_plan(const ExperimentPlan& plan, std::ostream* progress = nullptr) {
    if (plan.datasets.empty()) throw config_error("plan has no datasets");

    std::filesystem::create_directories(plan.output_dir);
    const auto results_path = std::filesystem::path(plan.output_dir) / "results.jsonl";
    std::ofstream results(results_path, std::ios::app);
    if (!results) throw config_error("cannot open results file: " + results_path.string());

    std::vector<Technique> techniques = plan.techniques;
    if (std::find(techniques.begin(), techniques.end(), Technique::Baseline) == techniques.end())
        techniques.insert(techniques.begin(), Technique::Baseline);
    else
        std::stable_partition(techniques.begin(), techniques.end(),
                              [](Technique t) { return t == Technique::Baseline; });

    RunOutcome outcome;
    outcome.results_path = results_path.string();

    auto emit = [&](const RunResult& r) {
        outcome.results.push_back(r);
        results << to_json(r).dump() << "\n" << std::flush;
        if (progress) {
            char buf[256];
            if (r.status == "ok")
                std::snprintf(buf, sizeof(buf), "[run] %-12s %-9s seed=%llu acc=%.2f%% (%.1fs)",
                              r.dataset.c_str(), r.technique.c_str(),
                              static_cast<unsigned long long>(r.seed), r.accuracy,
                              double(r.wall_ms) / 1000.0);
            else
                std::snprintf(buf, sizeof(buf), "[run] %-12s %-9s seed=%llu %s: %s",
                              r.dataset.c_str(), r.technique.c_str(),
                              static_cast<unsigned long long>(r.seed), r.status.c_str(),
                              r.error.c_str());
            *progress << buf << std::endl;
        }
    };

    for (const DatasetPlan& dp : plan.datasets) {
        RawDataset raw;
        try {
            raw = load_dataset(dp.name, dp.root);
        } catch (const std::exception& e) {
            outcome.dataset_failures = true;
            RunResult marker;
            marker.dataset = dp.name;
            marker.technique = "-";
            marker.status = "load_failed";
            marker.error = e.what();
            emit(marker);
            continue;
        }
        if (progress && raw.nan_rows_rejected > 0)
            *progress << "[warn] " << dp.name << ": rejected " << raw.nan_rows_rejected
                      << " non-finite rows" << std::endl;

        for (std::uint64_t seed : plan.seeds) {
            double baseline_acc = 0.0;
            bool have_baseline = false;
            for (Technique tech : techniques) {
                RunResult r = run_single(raw, plan, dp, tech, seed);
                if (r.status == "ok") {
                    if (tech == Technique::Baseline) {
                        baseline_acc = r.accuracy;
                        have_baseline = true;
                    }
                    if (have_baseline) {
                        r.baseline_accuracy = baseline_acc;
                        r.delta = r.accuracy - baseline_acc;
                    }
                } else {
                    outcome.train_failures = true;
                }
                emit(r);
            }
        }
    }
    return outcome;
}

}  // namespace nicbench
