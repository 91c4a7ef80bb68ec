// Command-line front end: run experiment plans, generate reports, and print
// per-class dataset summaries.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nicbench/dataset.hpp"
#include "nicbench/errors.hpp"
#include "nicbench/experiment.hpp"
#include "nicbench/loaders/loaders.hpp"
#include "nicbench/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitDatasetError = 2;
constexpr int kExitTrainingError = 3;

int cmd_run(const std::string& config_path, const std::vector<std::string>& dataset_filter,
            const std::vector<std::string>& technique_filter,
            const std::vector<std::uint64_t>& seed_override) {
    nicbench::ExperimentPlan plan = nicbench::load_plan(config_path);

    if (!dataset_filter.empty()) {
        std::set<std::string> wanted(dataset_filter.begin(), dataset_filter.end());
        for (const auto& name : wanted) {
            const bool known = std::any_of(plan.datasets.begin(), plan.datasets.end(),
                                           [&](const auto& dp) { return dp.name == name; });
            if (!known)
                throw nicbench::config_error("dataset '" + name + "' is not in the config");
        }
        std::erase_if(plan.datasets, [&](const auto& dp) { return !wanted.count(dp.name); });
    }
    if (!technique_filter.empty()) {
        plan.techniques.clear();
        for (const auto& id : technique_filter)
            plan.techniques.push_back(nicbench::parse_technique(id));
    }
    if (!seed_override.empty()) plan.seeds = seed_override;

    const auto outcome = nicbench::run_plan(plan, &std::cout);
    std::cout << "results written to " << outcome.results_path << "\n";
    if (outcome.dataset_failures) return kExitDatasetError;
    if (outcome.train_failures) return kExitTrainingError;
    return kExitOk;
}

int cmd_report(const std::string& results_path, const std::string& out_dir) {
    const auto artifacts = nicbench::report_file(results_path, out_dir);
    for (const auto& f : artifacts.files) std::cout << "wrote " << f << "\n";
    return kExitOk;
}

int cmd_summarize(const std::string& name, const std::string& root) {
    const auto raw = nicbench::load_dataset(name, root);
    const auto rows = nicbench::summarize(raw);

    std::printf("dataset: %s  (rate %.0f Hz, %zu recordings, %zu files)\n", raw.name.c_str(),
                raw.rate_hz, raw.recordings.size(), raw.files_parsed);
    if (raw.nan_rows_rejected > 0)
        std::printf("warning: %zu non-finite rows rejected during parsing\n",
                    raw.nan_rows_rejected);
    std::printf("%-16s %10s\n", "class", "minutes");
    double total = 0.0;
    for (const auto& r : rows) {
        std::printf("%-16s %10.2f\n", r.class_name.c_str(), r.minutes);
        total += r.minutes;
    }
    std::printf("%-16s %10.2f\n", "total", total);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neural inertial classification benchmark harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> dataset_filter, technique_filter;
    std::vector<std::uint64_t> seed_override;
    auto* run = app.add_subcommand("run", "Run the experiment matrix from a config file");
    run->add_option("--config", config_path, "JSON experiment config")->required();
    run->add_option("--dataset", dataset_filter, "Only run these datasets");
    run->add_option("--technique", technique_filter, "Only run these technique ids");
    run->add_option("--seed", seed_override, "Override the seed list");

    std::string results_path, out_dir;
    auto* report = app.add_subcommand("report", "Generate tables and charts from results");
    report->add_option("--results", results_path, "results.jsonl produced by run")->required();
    report->add_option("--out", out_dir, "Output directory")->required();

    std::string ds_name, ds_root;
    auto* summarize =
        app.add_subcommand("summarize-dataset", "Print per-class recording minutes");
    summarize->add_option("--name", ds_name, "ridi | motionsense | uci_har | usc_sipi")
        ->required();
    summarize->add_option("--root", ds_root, "Dataset root directory")->required();

    try {
        app.parse(argc, argv);
        if (run->parsed())
            return cmd_run(config_path, dataset_filter, technique_filter, seed_override);
        if (report->parsed()) return cmd_report(results_path, out_dir);
        if (summarize->parsed()) return cmd_summarize(ds_name, ds_root);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    } catch (const nicbench::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const nicbench::ingest_error& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return kExitDatasetError;
    } catch (const nicbench::train_error& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return kExitTrainingError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
