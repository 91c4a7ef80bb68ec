#pragma once

// Report generation over a results file: per-dataset improvement tables,
// the cross-dataset summary (datasets improved + max improvement per
// technique), and standalone SVG bar charts. Output is a pure function of
// the results records; rerunning on the same file reproduces every byte.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nicbench/errors.hpp"
#include "nicbench/experiment.hpp"

namespace nicbench {

struct TechniqueSummary {
    std::string technique;
    std::size_t datasets_improved = 0;
    std::size_t datasets_evaluated = 0;
    double max_improvement = 0.0;  // best median delta across datasets
};

struct ReportArtifacts {
    std::vector<std::string> files;
};

namespace report_detail {

inline std::string fmt(double v, int decimals = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Aggregate {
    std::vector<double> accs;
    std::vector<double> deltas;
    std::vector<double> baselines;
    std::vector<std::uint64_t> seeds;
};

// Last record wins per (dataset, technique, seed): reruns supersede.
inline std::map<std::string, std::map<std::string, Aggregate>> aggregate(
    const std::vector<RunResult>& results) {
    std::map<std::string, std::map<std::string, std::map<std::uint64_t, RunResult>>> latest;
    for (const auto& r : results) {
        if (r.status != "ok") continue;
        latest[r.dataset][r.technique][r.seed] = r;
    }
    std::map<std::string, std::map<std::string, Aggregate>> out;
    for (const auto& [dataset, by_tech] : latest) {
        for (const auto& [tech, by_seed] : by_tech) {
            Aggregate agg;
            for (const auto& [seed, r] : by_seed) {
                agg.seeds.push_back(seed);
                agg.accs.push_back(r.accuracy);
                agg.deltas.push_back(r.delta);
                agg.baselines.push_back(r.baseline_accuracy);
            }
            out[dataset][tech] = std::move(agg);
        }
    }
    return out;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Minimal standalone bar chart; bars for per-technique values, optional
// circle markers for a second series.
inline std::string svg_bar_chart(const std::string& title,
                                 const std::vector<std::string>& labels,
                                 const std::vector<double>& bars,
                                 const std::vector<double>* markers,
                                 const std::string& bar_caption,
                                 const std::string& marker_caption) {
    const int width = 840, height = 420;
    const int left = 70, right = 40, top = 50, bottom = 90;
    const int plot_w = width - left - right, plot_h = height - top - bottom;

    double lo = 0.0, hi = 0.0;
    for (double v : bars) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (markers)
        for (double v : *markers) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi - lo < 1e-9) hi = lo + 1.0;
    const double pad = 0.1 * (hi - lo);
    lo -= pad;
    hi += pad;
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);

    auto ypix = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
       << " font-size=\"17\">" << title << "</text>\n";

    // Horizontal gridlines and axis labels.
    for (int i = 0; i <= 4; ++i) {
        const double v = lo + (hi - lo) * i / 4.0;
        const double y = ypix(v);
        os << "<line x1=\"" << left << "\" y1=\"" << fmt(y, 1) << "\" x2=\"" << left + plot_w
           << "\" y2=\"" << fmt(y, 1) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << fmt(y + 4, 1)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << fmt(v, 2)
           << "</text>\n";
    }
    // Zero line.
    os << "<line x1=\"" << left << "\" y1=\"" << fmt(ypix(0.0), 1) << "\" x2=\"" << left + plot_w
       << "\" y2=\"" << fmt(ypix(0.0), 1) << "\" stroke=\"#444444\"/>\n";

    const double slot = static_cast<double>(plot_w) / static_cast<double>(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double x0 = left + slot * static_cast<double>(i) + 0.18 * slot;
        const double bw = 0.64 * slot;
        const double v = bars[i];
        const double y_top = ypix(std::max(v, 0.0));
        const double y_bot = ypix(std::min(v, 0.0));
        os << "<rect x=\"" << fmt(x0, 1) << "\" y=\"" << fmt(y_top, 1) << "\" width=\""
           << fmt(bw, 1) << "\" height=\"" << fmt(std::max(y_bot - y_top, 0.5), 1) << "\" fill=\""
           << (v >= 0.0 ? "#4878a8" : "#b3553e") << "\"/>\n";
        if (markers) {
            os << "<circle cx=\"" << fmt(x0 + bw / 2, 1) << "\" cy=\"" << fmt(ypix((*markers)[i]), 1)
               << "\" r=\"5\" fill=\"#e08214\" stroke=\"#7a4408\"/>\n";
        }
        os << "<text x=\"" << fmt(x0 + bw / 2, 1) << "\" y=\"" << top + plot_h + 18
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\""
           << " transform=\"rotate(-35 " << fmt(x0 + bw / 2, 1) << " " << top + plot_h + 18
           << ")\">" << labels[i] << "</text>\n";
    }

    os << "<text x=\"" << left << "\" y=\"" << height - 14
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#4878a8\">&#9632; " << bar_caption
       << "</text>\n";
    if (markers)
        os << "<text x=\"" << left + 260 << "\" y=\"" << height - 14
           << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#e08214\">&#9679; "
           << marker_caption << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content,
                       ReportArtifacts& artifacts) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("report: cannot write " + path.string());
    os << content;
    artifacts.files.push_back(path.string());
}

}  // namespace report_detail

// Cross-dataset summary rows in canonical technique order: for every
// technique, the number of datasets with a positive median delta and the
// best median delta. The baseline row is omitted (its delta is zero by
// construction).
inline std::vector<TechniqueSummary> summarize_results(const std::vector<RunResult>& results) {
    const auto agg = report_detail::aggregate(results);
    std::vector<TechniqueSummary> out;
    for (Technique t : all_techniques()) {
        if (t == Technique::Baseline) continue;
        const std::string id = technique_id(t);
        TechniqueSummary row;
        row.technique = id;
        bool any = false;
        double best = 0.0;
        for (const auto& [dataset, by_tech] : agg) {
            const auto it = by_tech.find(id);
            if (it == by_tech.end()) continue;
            const double med = report_detail::median(it->second.deltas);
            ++row.datasets_evaluated;
            if (med > 0.0) ++row.datasets_improved;
            if (!any || med > best) {
                best = med;
                any = true;
            }
        }
        if (row.datasets_evaluated == 0) continue;
        row.max_improvement = best;
        out.push_back(row);
    }
    return out;
}

// Emits the report artifacts into out_dir: per-dataset improvement tables,
// the summary table, and the bar charts. Throws if a dataset has technique
// records but no baseline record for a seed.
inline ReportArtifacts report(const std::vector<RunResult>& results, const std::string& out_dir) {
    if (results.empty()) throw config_error("report: no results to report");

    // Baseline presence check, per dataset and seed.
    std::map<std::string, std::set<std::uint64_t>> baseline_seeds;
    for (const auto& r : results)
        if (r.status == "ok" && r.technique == "baseline") baseline_seeds[r.dataset].insert(r.seed);
    for (const auto& r : results) {
        if (r.status != "ok" || r.technique == "baseline") continue;
        const auto it = baseline_seeds.find(r.dataset);
        if (it == baseline_seeds.end() || !it->second.count(r.seed))
            throw config_error("report: missing baseline run for dataset " + r.dataset +
                               " seed " + std::to_string(r.seed));
    }

    std::filesystem::create_directories(out_dir);
    ReportArtifacts artifacts;
    const auto agg = report_detail::aggregate(results);

    for (const auto& [dataset, by_tech] : agg) {
        std::ostringstream csv;
        csv << "dataset,technique,seeds,acc_mean,acc_min,acc_max,baseline_mean,delta_median,"
               "delta_mean,delta_min,delta_max\n";
        std::vector<std::string> labels;
        std::vector<double> deltas;
        for (Technique t : all_techniques()) {
            const auto it = by_tech.find(technique_id(t));
            if (it == by_tech.end()) continue;
            const auto& a = it->second;
            const double dmed = report_detail::median(a.deltas);
            csv << dataset << ',' << technique_id(t) << ',' << a.seeds.size() << ','
                << report_detail::fmt(report_detail::mean(a.accs)) << ','
                << report_detail::fmt(*std::min_element(a.accs.begin(), a.accs.end())) << ','
                << report_detail::fmt(*std::max_element(a.accs.begin(), a.accs.end())) << ','
                << report_detail::fmt(report_detail::mean(a.baselines)) << ','
                << report_detail::fmt(dmed) << ','
                << report_detail::fmt(report_detail::mean(a.deltas)) << ','
                << report_detail::fmt(*std::min_element(a.deltas.begin(), a.deltas.end())) << ','
                << report_detail::fmt(*std::max_element(a.deltas.begin(), a.deltas.end()))
                << '\n';
            if (t != Technique::Baseline) {
                labels.push_back(technique_id(t));
                deltas.push_back(dmed);
            }
        }
        report_detail::write_file(std::filesystem::path(out_dir) / (dataset + "_improvements.csv"),
                                  csv.str(), artifacts);
        if (!labels.empty())
            report_detail::write_file(
                std::filesystem::path(out_dir) / (dataset + "_deltas.svg"),
                report_detail::svg_bar_chart("Improvement over baseline: " + dataset, labels,
                                             deltas, nullptr,
                                             "accuracy delta (points, median over seeds)", ""),
                artifacts);
    }

    const auto summary = summarize_results(results);
    std::ostringstream csv;
    csv << "technique,datasets_improved,datasets_evaluated,max_improvement\n";
    std::vector<std::string> labels;
    std::vector<double> improved, best;
    for (const auto& row : summary) {
        csv << row.technique << ',' << row.datasets_improved << ',' << row.datasets_evaluated
            << ',' << report_detail::fmt(row.max_improvement) << '\n';
        labels.push_back(row.technique);
        improved.push_back(static_cast<double>(row.datasets_improved));
        best.push_back(row.max_improvement);
    }
    report_detail::write_file(std::filesystem::path(out_dir) / "summary.csv", csv.str(),
                              artifacts);
    if (!labels.empty())
        report_detail::write_file(
            std::filesystem::path(out_dir) / "summary.svg",
            report_detail::svg_bar_chart("Datasets improved and best improvement per technique",
                                         labels, improved, &best, "datasets improved",
                                         "max improvement (points)"),
            artifacts);
    return artifacts;
}

inline ReportArtifacts report_file(const std::string& results_path, const std::string& out_dir) {
    return report(read_results(results_path), out_dir);
}

}  // namespace nicbench
