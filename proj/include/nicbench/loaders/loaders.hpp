#pragma once

// Parsers for the four public datasets in their published on-disk layouts.
// All loaders normalize units at ingestion: accelerometers to m/s^2 and
// gyroscopes to rad/s, so downstream code sees one ImuSample convention.
// Directory entries are visited in sorted order to keep reloads
// byte-identical.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nicbench/dataset.hpp"
#include "nicbench/errors.hpp"
#include "nicbench/loaders/mat5.hpp"
#include "nicbench/loaders/text_table.hpp"
#include "nicbench/signal.hpp"

namespace nicbench {

inline constexpr double kGravity = 9.80665;  // standard gravity, m/s^2
inline constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

namespace detail {

inline std::vector<std::filesystem::path> sorted_entries(const std::filesystem::path& dir,
                                                         bool dirs_only) {
    std::vector<std::filesystem::path> out;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
        if (dirs_only && !e.is_directory()) continue;
        if (!dirs_only && !e.is_regular_file()) continue;
        out.push_back(e.path());
    }
    if (ec) throw ingest_error("cannot read directory: " + dir.string());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::string strip_trailing_digits(std::string s) {
    while (!s.empty() && std::isdigit(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// RIDI: recording directories named <subject>_<placement><trial>, each with
// processed/data.csv carrying named gyro_*/acce_* columns in SI units at
// 200 Hz. Placement tags map to the four smartphone-location classes.
// ---------------------------------------------------------------------------
inline RawDataset load_ridi(const std::string& root) {
    RawDataset raw;
    raw.name = "ridi";
    raw.rate_hz = 200.0;
    raw.classes = {"pocket", "bag", "handheld", "body"};
    raw.root = root;

    static const std::map<std::string, int> placement_tags = {
        {"pocket", 0}, {"leg", 0}, {"bag", 1}, {"handheld", 2}, {"body", 3}};

    if (!std::filesystem::is_directory(root))
        throw ingest_error("ridi: not a directory: " + root);

    for (const auto& dir : detail::sorted_entries(root, /*dirs_only=*/true)) {
        const auto csv = dir / "processed" / "data.csv";
        if (!std::filesystem::exists(csv)) continue;

        const std::string name = dir.filename().string();
        const auto tokens = detail::split_on(name, '_');
        if (tokens.size() < 2)
            throw ingest_error("ridi: cannot parse recording directory name: " + name);
        const std::string subject = tokens[0];
        int label = -1;
        for (std::size_t i = 1; i < tokens.size() && label < 0; ++i) {
            const auto it = placement_tags.find(detail::strip_trailing_digits(tokens[i]));
            if (it != placement_tags.end()) label = it->second;
        }
        if (label < 0) throw ingest_error("ridi: unknown placement tag in: " + name);

        const auto table = tab::read_table(csv.string());
        const int gx = table.column("gyro_x"), gy = table.column("gyro_y"),
                  gz = table.column("gyro_z");
        const int ax = table.column("acce_x"), ay = table.column("acce_y"),
                  az = table.column("acce_z");
        if (gx < 0 || gy < 0 || gz < 0 || ax < 0 || ay < 0 || az < 0)
            throw ingest_error("ridi: missing gyro/acce columns in " + csv.string());
        if (table.rows.empty()) throw ingest_error("ridi: no samples in " + csv.string());

        Recording rec;
        rec.subject = subject;
        rec.source = csv.string();
        rec.stream.reserve(table.rows.size());
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const auto& row = table.rows[i];
            StreamSample s;
            s.sample.t = static_cast<std::int64_t>(i);
            s.sample.f = {row[ax], row[ay], row[az]};
            s.sample.w = {row[gx], row[gy], row[gz]};
            s.label = label;
            rec.stream.push_back(s);
        }
        raw.nan_rows_rejected += table.bad_rows;
        ++raw.files_parsed;
        raw.recordings.push_back(std::move(rec));
    }

    if (raw.recordings.empty())
        throw ingest_error("ridi: no recordings found under " + root);
    return raw;
}

// ---------------------------------------------------------------------------
// MotionSense: A_DeviceMotion_data/<act>_<trial>/sub_<id>.csv at 50 Hz.
// DeviceMotion splits gravity from user acceleration, both in g; specific
// force is their sum scaled to m/s^2. rotationRate is already rad/s.
// ---------------------------------------------------------------------------
inline RawDataset load_motionsense(const std::string& root) {
    RawDataset raw;
    raw.name = "motionsense";
    raw.rate_hz = 50.0;
    raw.classes = {"walking", "jogging", "sitting", "standing", "stairs_down", "stairs_up"};
    raw.root = root;

    static const std::map<std::string, int> activity_codes = {
        {"wlk", 0}, {"jog", 1}, {"sit", 2}, {"std", 3}, {"dws", 4}, {"ups", 5}};

    std::filesystem::path base(root);
    if (std::filesystem::is_directory(base / "A_DeviceMotion_data"))
        base /= "A_DeviceMotion_data";
    if (!std::filesystem::is_directory(base))
        throw ingest_error("motionsense: not a directory: " + base.string());

    bool any_folder = false;
    for (const auto& dir : detail::sorted_entries(base, /*dirs_only=*/true)) {
        const std::string folder = dir.filename().string();
        const auto tokens = detail::split_on(folder, '_');
        const auto it = activity_codes.find(tokens[0]);
        if (it == activity_codes.end())
            throw ingest_error("motionsense: unknown activity folder: " + folder);
        any_folder = true;
        const int label = it->second;

        for (const auto& file : detail::sorted_entries(dir, /*dirs_only=*/false)) {
            const std::string fname = file.filename().string();
            if (fname.rfind("sub_", 0) != 0 || file.extension() != ".csv") continue;
            const std::string subject =
                fname.substr(4, fname.size() - 4 - file.extension().string().size());

            const auto table = tab::read_table(file.string());
            const int grx = table.column("gravity.x"), gry = table.column("gravity.y"),
                      grz = table.column("gravity.z");
            const int uax = table.column("userAcceleration.x"),
                      uay = table.column("userAcceleration.y"),
                      uaz = table.column("userAcceleration.z");
            const int rrx = table.column("rotationRate.x"), rry = table.column("rotationRate.y"),
                      rrz = table.column("rotationRate.z");
            if (grx < 0 || gry < 0 || grz < 0 || uax < 0 || uay < 0 || uaz < 0 || rrx < 0 ||
                rry < 0 || rrz < 0)
                throw ingest_error("motionsense: missing DeviceMotion columns in " +
                                   file.string());
            if (table.rows.empty())
                throw ingest_error("motionsense: no samples in " + file.string());

            Recording rec;
            rec.subject = subject;
            rec.source = file.string();
            rec.stream.reserve(table.rows.size());
            for (std::size_t i = 0; i < table.rows.size(); ++i) {
                const auto& row = table.rows[i];
                StreamSample s;
                s.sample.t = static_cast<std::int64_t>(i);
                s.sample.f = {(row[grx] + row[uax]) * kGravity, (row[gry] + row[uay]) * kGravity,
                              (row[grz] + row[uaz]) * kGravity};
                s.sample.w = {row[rrx], row[rry], row[rrz]};
                s.label = label;
                rec.stream.push_back(s);
            }
            raw.nan_rows_rejected += table.bad_rows;
            ++raw.files_parsed;
            raw.recordings.push_back(std::move(rec));
        }
    }

    if (!any_folder || raw.recordings.empty())
        throw ingest_error("motionsense: no recordings found under " + root);
    return raw;
}

// ---------------------------------------------------------------------------
// UCI-HAR: raw Inertial Signals (not the precomputed features), provided as
// 128-sample rows with 50% overlap at 50 Hz, total_acc in g and body_gyro in
// rad/s. Overlapping rows are stitched back into continuous streams; a new
// stream starts whenever subject or activity changes or the 64-sample
// overlap stops matching.
// ---------------------------------------------------------------------------
inline RawDataset load_uci_har(const std::string& root) {
    RawDataset raw;
    raw.name = "uci_har";
    raw.rate_hz = 50.0;
    raw.classes = {"walking", "stairs_down", "stairs_up", "sitting", "standing", "laying"};
    raw.root = root;

    // Dataset activity ids 1..6 -> class indices above.
    static const int label_map[7] = {-1, 0, 2, 1, 3, 4, 5};

    const std::filesystem::path base(root);
    if (!std::filesystem::is_directory(base))
        throw ingest_error("uci_har: not a directory: " + root);

    const char* signals[6] = {"total_acc_x", "total_acc_y", "total_acc_z",
                              "body_gyro_x", "body_gyro_y", "body_gyro_z"};

    bool any_part = false;
    for (const std::string part : {"train", "test"}) {
        const auto part_dir = base / part;
        if (!std::filesystem::is_directory(part_dir)) continue;
        any_part = true;

        auto read_column_file = [&](const std::filesystem::path& p) {
            auto rows = tab::read_matrix(p.string(), 1);
            std::vector<int> out(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) out[i] = static_cast<int>(rows[i][0]);
            return out;
        };
        const auto labels = read_column_file(part_dir / ("y_" + part + ".txt"));
        const auto subjects = read_column_file(part_dir / ("subject_" + part + ".txt"));
        if (labels.size() != subjects.size())
            throw ingest_error("uci_har: y/subject row count mismatch in " + part);

        std::vector<std::vector<std::vector<double>>> sig(6);
        for (int c = 0; c < 6; ++c) {
            const auto p = part_dir / "Inertial Signals" / (std::string(signals[c]) + "_" + part + ".txt");
            sig[c] = tab::read_matrix(p.string(), 128);
            if (sig[c].size() != labels.size())
                throw ingest_error("uci_har: row count mismatch in " + p.string());
            ++raw.files_parsed;
        }

        auto rows_continue = [&](std::size_t prev, std::size_t cur) {
            for (int c = 0; c < 6; ++c)
                for (std::size_t i = 0; i < 64; ++i)
                    if (std::abs(sig[c][cur][i] - sig[c][prev][64 + i]) > 1e-4) return false;
            return true;
        };
        auto row_finite = [&](std::size_t r) {
            for (int c = 0; c < 6; ++c)
                for (double v : sig[c][r])
                    if (!std::isfinite(v)) return false;
            return true;
        };

        Recording rec;
        auto flush = [&] {
            if (!rec.stream.empty()) raw.recordings.push_back(std::move(rec));
            rec = Recording{};
        };
        auto append_row = [&](std::size_t r, std::size_t from) {
            for (std::size_t i = from; i < 128; ++i) {
                StreamSample s;
                s.sample.t = static_cast<std::int64_t>(rec.stream.size());
                s.sample.f = {sig[0][r][i] * kGravity, sig[1][r][i] * kGravity,
                              sig[2][r][i] * kGravity};
                s.sample.w = {sig[3][r][i], sig[4][r][i], sig[5][r][i]};
                const int activity = labels[r];
                if (activity < 1 || activity > 6)
                    throw ingest_error("uci_har: activity id out of range in " + part);
                s.label = label_map[activity];
                rec.stream.push_back(s);
            }
        };

        for (std::size_t r = 0; r < labels.size(); ++r) {
            if (!row_finite(r)) {
                ++raw.nan_rows_rejected;
                flush();
                continue;
            }
            const bool continues = !rec.stream.empty() && r > 0 &&
                                   subjects[r] == subjects[r - 1] && labels[r] == labels[r - 1] &&
                                   rows_continue(r - 1, r);
            if (!continues) {
                flush();
                rec.subject = std::to_string(subjects[r]);
                rec.source = part;
                append_row(r, 0);
            } else {
                append_row(r, 64);  // second half only; first half overlaps
            }
        }
        flush();
    }

    if (!any_part) throw ingest_error("uci_har: no train/ or test/ directory under " + root);
    if (raw.recordings.empty()) throw ingest_error("uci_har: no recordings found under " + root);
    return raw;
}

// ---------------------------------------------------------------------------
// USC-SIPI (USC-HAD): Subject<id>/a<activity>t<trial>.mat with an N x 6
// sensor_readings matrix (acc in g, gyro in deg/s) at 100 Hz. Activities
// outside the five benchmark classes are skipped.
// ---------------------------------------------------------------------------
inline RawDataset load_usc_sipi(const std::string& root) {
    RawDataset raw;
    raw.name = "usc_sipi";
    raw.rate_hz = 100.0;
    raw.classes = {"walking", "running", "jumping", "sitting", "standing"};
    raw.root = root;

    // USC-HAD activity numbers: 1 walking forward, 6 running, 7 jumping,
    // 8 sitting, 9 standing. The rest are excluded.
    static const std::map<int, int> activity_map = {{1, 0}, {6, 1}, {7, 2}, {8, 3}, {9, 4}};

    if (!std::filesystem::is_directory(root))
        throw ingest_error("usc_sipi: not a directory: " + root);

    bool any_subject = false;
    for (const auto& dir : detail::sorted_entries(root, /*dirs_only=*/true)) {
        const std::string folder = dir.filename().string();
        if (folder.rfind("Subject", 0) != 0) continue;
        any_subject = true;
        const std::string subject = folder.substr(7);

        for (const auto& file : detail::sorted_entries(dir, /*dirs_only=*/false)) {
            if (file.extension() != ".mat") continue;
            const std::string stem = file.stem().string();
            // a<activity>t<trial>
            if (stem.empty() || stem[0] != 'a') continue;
            const auto t_pos = stem.find('t', 1);
            if (t_pos == std::string::npos) continue;
            int activity = 0;
            try {
                activity = std::stoi(stem.substr(1, t_pos - 1));
            } catch (...) {
                continue;
            }
            const auto it = activity_map.find(activity);
            if (it == activity_map.end()) continue;  // excluded activity

            const auto m = mat5::read_named(file.string(), "sensor_readings");
            if (m.cols != 6)
                throw ingest_error("usc_sipi: sensor_readings is not N x 6 in " + file.string());
            if (m.rows == 0) throw ingest_error("usc_sipi: empty recording " + file.string());

            Recording rec;
            rec.subject = subject;
            rec.source = file.string();
            rec.stream.reserve(m.rows);
            for (std::size_t i = 0; i < m.rows; ++i) {
                bool finite = true;
                for (std::size_t c = 0; c < 6; ++c)
                    if (!std::isfinite(m.at(i, c))) finite = false;
                if (!finite) {
                    ++raw.nan_rows_rejected;
                    continue;
                }
                StreamSample s;
                s.sample.t = static_cast<std::int64_t>(rec.stream.size());
                s.sample.f = {m.at(i, 0) * kGravity, m.at(i, 1) * kGravity,
                              m.at(i, 2) * kGravity};
                s.sample.w = {m.at(i, 3) * kDegToRad, m.at(i, 4) * kDegToRad,
                              m.at(i, 5) * kDegToRad};
                s.label = it->second;
                rec.stream.push_back(s);
            }
            ++raw.files_parsed;
            raw.recordings.push_back(std::move(rec));
        }
    }

    if (!any_subject) throw ingest_error("usc_sipi: no Subject directories under " + root);
    if (raw.recordings.empty())
        throw ingest_error("usc_sipi: no recordings found under " + root);
    return raw;
}

inline RawDataset load_dataset(const std::string& name, const std::string& root) {
    if (name == "ridi") return load_ridi(root);
    if (name == "motionsense") return load_motionsense(root);
    if (name == "uci_har") return load_uci_har(root);
    if (name == "usc_sipi") return load_usc_sipi(root);
    throw config_error("unknown dataset name: " + name +
                       " (expected ridi, motionsense, uci_har or usc_sipi)");
}

}  // namespace nicbench
