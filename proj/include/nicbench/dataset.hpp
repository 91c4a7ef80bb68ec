#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nicbench/denoise.hpp"
#include "nicbench/errors.hpp"
#include "nicbench/io.hpp"
#include "nicbench/rng.hpp"
#include "nicbench/signal.hpp"

namespace nicbench {

// One contiguous labeled sensor stream from a single subject.
struct Recording {
    std::string subject;
    std::vector<StreamSample> stream;
    std::string source;
};

// Loader output before windowing: streams plus dataset metadata.
struct RawDataset {
    std::string name;
    double rate_hz = 0.0;
    std::vector<std::string> classes;
    std::vector<Recording> recordings;
    std::string root;
    std::size_t files_parsed = 0;
    std::size_t nan_rows_rejected = 0;

    double total_minutes() const {
        std::size_t n = 0;
        for (const auto& r : recordings) n += r.stream.size();
        return static_cast<double>(n) / rate_hz / 60.0;
    }
};

struct Provenance {
    std::string root;
    std::size_t files_parsed = 0;
    std::size_t nan_rows_rejected = 0;
    std::size_t short_recordings_skipped = 0;
};

// Windowed dataset with a subject-wise train/test split.
struct Dataset {
    std::string name;
    double rate_hz = 0.0;
    std::vector<std::string> classes;
    std::vector<Window> train;
    std::vector<Window> test;
    std::vector<std::string> train_subjects;
    std::vector<std::string> test_subjects;
    Provenance provenance;
};

struct SubjectSplit {
    std::vector<std::string> train;
    std::vector<std::string> test;
};

// Seeded subject-wise split: ceil(test_fraction * n) subjects go to test.
inline SubjectSplit split_subjects(std::vector<std::string> subjects, double test_fraction,
                                   std::uint64_t seed) {
    std::sort(subjects.begin(), subjects.end());
    subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
    if (subjects.size() < 2) throw ingest_error("split: need at least 2 subjects");
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
        throw ingest_error("split: test fraction must be in (0,1)");

    Rng rng(substream_seed(seed, 0x5711));
    rng.shuffle(subjects);
    const auto n_test = static_cast<std::size_t>(
        std::ceil(test_fraction * static_cast<double>(subjects.size())));

    SubjectSplit split;
    split.test.assign(subjects.begin(), subjects.begin() + n_test);
    split.train.assign(subjects.begin() + n_test, subjects.end());
    std::sort(split.test.begin(), split.test.end());
    std::sort(split.train.begin(), split.train.end());
    if (split.train.empty()) throw ingest_error("split: no training subjects left");
    return split;
}

struct BuildOptions {
    std::size_t window_len = 100;
    std::size_t stride = 0;         // 0 means stride = window_len
    std::size_t ma_window = 0;      // 0 disables denoising
    double test_fraction = 0.2;
    std::uint64_t split_seed = 42;
    double subject_fraction = 1.0;  // < 1 keeps a seeded subject subset
};

// Stream pipeline: optional moving-average denoise, segmentation into
// non-overlapping label-homogeneous windows, subject-wise split.
inline Dataset build_dataset(const RawDataset& raw, const BuildOptions& opts) {
    if (opts.window_len < 1) throw ingest_error("build: window length must be >= 1");
    const std::size_t stride = opts.stride == 0 ? opts.window_len : opts.stride;

    std::vector<std::string> subjects;
    for (const auto& r : raw.recordings) subjects.push_back(r.subject);
    std::sort(subjects.begin(), subjects.end());
    subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());

    if (opts.subject_fraction < 1.0) {
        if (!(opts.subject_fraction > 0.0))
            throw ingest_error("build: subject fraction must be in (0,1]");
        const auto keep = std::max<std::size_t>(
            2, static_cast<std::size_t>(
                   std::ceil(opts.subject_fraction * static_cast<double>(subjects.size()))));
        Rng rng(substream_seed(opts.split_seed, 0x5B85));
        rng.shuffle(subjects);
        subjects.resize(std::min(keep, subjects.size()));
        std::sort(subjects.begin(), subjects.end());
    }

    const SubjectSplit split = split_subjects(subjects, opts.test_fraction, opts.split_seed);
    const std::set<std::string> kept(subjects.begin(), subjects.end());
    const std::set<std::string> test_set(split.test.begin(), split.test.end());

    Dataset ds;
    ds.name = raw.name;
    ds.rate_hz = raw.rate_hz;
    ds.classes = raw.classes;
    ds.train_subjects = split.train;
    ds.test_subjects = split.test;
    ds.provenance = {raw.root, raw.files_parsed, raw.nan_rows_rejected, 0};

    for (const auto& rec : raw.recordings) {
        if (!kept.count(rec.subject)) continue;
        std::span<const StreamSample> stream(rec.stream);
        std::vector<StreamSample> filtered;
        if (opts.ma_window > 1) {
            if (rec.stream.size() < opts.ma_window) {
                ++ds.provenance.short_recordings_skipped;
                continue;
            }
            filtered = denoise_stream(stream, MaSpec{opts.ma_window});
            stream = filtered;
        }
        auto windows = segment_stream(stream, opts.window_len, stride, rec.subject, raw.rate_hz);
        auto& sink = test_set.count(rec.subject) ? ds.test : ds.train;
        for (auto& w : windows) sink.push_back(std::move(w));
    }

    for (const auto* windows : {&ds.train, &ds.test})
        for (const auto& w : *windows)
            if (w.label < 0 || static_cast<std::size_t>(w.label) >= ds.classes.size())
                throw ingest_error("build: window label out of range");
    if (ds.train.empty()) throw ingest_error("build: no training windows for " + raw.name);
    if (ds.test.empty()) throw ingest_error("build: no test windows for " + raw.name);
    return ds;
}

struct ClassMinutes {
    std::string class_name;
    double minutes = 0.0;
};

// Per-class recording time, computed on the raw streams (before windowing
// drops anything).
inline std::vector<ClassMinutes> summarize(const RawDataset& raw) {
    std::vector<double> counts(raw.classes.size(), 0.0);
    for (const auto& rec : raw.recordings)
        for (const auto& s : rec.stream) {
            if (s.label >= 0 && static_cast<std::size_t>(s.label) < counts.size())
                counts[static_cast<std::size_t>(s.label)] += 1.0;
        }
    std::vector<ClassMinutes> out;
    for (std::size_t i = 0; i < raw.classes.size(); ++i)
        out.push_back({raw.classes[i], counts[i] / raw.rate_hz / 60.0});
    return out;
}

inline constexpr std::uint32_t kCacheMagic = 0x4443494Eu;  // "NICD"
inline constexpr std::uint32_t kCacheVersion = 1;

// Windowed-dataset cache: header with metadata, then each window's samples
// as little-endian 32-bit floats (channel values interleaved per sample).
inline void save_dataset_cache(const Dataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ingest_error("cache: cannot open for write: " + path);
    io::write_pod<std::uint32_t>(os, kCacheMagic);
    io::write_pod<std::uint32_t>(os, kCacheVersion);
    io::write_pod<double>(os, ds.rate_hz);
    io::write_string(os, ds.name);
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ds.classes.size()));
    for (const auto& c : ds.classes) io::write_string(os, c);
    io::write_string(os, ds.provenance.root);
    io::write_pod<std::uint64_t>(os, ds.provenance.files_parsed);
    io::write_pod<std::uint64_t>(os, ds.provenance.nan_rows_rejected);
    io::write_pod<std::uint64_t>(os, ds.provenance.short_recordings_skipped);

    auto write_subjects = [&](const std::vector<std::string>& subjects) {
        io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(subjects.size()));
        for (const auto& s : subjects) io::write_string(os, s);
    };
    write_subjects(ds.train_subjects);
    write_subjects(ds.test_subjects);

    auto write_windows = [&](const std::vector<Window>& windows) {
        io::write_pod<std::uint64_t>(os, windows.size());
        for (const Window& w : windows) {
            io::write_pod<std::int32_t>(os, w.label);
            io::write_string(os, w.subject);
            io::write_pod<std::uint64_t>(os, w.samples.size());
            for (const ImuSample& s : w.samples)
                for (int c = 0; c < kNumChannels; ++c)
                    io::write_pod<float>(os, static_cast<float>(s.channel(c)));
        }
    };
    write_windows(ds.train);
    write_windows(ds.test);
    if (!os) throw ingest_error("cache: write failed: " + path);
}

inline Dataset load_dataset_cache(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ingest_error("cache: cannot open: " + path);
    if (io::read_pod<std::uint32_t>(is) != kCacheMagic)
        throw ingest_error("cache: bad magic: " + path);
    if (io::read_pod<std::uint32_t>(is) != kCacheVersion)
        throw ingest_error("cache: unsupported version: " + path);

    Dataset ds;
    ds.rate_hz = io::read_pod<double>(is);
    ds.name = io::read_string(is);
    const auto k = io::read_pod<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < k; ++i) ds.classes.push_back(io::read_string(is));
    ds.provenance.root = io::read_string(is);
    ds.provenance.files_parsed = io::read_pod<std::uint64_t>(is);
    ds.provenance.nan_rows_rejected = io::read_pod<std::uint64_t>(is);
    ds.provenance.short_recordings_skipped = io::read_pod<std::uint64_t>(is);

    auto read_subjects = [&](std::vector<std::string>& subjects) {
        const auto n = io::read_pod<std::uint32_t>(is);
        for (std::uint32_t i = 0; i < n; ++i) subjects.push_back(io::read_string(is));
    };
    read_subjects(ds.train_subjects);
    read_subjects(ds.test_subjects);

    auto read_windows = [&](std::vector<Window>& windows) {
        const auto n = io::read_pod<std::uint64_t>(is);
        for (std::uint64_t i = 0; i < n; ++i) {
            Window w;
            w.rate_hz = ds.rate_hz;
            w.label = io::read_pod<std::int32_t>(is);
            w.subject = io::read_string(is);
            const auto len = io::read_pod<std::uint64_t>(is);
            w.samples.resize(len);
            for (std::uint64_t j = 0; j < len; ++j) {
                w.samples[j].t = static_cast<std::int64_t>(j);
                for (int c = 0; c < kNumChannels; ++c)
                    w.samples[j].set_channel(c, io::read_pod<float>(is));
            }
            windows.push_back(std::move(w));
        }
    };
    read_windows(ds.train);
    read_windows(ds.test);
    return ds;
}

}  // namespace nicbench
