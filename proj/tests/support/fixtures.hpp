#pragma once

// Writes miniature datasets in the published on-disk layouts of the four
// sources, with class-separable synthetic signals. Used by loader tests and
// by the end-to-end harness runs.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "nicbench/rng.hpp"

namespace fixtures {

namespace fs = std::filesystem;

inline constexpr double kG = 9.80665;

// Separable per-class pattern: class-specific tone, amplitude and offset on
// every channel, plus a little noise so no channel is degenerate.
inline std::array<double, 6> class_pattern(int cls, std::size_t t, double rate_hz,
                                           nicbench::Rng& noise) {
    std::array<double, 6> out{};
    const double freq = 1.0 + 0.9 * cls;
    const double phase = 2.0 * 3.14159265358979323846 * freq * double(t) / rate_hz;
    for (int c = 0; c < 6; ++c) {
        const double amp = 0.8 + 0.25 * c + 0.6 * cls;
        const double offset = 0.5 * cls + 0.1 * c;
        out[c] = amp * std::sin(phase + 0.7 * c) + offset + 0.05 * noise.normal();
    }
    out[2] += kG;  // gravity-dominated z specific force
    return out;
}

// --------------------------- RIDI ------------------------------------------

inline void write_ridi_fixture(const fs::path& root, const std::vector<std::string>& subjects,
                               std::size_t samples = 1200) {
    const char* placements[4] = {"pocket", "bag", "handheld", "body"};
    std::uint64_t seed = 1000;
    for (const auto& subject : subjects) {
        for (int cls = 0; cls < 4; ++cls) {
            // One subject uses the alternate "leg" tag for the pocket class.
            std::string tag = placements[cls];
            if (cls == 0 && subject == subjects.front()) tag = "leg";
            const fs::path dir = root / (subject + "_" + tag + "1") / "processed";
            fs::create_directories(dir);
            std::ofstream os(dir / "data.csv");
            os << "time,gyro_x,gyro_y,gyro_z,acce_x,acce_y,acce_z,pos_x\n";
            nicbench::Rng rng(seed++);
            for (std::size_t t = 0; t < samples; ++t) {
                const auto v = class_pattern(cls, t, 200.0, rng);
                char buf[256];
                std::snprintf(buf, sizeof(buf),
                              "%.6f,%.8f,%.8f,%.8f,%.8f,%.8f,%.8f,0.0\n", double(t) / 200.0,
                              v[3], v[4], v[5], v[0], v[1], v[2]);
                os << buf;
            }
        }
    }
}

// --------------------------- MotionSense -----------------------------------

inline void write_motionsense_fixture(const fs::path& root, std::size_t n_subjects,
                                      std::size_t samples = 800) {
    const char* codes[6] = {"wlk", "jog", "sit", "std", "dws", "ups"};
    std::uint64_t seed = 2000;
    for (int cls = 0; cls < 6; ++cls) {
        const fs::path dir = root / "A_DeviceMotion_data" / (std::string(codes[cls]) + "_1");
        fs::create_directories(dir);
        for (std::size_t subj = 1; subj <= n_subjects; ++subj) {
            std::ofstream os(dir / ("sub_" + std::to_string(subj) + ".csv"));
            os << ",attitude.roll,attitude.pitch,attitude.yaw,gravity.x,gravity.y,gravity.z,"
                  "rotationRate.x,rotationRate.y,rotationRate.z,"
                  "userAcceleration.x,userAcceleration.y,userAcceleration.z\n";
            nicbench::Rng rng(seed++);
            for (std::size_t t = 0; t < samples; ++t) {
                auto v = class_pattern(cls, t, 50.0, rng);
                // Emit in DeviceMotion conventions: acceleration split into a
                // fixed gravity part and the remainder, both in g units.
                const double grav[3] = {0.0, 0.0, -1.0};
                const double user[3] = {v[0] / kG - grav[0], v[1] / kG - grav[1],
                                        v[2] / kG - grav[2]};
                char buf[384];
                std::snprintf(buf, sizeof(buf),
                              "%zu,0.1,0.2,0.3,%.8f,%.8f,%.8f,%.8f,%.8f,%.8f,%.8f,%.8f,%.8f\n",
                              t, grav[0], grav[1], grav[2], v[3], v[4], v[5], user[0], user[1],
                              user[2]);
                os << buf;
            }
        }
    }
}

// --------------------------- UCI-HAR ---------------------------------------

// Streams are written as 128-wide rows with 50% overlap, the dataset's
// published raw-inertial-signal encoding.
inline void write_uci_har_fixture(const fs::path& root, std::size_t n_subjects,
                                  std::size_t rows_per_run = 11) {
    const fs::path dir = root / "train" / "Inertial Signals";
    fs::create_directories(dir);

    const char* signals[6] = {"total_acc_x", "total_acc_y", "total_acc_z",
                              "body_gyro_x", "body_gyro_y", "body_gyro_z"};
    std::vector<std::vector<std::array<double, 6>>> streams;
    std::vector<int> run_subject, run_activity;

    std::uint64_t seed = 3000;
    for (std::size_t subj = 1; subj <= n_subjects; ++subj) {
        for (int activity = 1; activity <= 6; ++activity) {
            nicbench::Rng rng(seed++);
            const std::size_t len = 64 * (rows_per_run + 1);
            std::vector<std::array<double, 6>> stream(len);
            for (std::size_t t = 0; t < len; ++t) {
                auto v = class_pattern(activity - 1, t, 50.0, rng);
                // File units: total_acc in g, gyro in rad/s.
                v[0] /= kG;
                v[1] /= kG;
                v[2] /= kG;
                stream[t] = v;
            }
            streams.push_back(std::move(stream));
            run_subject.push_back(static_cast<int>(subj));
            run_activity.push_back(activity);
        }
    }

    std::ofstream y(root / "train" / "y_train.txt");
    std::ofstream subject(root / "train" / "subject_train.txt");
    std::vector<std::ofstream> sig_files;
    for (int c = 0; c < 6; ++c)
        sig_files.emplace_back(dir / (std::string(signals[c]) + "_train.txt"));

    for (std::size_t run = 0; run < streams.size(); ++run) {
        const auto& stream = streams[run];
        const std::size_t rows = stream.size() / 64 - 1;
        for (std::size_t r = 0; r < rows; ++r) {
            y << run_activity[run] << "\n";
            subject << run_subject[run] << "\n";
            for (int c = 0; c < 6; ++c) {
                for (std::size_t i = 0; i < 128; ++i) {
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "%s%.7e", i ? " " : "",
                                  stream[64 * r + i][static_cast<std::size_t>(c)]);
                    sig_files[static_cast<std::size_t>(c)] << buf;
                }
                sig_files[static_cast<std::size_t>(c)] << "\n";
            }
        }
    }
}

// --------------------------- USC-SIPI (MAT v5) ------------------------------

namespace mat_detail {

inline void push_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void push_raw(std::vector<std::uint8_t>& b, const void* p, std::size_t n) {
    const auto* bytes = static_cast<const std::uint8_t*>(p);
    b.insert(b.end(), bytes, bytes + n);
}

inline void pad8(std::vector<std::uint8_t>& b) {
    while (b.size() % 8 != 0) b.push_back(0);
}

// One miMATRIX element holding an N x 6 double matrix (column-major).
inline std::vector<std::uint8_t> matrix_element(const std::string& name, std::size_t rows,
                                                std::size_t cols,
                                                const std::vector<double>& colmajor) {
    std::vector<std::uint8_t> payload;
    // array flags: miUINT32 x2, class mxDOUBLE (6)
    push_u32(payload, 6);  // miUINT32
    push_u32(payload, 8);
    push_u32(payload, 6);  // mxDOUBLE_CLASS
    push_u32(payload, 0);
    // dimensions: miINT32 x2
    push_u32(payload, 5);  // miINT32
    push_u32(payload, 8);
    push_u32(payload, static_cast<std::uint32_t>(rows));
    push_u32(payload, static_cast<std::uint32_t>(cols));
    // name: miINT8
    push_u32(payload, 1);  // miINT8
    push_u32(payload, static_cast<std::uint32_t>(name.size()));
    push_raw(payload, name.data(), name.size());
    pad8(payload);
    // real part: miDOUBLE
    push_u32(payload, 9);  // miDOUBLE
    push_u32(payload, static_cast<std::uint32_t>(colmajor.size() * 8));
    push_raw(payload, colmajor.data(), colmajor.size() * 8);
    pad8(payload);

    std::vector<std::uint8_t> element;
    push_u32(element, 14);  // miMATRIX
    push_u32(element, static_cast<std::uint32_t>(payload.size()));
    element.insert(element.end(), payload.begin(), payload.end());
    return element;
}

}  // namespace mat_detail

inline void write_mat5(const fs::path& path, const std::string& var_name, std::size_t rows,
                       std::size_t cols, const std::vector<double>& colmajor,
                       bool compressed = false) {
    std::vector<std::uint8_t> file;
    std::string header = "MATLAB 5.0 MAT-file, synthetic fixture";
    header.resize(124, ' ');
    mat_detail::push_raw(file, header.data(), 124);
    file.push_back(0x00);
    file.push_back(0x01);  // version 0x0100
    file.push_back('I');
    file.push_back('M');

    auto element = mat_detail::matrix_element(var_name, rows, cols, colmajor);
    if (!compressed) {
        file.insert(file.end(), element.begin(), element.end());
    } else {
        uLongf bound = compressBound(static_cast<uLong>(element.size()));
        std::vector<std::uint8_t> z(bound);
        if (compress2(z.data(), &bound, element.data(), static_cast<uLong>(element.size()), 6) !=
            Z_OK)
            throw std::runtime_error("fixture: compress2 failed");
        z.resize(bound);
        mat_detail::push_u32(file, 15);  // miCOMPRESSED
        mat_detail::push_u32(file, static_cast<std::uint32_t>(z.size()));
        file.insert(file.end(), z.begin(), z.end());
    }

    std::ofstream os(path, std::ios::binary);
    os.write(reinterpret_cast<const char*>(file.data()),
             static_cast<std::streamsize>(file.size()));
}

inline void write_usc_sipi_fixture(const fs::path& root, std::size_t n_subjects,
                                   std::size_t samples = 900) {
    // Benchmark activities plus one excluded id (11, elevator) that the
    // loader must skip.
    const int activities[6] = {1, 6, 7, 8, 9, 11};
    const int classes[6] = {0, 1, 2, 3, 4, 0};
    std::uint64_t seed = 4000;
    for (std::size_t subj = 1; subj <= n_subjects; ++subj) {
        const fs::path dir = root / ("Subject" + std::to_string(subj));
        fs::create_directories(dir);
        for (int a = 0; a < 6; ++a) {
            nicbench::Rng rng(seed++);
            std::vector<double> colmajor(samples * 6);
            for (std::size_t t = 0; t < samples; ++t) {
                auto v = class_pattern(classes[a], t, 100.0, rng);
                // File units: acc in g, gyro in deg/s.
                for (int c = 0; c < 3; ++c) colmajor[c * samples + t] = v[c] / kG;
                for (int c = 3; c < 6; ++c)
                    colmajor[c * samples + t] = v[c] * 180.0 / 3.14159265358979323846;
            }
            const bool compress = (subj + a) % 2 == 0;
            write_mat5(dir / ("a" + std::to_string(activities[a]) + "t1.mat"),
                       "sensor_readings", samples, 6, colmajor, compress);
        }
    }
}

// Writes all four fixture datasets under one root.
inline void write_all_fixtures(const fs::path& root) {
    write_ridi_fixture(root / "ridi", {"alice", "bob", "carol", "dave"});
    write_motionsense_fixture(root / "motionsense", 4);
    write_uci_har_fixture(root / "uci_har", 4);
    write_usc_sipi_fixture(root / "usc_sipi", 4);
}

}  // namespace fixtures
