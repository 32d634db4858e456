#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "corrdyn/dimension.hpp"

namespace corrdyn {

struct GeneratorSpec {
    std::vector<Complex> num;
    std::vector<Complex> den{Complex{1.0, 0.0}};
    int mult = 1;
};

struct RunCaps {
    std::size_t atoms = kDefaultAtomCap;
    long long words = kDefaultWordCap;
    int degree = kDefaultDegreeCap;
};

/// Configuration for one CLI run. Round-trips through serialize_config:
/// parse(serialize(cfg)) serializes to the identical byte string.
struct RunConfig {
    std::string command;
    std::vector<GeneratorSpec> generators;

    int n = 1;
    std::size_t count = 10000;
    bool seed_set = false;
    std::uint64_t seed = 0;
    int grid = 8;
    long long k_max = 10;
    std::vector<double> scales; // empty -> default_box_scales()
    int l = 2;
    std::string mode = "exact"; // pullback: exact | sample
    std::string compare_a = "repelling";
    std::string compare_b = "exact";
    bool w0_set = false;
    Complex w0{0.0, 0.0};
    bool w0_infinity = false;
    RunCaps caps;
    std::string out = ".";
    std::array<double, 4> window{-1.5, 1.5, -1.5, 1.5};
    int pixels = 256;
    unsigned workers = 1;

    double probe_radius = 0.05;
    int probe_depth = 6;
    int probe_samples = 400;
    double probe_epsilon = 0.1;
    bool probe_center_set = false;
    Complex probe_center{1.0, 0.0};

    int sample_word_len = 4;
    int sample_depth = 6;
    std::string sample_use = "both"; // repelling | pullback | both
    std::string render_source = "pullback";
};

/// Throws ConfigError with the offending field named.
RunConfig parse_config(const std::string& json_text);
std::string serialize_config(const RunConfig& cfg);

Chain chain_from_config(const RunConfig& cfg);

/// Executes the configured command, writing artifacts plus manifest.json
/// under cfg.out. Throws ConfigError / CapExceeded / NumericalError.
void run_command(const RunConfig& cfg);

// --- artifact serialization (bit-stable: %.17g floats) ---
std::string format_double(double v);
std::string csv_of_measure(const AtomicMeasure& m);
std::string csv_of_points(const PointSet& points);
std::string csv_of_repelling(const std::vector<RepellingPoint>& points);
std::string csv_of_lambda(const std::vector<LambdaRow>& rows);
std::string csv_of_words(const std::vector<Word>& words);
std::string csv_of_probe(const ShrinkProbeResult& probe);

/// 8-bit binary PGM of log-scaled per-pixel weight over an affine window.
std::string render_pgm(const AtomicMeasure& m, const std::array<double, 4>& window,
                       int pixels);

void write_file(const std::string& path, const std::string& content);

} // namespace corrdyn
