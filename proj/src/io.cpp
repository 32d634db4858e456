#include "corrdyn/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "corrdyn/errors.hpp"
#include "corrdyn/rng.hpp"

namespace corrdyn {

using nlohmann::json;

namespace {

std::vector<Complex> parse_coeffs(const json& arr, const std::string& field) {
    if (!arr.is_array() || arr.empty())
        throw ConfigError("field '" + field + "': expected a non-empty array of [re, im]");
    std::vector<Complex> out;
    for (const json& pair : arr) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
            !pair[1].is_number())
            throw ConfigError("field '" + field + "': entries must be [re, im] pairs");
        out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return out;
}

json coeffs_to_json(const std::vector<Complex>& coeffs) {
    json arr = json::array();
    for (const Complex& c : coeffs) arr.push_back({c.real(), c.imag()});
    return arr;
}

template <typename T>
T get_field(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + key + "': wrong type");
    }
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    RunConfig cfg;
    cfg.command = get_field<std::string>(j, "command", "");
    if (cfg.command.empty()) throw ConfigError("field 'command': missing");

    if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty())
        throw ConfigError("field 'generators': expected a non-empty array");
    for (const json& g : j["generators"]) {
        GeneratorSpec spec;
        if (!g.contains("num")) throw ConfigError("field 'generators[].num': missing");
        spec.num = parse_coeffs(g["num"], "generators[].num");
        if (g.contains("den")) spec.den = parse_coeffs(g["den"], "generators[].den");
        spec.mult = get_field<int>(g, "mult", 1);
        if (spec.mult < 1) throw ConfigError("field 'generators[].mult': must be >= 1");
        cfg.generators.push_back(std::move(spec));
    }

    cfg.n = get_field<int>(j, "n", cfg.n);
    cfg.count = get_field<std::size_t>(j, "count", cfg.count);
    if (j.contains("seed")) {
        cfg.seed = get_field<std::uint64_t>(j, "seed", 0);
        cfg.seed_set = true;
    }
    cfg.grid = get_field<int>(j, "grid", cfg.grid);
    cfg.k_max = get_field<long long>(j, "kmax", cfg.k_max);
    cfg.l = get_field<int>(j, "l", cfg.l);
    cfg.mode = get_field<std::string>(j, "mode", cfg.mode);
    cfg.out = get_field<std::string>(j, "out", cfg.out);
    cfg.pixels = get_field<int>(j, "pixels", cfg.pixels);
    cfg.workers = get_field<unsigned>(j, "workers", cfg.workers);
    if (cfg.workers < 1) cfg.workers = 1;
    cfg.render_source = get_field<std::string>(j, "render_source", cfg.render_source);

    if (j.contains("scales")) {
        try {
            cfg.scales = j["scales"].get<std::vector<double>>();
        } catch (const json::exception&) {
            throw ConfigError("field 'scales': expected an array of numbers");
        }
    }
    if (j.contains("w0")) {
        const json& w = j["w0"];
        if (w.is_string() && w.get<std::string>() == "inf") {
            cfg.w0_infinity = true;
            cfg.w0_set = true;
        } else if (w.is_array() && w.size() == 2 && w[0].is_number() && w[1].is_number()) {
            cfg.w0 = Complex{w[0].get<double>(), w[1].get<double>()};
            cfg.w0_set = true;
        } else {
            throw ConfigError("field 'w0': expected [re, im] or \"inf\"");
        }
    }
    if (j.contains("window")) {
        try {
            auto v = j["window"].get<std::vector<double>>();
            if (v.size() != 4) throw ConfigError("field 'window': expected 4 numbers");
            std::copy(v.begin(), v.end(), cfg.window.begin());
        } catch (const json::exception&) {
            throw ConfigError("field 'window': expected an array of 4 numbers");
        }
    }
    if (j.contains("caps")) {
        const json& caps = j["caps"];
        cfg.caps.atoms = get_field<std::size_t>(caps, "atoms", cfg.caps.atoms);
        cfg.caps.words = get_field<long long>(caps, "words", cfg.caps.words);
        cfg.caps.degree = get_field<int>(caps, "degree", cfg.caps.degree);
        if (cfg.caps.atoms == 0 || cfg.caps.words < 1 || cfg.caps.degree < 1)
            throw ConfigError("field 'caps': caps must be positive");
    }
    if (j.contains("compare")) {
        const json& cmp = j["compare"];
        cfg.compare_a = get_field<std::string>(cmp, "a", cfg.compare_a);
        cfg.compare_b = get_field<std::string>(cmp, "b", cfg.compare_b);
    }
    if (j.contains("probe")) {
        const json& p = j["probe"];
        cfg.probe_radius = get_field<double>(p, "radius", cfg.probe_radius);
        cfg.probe_depth = get_field<int>(p, "depth", cfg.probe_depth);
        cfg.probe_samples = get_field<int>(p, "samples", cfg.probe_samples);
        cfg.probe_epsilon = get_field<double>(p, "epsilon", cfg.probe_epsilon);
        if (p.contains("center")) {
            const json& ctr = p["center"];
            if (!ctr.is_array() || ctr.size() != 2)
                throw ConfigError("field 'probe.center': expected [re, im]");
            cfg.probe_center = Complex{ctr[0].get<double>(), ctr[1].get<double>()};
            cfg.probe_center_set = true;
        }
    }
    if (j.contains("sample")) {
        const json& s = j["sample"];
        cfg.sample_word_len = get_field<int>(s, "word_len", cfg.sample_word_len);
        cfg.sample_depth = get_field<int>(s, "depth", cfg.sample_depth);
        cfg.sample_use = get_field<std::string>(s, "use", cfg.sample_use);
    }
    return cfg;
}

namespace {

json config_to_json(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    json gens = json::array();
    for (const GeneratorSpec& g : cfg.generators) {
        json one;
        one["num"] = coeffs_to_json(g.num);
        one["den"] = coeffs_to_json(g.den);
        one["mult"] = g.mult;
        gens.push_back(one);
    }
    j["generators"] = gens;
    j["n"] = cfg.n;
    j["count"] = cfg.count;
    if (cfg.seed_set) j["seed"] = cfg.seed;
    j["grid"] = cfg.grid;
    j["kmax"] = cfg.k_max;
    j["l"] = cfg.l;
    j["mode"] = cfg.mode;
    j["out"] = cfg.out;
    j["pixels"] = cfg.pixels;
    j["workers"] = cfg.workers;
    j["render_source"] = cfg.render_source;
    if (!cfg.scales.empty()) j["scales"] = cfg.scales;
    if (cfg.w0_set) {
        if (cfg.w0_infinity)
            j["w0"] = "inf";
        else
            j["w0"] = {cfg.w0.real(), cfg.w0.imag()};
    }
    j["window"] = cfg.window;
    j["caps"] = {{"atoms", cfg.caps.atoms}, {"words", cfg.caps.words},
                 {"degree", cfg.caps.degree}};
    j["compare"] = {{"a", cfg.compare_a}, {"b", cfg.compare_b}};
    j["probe"] = {{"radius", cfg.probe_radius},
                  {"depth", cfg.probe_depth},
                  {"samples", cfg.probe_samples},
                  {"epsilon", cfg.probe_epsilon}};
    if (cfg.probe_center_set)
        j["probe"]["center"] = {cfg.probe_center.real(), cfg.probe_center.imag()};
    j["sample"] = {{"word_len", cfg.sample_word_len},
                   {"depth", cfg.sample_depth},
                   {"use", cfg.sample_use}};
    return j;
}

} // namespace

std::string serialize_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

Chain chain_from_config(const RunConfig& cfg) {
    std::vector<ChainComponent> comps;
    for (const GeneratorSpec& g : cfg.generators) {
        try {
            comps.push_back(
                ChainComponent{make_rational_map(make_poly(g.num), make_poly(g.den)), g.mult});
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("field 'generators': ") + e.what());
        }
    }
    return make_chain(std::move(comps));
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string csv_point_fields(const P1Point& p) {
    if (is_infinity(p)) return "0,0,1";
    const Complex z = project_affine(p).value;
    return format_double(z.real()) + "," + format_double(z.imag()) + ",0";
}

} // namespace

std::string csv_of_measure(const AtomicMeasure& m) {
    std::string out = "re,im,at_infinity,weight\n";
    for (const WeightedAtom& a : m.atoms())
        out += csv_point_fields(a.point) + "," + format_double(a.weight) + "\n";
    return out;
}

std::string csv_of_points(const PointSet& points) {
    std::string out = "re,im,at_infinity\n";
    for (const P1Point& p : points) out += csv_point_fields(p) + "\n";
    return out;
}

std::string csv_of_repelling(const std::vector<RepellingPoint>& points) {
    std::string out = "re,im,word_indices,multiplier,weight\n";
    for (const RepellingPoint& rp : points) {
        std::string word;
        for (std::size_t i = 0; i < rp.word.indices.size(); ++i) {
            if (i) word += "-";
            word += std::to_string(rp.word.indices[i] + 1); // 1-based, applied first to last
        }
        const Complex z = is_infinity(rp.point) ? Complex{0.0, 0.0}
                                                : project_affine(rp.point).value;
        out += format_double(z.real()) + "," + format_double(z.imag()) + "," + word + "," +
               format_double(rp.multiplier) + "," + std::to_string(rp.weight) + "\n";
    }
    return out;
}

std::string csv_of_lambda(const std::vector<LambdaRow>& rows) {
    std::string out = "k,R_k,lambda_k\n";
    for (const LambdaRow& r : rows)
        out += std::to_string(r.k) + "," + format_double(r.R_k) + "," +
               format_double(r.lambda_k) + "\n";
    return out;
}

std::string csv_of_words(const std::vector<Word>& words) {
    std::string out = "indices,weight\n";
    for (const Word& w : words) {
        std::string idx;
        for (std::size_t i = 0; i < w.indices.size(); ++i) {
            if (i) idx += "-";
            idx += std::to_string(w.indices[i] + 1);
        }
        out += idx + "," + std::to_string(w.weight) + "\n";
    }
    return out;
}

std::string csv_of_probe(const ShrinkProbeResult& probe) {
    std::string out = "level,median_diam\n";
    for (std::size_t i = 0; i < probe.per_level.size(); ++i)
        out += std::to_string(i) + "," + format_double(probe.per_level[i]) + "\n";
    return out;
}

std::string render_pgm(const AtomicMeasure& m, const std::array<double, 4>& window,
                       int pixels) {
    if (pixels < 1) throw ConfigError("field 'pixels': must be >= 1");
    const double x0 = window[0], x1 = window[1], y0 = window[2], y1 = window[3];
    if (!(x1 > x0) || !(y1 > y0)) throw ConfigError("field 'window': empty window");
    std::vector<double> cells(static_cast<std::size_t>(pixels) * pixels, 0.0);
    for (const WeightedAtom& a : m.atoms()) {
        if (is_infinity(a.point)) continue;
        const Complex z = project_affine(a.point).value;
        const int px = static_cast<int>(std::floor((z.real() - x0) / (x1 - x0) * pixels));
        const int py = static_cast<int>(std::floor((y1 - z.imag()) / (y1 - y0) * pixels));
        if (px < 0 || px >= pixels || py < 0 || py >= pixels) continue;
        cells[static_cast<std::size_t>(py) * pixels + px] += a.weight;
    }
    double peak = 0.0;
    for (double c : cells) peak = std::max(peak, c);
    std::string img = "P5\n" + std::to_string(pixels) + " " + std::to_string(pixels) + "\n255\n";
    img.reserve(img.size() + cells.size());
    for (double c : cells) {
        int v = 0;
        if (peak > 0.0 && c > 0.0)
            v = static_cast<int>(std::lround(255.0 * std::log1p(c / peak * 255.0) /
                                             std::log1p(255.0)));
        img.push_back(static_cast<char>(v));
    }
    return img;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

namespace {

P1Point base_point(const RunConfig& cfg) {
    if (cfg.w0_set) return cfg.w0_infinity ? infinity_point() : affine_point(cfg.w0);
    if (!cfg.seed_set)
        throw ConfigError("field 'seed': required when 'w0' is not fixed");
    return random_point(cfg.seed);
}

std::uint64_t require_seed(const RunConfig& cfg) {
    if (!cfg.seed_set) throw ConfigError("field 'seed': required for sampling commands");
    return cfg.seed;
}

AtomicMeasure measure_by_kind(const RunConfig& cfg, const Chain& chain,
                              const std::string& kind) {
    if (kind == "repelling")
        return repelling_measure(chain, cfg.n, cfg.caps.words, cfg.caps.degree).measure;
    if (kind == "exact")
        return pullback_exact(chain, base_point(cfg), cfg.n, cfg.caps.atoms);
    if (kind == "sample")
        return pullback_sample(chain, base_point(cfg), cfg.n, cfg.count, require_seed(cfg),
                               cfg.workers);
    throw ConfigError("field 'compare'/'render_source': unknown kind '" + kind + "'");
}

JuliaSample build_sample(const RunConfig& cfg, const Chain& chain) {
    JuliaSample s;
    s.source = cfg.sample_use == "pullback" ? SampleSource::pullback
                                            : SampleSource::repelling;
    if (cfg.sample_use == "repelling" || cfg.sample_use == "both") {
        const RepellingResult rep =
            repelling_measure(chain, cfg.sample_word_len, cfg.caps.words, cfg.caps.degree);
        for (const RepellingPoint& rp : rep.points) s.points.push_back(rp.point);
    }
    if (cfg.sample_use == "pullback" || cfg.sample_use == "both") {
        const AtomicMeasure pb =
            pullback_exact(chain, base_point(cfg), cfg.sample_depth, cfg.caps.atoms);
        for (const WeightedAtom& a : pb.atoms()) s.points.push_back(a.point);
    }
    if (s.points.empty())
        throw ConfigError("field 'sample.use': produced an empty Julia sample");
    return s;
}

json json_of_dimension(const DimensionReport& r) {
    json j;
    j["M"] = r.M;
    j["max_deg"] = r.max_deg;
    j["bound_sample_M"] = r.bound;
    j["box_dim"] = r.box_dim;
    j["fit_quality"] = r.fit_quality;
    j["case_a"] = r.case_a;
    j["recoordinated"] = r.recoordinated;
    j["critical_warning"] = r.critical_warning;
    json table = json::array();
    for (const LambdaRow& row : r.lambda_table)
        table.push_back({{"k", row.k}, {"R_k", row.R_k}, {"lambda_k", row.lambda_k}});
    j["lambda_table"] = table;
    return j;
}

} // namespace

void run_command(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const auto t_start = std::chrono::steady_clock::now();
    fs::create_directories(cfg.out);
    const Chain chain = chain_from_config(cfg);
    auto out_path = [&cfg](const std::string& name) { return cfg.out + "/" + name; };
    json summary;

    if (cfg.command == "degrees") {
        const ChainDegrees d = chain_degrees(chain);
        summary = {{"d1", d.d1}, {"d0", d.d0}, {"key_condition", d.key_condition}};
        write_file(out_path("degrees.json"), summary.dump(2) + "\n");
    } else if (cfg.command == "compose") {
        const Chain sq = compose_chains(chain, chain, cfg.caps.degree);
        json gens = json::array();
        for (const ChainComponent& comp : sq.components) {
            json one;
            std::vector<Complex> num(comp.map.num.coeffs), den(comp.map.den.coeffs);
            for (Complex& v : num) v *= comp.map.num.scale;
            for (Complex& v : den) v *= comp.map.den.scale;
            one["num"] = coeffs_to_json(num);
            one["den"] = coeffs_to_json(den);
            one["mult"] = comp.mult;
            gens.push_back(one);
        }
        const ChainDegrees d = chain_degrees(sq);
        summary = {{"generators", gens},
                   {"d1", d.d1},
                   {"d0", d.d0},
                   {"key_condition", d.key_condition}};
        write_file(out_path("composed.json"), summary.dump(2) + "\n");
    } else if (cfg.command == "pullback") {
        AtomicMeasure m;
        if (cfg.mode == "exact")
            m = pullback_exact(chain, base_point(cfg), cfg.n, cfg.caps.atoms);
        else if (cfg.mode == "sample")
            m = pullback_sample(chain, base_point(cfg), cfg.n, cfg.count, require_seed(cfg),
                                cfg.workers);
        else
            throw ConfigError("field 'mode': expected 'exact' or 'sample'");
        write_file(out_path("measure.csv"), csv_of_measure(m));
        std::vector<double> bins(static_cast<std::size_t>(6 * cfg.grid * cfg.grid), 0.0);
        for (const WeightedAtom& a : m.atoms())
            bins[static_cast<std::size_t>(cube_sphere_bin(a.point, cfg.grid))] += a.weight;
        summary = {{"mass", m.mass()}, {"atom_count", m.size()}, {"bins", bins}};
        write_file(out_path("summary.json"), summary.dump(2) + "\n");
    } else if (cfg.command == "repelling") {
        const RepellingResult rep =
            repelling_measure(chain, cfg.n, cfg.caps.words, cfg.caps.degree);
        write_file(out_path("repelling.csv"), csv_of_repelling(rep.points));
        write_file(out_path("measure.csv"), csv_of_measure(rep.measure));
        long long repelling_weight = 0;
        for (const RepellingPoint& rp : rep.points) repelling_weight += rp.weight;
        summary = {{"mass", rep.measure.mass()},
                   {"atom_count", rep.measure.size()},
                   {"bezout_total", rep.bezout_total},
                   {"repelling_weight", repelling_weight},
                   {"exact", rep.exact}};
        write_file(out_path("summary.json"), summary.dump(2) + "\n");
    } else if (cfg.command == "compare") {
        const AtomicMeasure a = measure_by_kind(cfg, chain, cfg.compare_a);
        const AtomicMeasure b = measure_by_kind(cfg, chain, cfg.compare_b);
        summary = {{"tv", binned_tv(a, b, cfg.grid)},
                   {"grid", cfg.grid},
                   {"a", cfg.compare_a},
                   {"b", cfg.compare_b},
                   {"mass_a", a.mass()},
                   {"mass_b", b.mass()},
                   {"atoms_a", a.size()},
                   {"atoms_b", b.size()}};
        write_file(out_path("compare.json"), summary.dump(2) + "\n");
    } else if (cfg.command == "shrink-probe") {
        ShrinkProbeParams params;
        params.center = cfg.probe_center_set ? affine_point(cfg.probe_center)
                                             : base_point(cfg);
        params.radius = cfg.probe_radius;
        params.depth = cfg.probe_depth;
        params.samples = cfg.probe_samples;
        params.seed = require_seed(cfg);
        params.epsilon = cfg.probe_epsilon;
        const ShrinkProbeResult probe = branch_shrink_probe(chain, params, cfg.workers);
        write_file(out_path("probe.csv"), csv_of_probe(probe));
        summary = {{"median_diam", probe.median_diam},
                   {"quantile_diam", probe.quantile_diam},
                   {"discarded", probe.discarded},
                   {"per_level", probe.per_level}};
        write_file(out_path("probe.json"), summary.dump(2) + "\n");
    } else if (cfg.command == "branch-bound") {
        const BranchBoundReport r = branch_count_bound(chain, cfg.n, cfg.l);
        summary = {{"n", r.n}, {"l", r.l}, {"tau", r.tau}, {"fraction", r.fraction},
                   {"bound", r.bound}};
        write_file(out_path("branch_bound.json"), summary.dump(2) + "\n");
    } else if (cfg.command == "bound" || cfg.command == "dimension") {
        const JuliaSample raw = build_sample(cfg, chain);
        const RecoordinateResult rc = recoordinate(chain, raw);
        DimensionReport report;
        report.case_a = case_a_check(rc.chain, rc.sample);
        if (report.case_a) {
            report.box_dim = 2.0;
            report.bound = 2.0;
        } else {
            report = lower_bound(rc.chain, rc.sample, cfg.k_max);
            report.case_a = false;
        }
        report.recoordinated = rc.recoordinated;
        if (cfg.command == "dimension" && !report.case_a) {
            const BoxDimension box = box_dimension(
                rc.sample, cfg.scales.empty() ? default_box_scales() : cfg.scales);
            report.box_dim = box.dim;
            report.fit_quality = box.fit_quality;
        }
        write_file(out_path("lambda.csv"), csv_of_lambda(report.lambda_table));
        write_file(out_path(cfg.command == "bound" ? "bound.json" : "dimension.json"),
                   json_of_dimension(report).dump(2) + "\n");
        summary = json_of_dimension(report);
    } else if (cfg.command == "render") {
        const AtomicMeasure m = measure_by_kind(cfg, chain, cfg.render_source);
        write_file(out_path("density.pgm"), render_pgm(m, cfg.window, cfg.pixels));
    } else {
        throw ConfigError("field 'command': unknown command '" + cfg.command + "'");
    }

    const auto t_end = std::chrono::steady_clock::now();
    json manifest;
    manifest["tool"] = "corrdyn";
    manifest["version"] = "0.1.0";
    manifest["command"] = cfg.command;
    manifest["config"] = config_to_json(cfg);
    manifest["wall_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t_end - t_start).count();
    write_file(out_path("manifest.json"), manifest.dump(2) + "\n");
}

} // namespace corrdyn
