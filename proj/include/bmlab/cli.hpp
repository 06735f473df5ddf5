#pragma once

// bm-lab command line: argument model, sequence sources, and subcommand dispatch.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "bmlab/density.hpp"
#include "bmlab/envelope.hpp"
#include "bmlab/error.hpp"
#include "bmlab/function_lab.hpp"
#include "bmlab/gap_probe.hpp"
#include "bmlab/report_json.hpp"
#include "bmlab/sequence.hpp"

namespace bmlab::cli {

namespace exit_code {
inline constexpr int definite = 0;
inline constexpr int error = 1;
inline constexpr int inconclusive = 2;
inline constexpr int usage = 64;
inline constexpr int data = 65;
} // namespace exit_code

enum class Subcommand { Density, Classify, Bm, Short, GapProbe, GapMeasure, Cauchy, Ftype };

inline constexpr std::string_view subcommand_names[] = {"density",   "classify",    "bm",     "short",
                                                        "gap-probe", "gap-measure", "cauchy", "ftype"};

constexpr std::string_view to_string(Subcommand s) noexcept {
    return subcommand_names[static_cast<std::size_t>(s)];
}

/// Parsed command line. Unset optionals fall back to per-subcommand defaults.
struct RunConfig {
    Subcommand subcommand{Subcommand::Density};
    std::optional<std::string> seq;   ///< generator spec (or file:<path>)
    std::optional<std::string> input; ///< sequence, interval-family or measure file
    std::vector<double> radii;
    std::optional<double> tol;
    std::vector<double> a;
    std::optional<double> gap;
    std::vector<std::size_t> sizes;
    std::optional<double> grid_step;
    std::optional<std::string> out;
    std::optional<std::string> csv_out;
    bool json{true};
    std::optional<std::string> smoothness; ///< "inf" or a nonnegative integer
    std::optional<std::string> function;   ///< ftype: "qcos" or "cos"
    std::vector<double> y;
    std::optional<double> y_max;
    std::optional<double> interval_lo;
    std::optional<double> interval_hi;

    bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Sequence sources

enum class BuiltinGenerator { Lattice, Squares, LogPerturbed, QcosZeros };

struct GeneratorSource {
    BuiltinGenerator kind{BuiltinGenerator::Lattice};
    double step{1.0};
    bool operator==(const GeneratorSource&) const = default;
};

struct FileSource {
    std::string path;
    bool operator==(const FileSource&) const = default;
};

using SourceSpec = std::variant<GeneratorSource, FileSource>;

/// `lattice:<d>` | `squares` | `logperturbed` | `qcos-zeros` | `file:<path>`.
inline SourceSpec parse_generator(std::string_view spec) {
    if (spec == "squares") return GeneratorSource{BuiltinGenerator::Squares, 1.0};
    if (spec == "logperturbed") return GeneratorSource{BuiltinGenerator::LogPerturbed, 1.0};
    if (spec == "qcos-zeros") return GeneratorSource{BuiltinGenerator::QcosZeros, 1.0};
    if (spec.starts_with("file:")) {
        const std::string path(spec.substr(5));
        require(!path.empty(), ErrorKind::UnknownGenerator, "file: needs a path");
        return FileSource{path};
    }
    if (spec.starts_with("lattice:")) {
        const std::string num(spec.substr(8));
        double d = 0.0;
        std::size_t used = 0;
        try {
            d = std::stod(num, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != num.size() || !std::isfinite(d) || !(d > 0.0))
            fail(ErrorKind::UnknownGenerator, "lattice step must be a positive number: '" + std::string(spec) + "'");
        return GeneratorSource{BuiltinGenerator::Lattice, d};
    }
    fail(ErrorKind::UnknownGenerator, "unknown sequence spec '" + std::string(spec) + "'");
}

/// Points of a built-in family in [-radius, radius], with that interval as window.
inline SeparatedSequence generate_source(const GeneratorSource& g, double radius) {
    require(radius > 0.0, ErrorKind::InvalidArgument, "radius must be positive");
    const Window w{-radius, radius};
    if (g.kind == BuiltinGenerator::QcosZeros) return zero_set_qcos(w);
    GeneratorKind kind = GeneratorKind::Lattice;
    if (g.kind == BuiltinGenerator::Squares) kind = GeneratorKind::Squares;
    if (g.kind == BuiltinGenerator::LogPerturbed) kind = GeneratorKind::LogPerturbed;
    const SeparatedSequence seq = generate(spec_within_radius(kind, radius, g.step));
    return load_sequence({seq.points().begin(), seq.points().end()}, w);
}

// ---------------------------------------------------------------------------
// Formatting and parsing of RunConfig

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Canonical argument vector; parse_args(to_args(c)) == c.
inline std::vector<std::string> to_args(const RunConfig& c) {
    std::vector<std::string> args{std::string(to_string(c.subcommand))};
    auto str = [&](const char* flag, const std::optional<std::string>& v) {
        if (v) args.insert(args.end(), {flag, *v});
    };
    auto num = [&](const char* flag, const std::optional<double>& v) {
        if (v) args.insert(args.end(), {flag, format_number(*v)});
    };
    auto nums = [&](const char* flag, const std::vector<double>& v) {
        for (double x : v) args.insert(args.end(), {flag, format_number(x)});
    };
    str("--seq", c.seq);
    str("--input", c.input);
    nums("--radius", c.radii);
    num("--tol", c.tol);
    nums("--a", c.a);
    num("--gap", c.gap);
    for (std::size_t n : c.sizes) args.insert(args.end(), {"--n", std::to_string(n)});
    num("--grid-step", c.grid_step);
    str("--out", c.out);
    str("--csv-out", c.csv_out);
    if (!c.json) args.emplace_back("--no-json");
    str("--smoothness", c.smoothness);
    str("--function", c.function);
    nums("--y", c.y);
    num("--y-max", c.y_max);
    num("--interval-lo", c.interval_lo);
    num("--interval-hi", c.interval_hi);
    return args;
}

inline void build_app(CLI::App& app, RunConfig& c) {
    app.fallthrough();
    app.require_subcommand(1);
    auto rep = [](CLI::Option* o) {
        return o->expected(1)->allow_extra_args(false)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    };
    app.add_option("--seq", c.seq, "lattice:<d> | squares | logperturbed | qcos-zeros | file:<path>");
    app.add_option("--input", c.input, "sequence file, interval-family CSV (short) or measure CSV (cauchy)");
    rep(app.add_option("--radius", c.radii, "window radius; repeat for an explicit ladder"));
    app.add_option("--tol", c.tol, "decision tolerance");
    rep(app.add_option("--a", c.a, "slope a (bm) or abscissa x (cauchy); repeatable"));
    app.add_option("--gap", c.gap, "gap length a");
    rep(app.add_option("--n", c.sizes, "window size(s) N; repeatable"));
    app.add_option("--grid-step", c.grid_step, "grid step for gap verification");
    app.add_option("--out", c.out, "write JSON here instead of stdout");
    app.add_option("--csv-out", c.csv_out, "write CSV curves here");
    app.add_flag("--json,!--no-json", c.json, "JSON output (default)");
    app.add_option("--smoothness", c.smoothness, "bump smoothness: inf or k");
    app.add_option("--function", c.function, "ftype function: qcos | cos");
    rep(app.add_option("--y", c.y, "explicit heights; repeatable"));
    app.add_option("--y-max", c.y_max, "largest height for ftype");
    app.add_option("--interval-lo", c.interval_lo, "left end of the verification interval");
    app.add_option("--interval-hi", c.interval_hi, "right end of the verification interval");

    const char* help[] = {"bracket the interior density D_* and classify Polya / not Polya",
                          "density plus a null-ratio witness family",
                          "dump BM(a x - n(x)) intervals for one slope --a",
                          "classify an interval family file (--input) as short or long",
                          "Gram-matrix smallest eigenvalues for gap length --gap",
                          "build and verify a gap measure on Z",
                          "Cauchy-transform decay test for a gap measure",
                          "exponential type estimate along the imaginary axis"};
    for (std::size_t k = 0; k < std::size(subcommand_names); ++k) {
        auto* sub = app.add_subcommand(std::string(subcommand_names[k]), help[k]);
        sub->callback([&c, k] { c.subcommand = static_cast<Subcommand>(k); });
    }
}

inline std::string usage_text() {
    RunConfig c;
    CLI::App app{"bm-lab: Beurling-Malliavin density and spectral-gap laboratory", "bm-lab"};
    build_app(app, c);
    return app.help();
}

/// Checks cross-flag constraints; throws Usage.
inline void validate(const RunConfig& c) {
    auto usage = [](const std::string& m) { fail(ErrorKind::Usage, m); };
    auto positive = [&](const std::optional<double>& v, const char* name) {
        if (v && !(*v > 0.0 && std::isfinite(*v))) usage(std::string(name) + " must be positive");
    };
    positive(c.tol, "--tol");
    positive(c.grid_step, "--grid-step");
    positive(c.y_max, "--y-max");
    for (double r : c.radii)
        if (!(r > 0.0 && std::isfinite(r))) usage("--radius must be positive");
    for (double y : c.y)
        if (!(y > 0.0 && std::isfinite(y))) usage("--y must be positive");
    if (c.seq && c.input) usage("--seq and --input are mutually exclusive");
    if (c.smoothness && *c.smoothness != "inf") {
        const std::string& s = *c.smoothness;
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
            usage("--smoothness must be inf or a nonnegative integer");
    }
    switch (c.subcommand) {
    case Subcommand::Density:
    case Subcommand::Classify:
    case Subcommand::GapProbe:
    case Subcommand::Bm:
        if (!c.seq && !c.input) usage("a sequence source (--seq or --input) is required");
        break;
    case Subcommand::Short:
        if (!c.input) usage("short needs --input <interval-family.csv>");
        if (c.seq) usage("short reads an interval family, not a sequence");
        break;
    case Subcommand::GapMeasure:
        if (!c.gap) usage("gap-measure needs --gap");
        if (c.sizes.size() > 1) usage("gap-measure takes a single --n");
        break;
    case Subcommand::Cauchy:
        if (!c.gap && !c.input) usage("cauchy needs --gap or --input <measure.csv>");
        if (c.input && c.gap) usage("cauchy takes either --gap or --input");
        if (!c.gap && c.a.empty()) usage("cauchy with --input needs --a abscissae");
        if (c.sizes.size() > 1) usage("cauchy takes a single --n");
        break;
    case Subcommand::Ftype:
        if (c.function && *c.function != "qcos" && *c.function != "cos")
            usage("--function must be qcos or cos");
        break;
    }
    if (c.subcommand == Subcommand::Bm && c.a.size() != 1) usage("bm needs exactly one --a");
    if (c.subcommand == Subcommand::GapProbe && !c.gap) usage("gap-probe needs --gap");
    if (c.interval_lo.has_value() != c.interval_hi.has_value())
        usage("--interval-lo and --interval-hi go together");
    if (c.interval_lo && !(*c.interval_lo <= *c.interval_hi)) usage("verification interval needs lo <= hi");
}

/// Parses arguments (without the program name). Throws Usage on malformed input.
inline RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig c;
    CLI::App app{"bm-lab: Beurling-Malliavin density and spectral-gap laboratory", "bm-lab"};
    build_app(app, c);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw;
    } catch (const CLI::ParseError& e) {
        fail(ErrorKind::Usage, e.what());
    }
    validate(c);
    return c;
}

// ---------------------------------------------------------------------------
// Execution

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::UnknownGenerator:
    case ErrorKind::BadGap:
    case ErrorKind::SizeGuard: return exit_code::usage;
    case ErrorKind::DuplicatePoint:
    case ErrorKind::NotSeparated:
    case ErrorKind::EmptyRange:
    case ErrorKind::SinglePoint:
    case ErrorKind::OutOfWindow:
    case ErrorKind::EmptyWindow:
    case ErrorKind::WindowTooSmall:
    case ErrorKind::Io: return exit_code::data;
    case ErrorKind::InvalidArgument:
    case ErrorKind::NumericalBreakdown: return exit_code::error;
    }
    return exit_code::error;
}

namespace detail {

inline constexpr double default_radius = 1e4;

struct Outcome {
    Json report;
    int code{exit_code::definite};
    std::string csv;
};

inline Json parameters_json(const RunConfig& c) {
    Json p;
    p["subcommand"] = std::string(to_string(c.subcommand));
    p["seq"] = c.seq ? Json(*c.seq) : Json(nullptr);
    p["input"] = c.input ? Json(*c.input) : Json(nullptr);
    p["radius"] = json_array(c.radii);
    p["tol"] = c.tol ? Json(*c.tol) : Json(nullptr);
    p["a"] = json_array(c.a);
    p["gap"] = c.gap ? Json(*c.gap) : Json(nullptr);
    p["n"] = json_array(c.sizes);
    p["grid_step"] = c.grid_step ? Json(*c.grid_step) : Json(nullptr);
    p["smoothness"] = c.smoothness ? Json(*c.smoothness) : Json(nullptr);
    p["function"] = c.function ? Json(*c.function) : Json(nullptr);
    p["y"] = json_array(c.y);
    p["y_max"] = c.y_max ? Json(*c.y_max) : Json(nullptr);
    p["interval_lo"] = c.interval_lo ? Json(*c.interval_lo) : Json(nullptr);
    p["interval_hi"] = c.interval_hi ? Json(*c.interval_hi) : Json(nullptr);
    p["argv"] = json_array(to_args(c));
    return p;
}

inline SourceSpec source_of(const RunConfig& c) {
    if (c.input) return FileSource{*c.input};
    return parse_generator(*c.seq);
}

inline std::optional<double> max_radius(const RunConfig& c) {
    if (c.radii.empty()) return std::nullopt;
    return *std::max_element(c.radii.begin(), c.radii.end());
}

inline SeparatedSequence load_source(const SourceSpec& src, double generator_radius) {
    if (const auto* g = std::get_if<GeneratorSource>(&src)) return generate_source(*g, generator_radius);
    return load_sequence(read_sequence_file(std::get<FileSource>(src).path));
}

inline Json source_json(const SourceSpec& src) {
    if (const auto* g = std::get_if<GeneratorSource>(&src)) {
        const char* names[] = {"lattice", "squares", "logperturbed", "qcos-zeros"};
        return Json{{"generator", names[static_cast<int>(g->kind)]}, {"step", g->step}};
    }
    return Json{{"file", std::get<FileSource>(src).path}};
}

/// Explicit ladder when at least four radii are given, otherwise the default ladder
/// capped at the largest given radius.
inline std::vector<double> density_radii(const RunConfig& c, const SeparatedSequence& seq) {
    if (c.radii.size() >= 4) {
        std::vector<double> r = c.radii;
        std::sort(r.begin(), r.end());
        return r;
    }
    return default_density_radii(seq, max_radius(c));
}

inline Smoothness smoothness_of(const RunConfig& c) {
    if (!c.smoothness || *c.smoothness == "inf") return Smoothness::c_infinity();
    return Smoothness::c(std::stoi(*c.smoothness));
}

inline std::string density_csv(const DensityReport& r) {
    std::ostringstream s;
    s << "a,verdict,radius,partial_sum,edge_sum\n";
    for (const auto& t : r.trials)
        for (std::size_t k = 0; k < t.report.radii.size(); ++k)
            s << format_real(t.a) << ',' << to_string(t.verdict) << ',' << format_real(t.report.radii[k]) << ','
              << format_real(t.report.partial_sums[k]) << ',' << format_real(t.report.edge_sums[k]) << '\n';
    return s.str();
}

inline int polya_exit(PolyaClass p) {
    return p == PolyaClass::Inconclusive ? exit_code::inconclusive : exit_code::definite;
}

inline Outcome run_density(const RunConfig& c, bool with_witness) {
    const SourceSpec src = source_of(c);
    const SeparatedSequence seq = load_source(src, max_radius(c).value_or(default_radius));
    DensityOptions opt;
    opt.a_tolerance = c.tol.value_or(0.05);
    opt.radii = density_radii(c, seq);
    const DensityReport rep = interior_density(seq, opt);

    Outcome o;
    o.report["source"] = source_json(src);
    o.report["sequence"] = sequence_summary(seq);
    o.report["density"] = to_json(rep);
    if (with_witness) {
        const auto cap = default_ratio_cap();
        const WitnessSearchResult w = null_ratio_witness(seq, cap);
        o.report["ratio_cap"] = json_array(cap);
        o.report["witness_search"] = to_json(w);
        o.report["classifiers_agree"] = w.witness.has_value() == (rep.polya_class != PolyaClass::Polya);
    }
    o.report["verdict"] = std::string(to_string(rep.polya_class));
    o.code = polya_exit(rep.polya_class);
    o.csv = density_csv(rep);
    return o;
}

inline Outcome run_bm(const RunConfig& c) {
    const SourceSpec src = source_of(c);
    const double radius = max_radius(c).value_or(default_radius);
    const SeparatedSequence seq = load_source(src, radius);
    const double r = std::min(radius, seq.window().symmetric_radius());
    require(r > 0.0, ErrorKind::WindowTooSmall, "window does not contain the origin");
    const double a = c.a.front();
    const IntervalFamily fam = bm_family(counting_function(seq).affine_minus(a), {-r, r});
    Outcome o;
    o.report["source"] = source_json(src);
    o.report["sequence"] = sequence_summary(seq);
    o.report["a"] = a;
    o.report["window"] = to_json(Window{-r, r});
    o.report["components"] = fam.size();
    o.report["partial_sum"] = shortness_partial_sum(fam, r);
    o.report["edge_sum"] = edge_partial_sum(fam, r);
    o.report["intervals"] = to_json(fam);
    o.report["verdict"] = "Computed";
    std::ostringstream s;
    write_family_csv(s, fam);
    o.csv = s.str();
    return o;
}

inline Outcome run_short(const RunConfig& c) {
    const IntervalFamily fam = read_family_csv_file(*c.input);
    std::vector<double> radii = c.radii;
    if (radii.size() >= 4) {
        std::sort(radii.begin(), radii.end());
    } else {
        double extent = 1.0;
        for (const auto& i : fam.intervals()) extent = std::max({extent, std::abs(i.left), std::abs(i.right)});
        if (!c.radii.empty()) extent = *max_radius(c);
        radii = radius_ladder(extent, 8);
    }
    const ShortnessReport rep = classify_family(fam, radii);
    Outcome o;
    o.report["intervals"] = fam.size();
    o.report["shortness"] = to_json(rep);
    o.report["verdict"] = std::string(to_string(rep.verdict));
    o.code = rep.verdict == Shortness::Inconclusive ? exit_code::inconclusive : exit_code::definite;
    std::ostringstream s;
    s << "radius,partial_sum,edge_sum\n";
    for (std::size_t k = 0; k < rep.radii.size(); ++k)
        s << format_real(rep.radii[k]) << ',' << format_real(rep.partial_sums[k]) << ','
          << format_real(rep.edge_sums[k]) << '\n';
    o.csv = s.str();
    return o;
}

inline Outcome run_gap_probe(const RunConfig& c) {
    std::vector<std::size_t> sizes = c.sizes;
    if (sizes.empty()) sizes = {21, 51, 101, 201};
    std::sort(sizes.begin(), sizes.end());
    const SourceSpec src = source_of(c);
    SeparatedSequence seq;
    if (const auto* g = std::get_if<GeneratorSource>(&src); g && c.radii.empty()) {
        // Smallest doubling radius that holds the largest window.
        double r = 16.0;
        for (seq = generate_source(*g, r); seq.size() < sizes.back(); seq = generate_source(*g, r)) r *= 2.0;
    } else {
        seq = load_source(src, max_radius(c).value_or(default_radius));
    }
    const GapProbeReport rep = min_gap_residual(seq, *c.gap, sizes);
    Outcome o;
    o.report["source"] = source_json(src);
    o.report["sequence"] = sequence_summary(seq);
    o.report["probe"] = to_json(rep);
    o.report["verdict"] = std::string(to_string(rep.classification));
    o.code = rep.classification == GapProbeClass::Inconclusive ? exit_code::inconclusive : exit_code::definite;
    std::ostringstream s;
    s << "n,lambda_min,log10_lambda_min,digits\n";
    for (std::size_t k = 0; k < rep.sizes.size(); ++k)
        s << rep.sizes[k] << ',' << format_real(rep.min_eigenvalues[k]) << ','
          << format_real(rep.log10_min_eigenvalues[k]) << ',' << rep.digits[k] << '\n';
    o.csv = s.str();
    return o;
}

inline Outcome run_gap_measure(const RunConfig& c) {
    const double a = *c.gap;
    const auto n = static_cast<std::int64_t>(c.sizes.empty() ? 256 : c.sizes.front());
    const DiscreteMeasure mu = lattice_gap_measure(a, n, smoothness_of(c));
    const Interval iv = c.interval_lo ? Interval{*c.interval_lo, *c.interval_hi} : Interval{0.0, a};
    const double tol = c.tol.value_or(1e-6);
    const GapVerification v = verify_gap(mu, iv, c.grid_step.value_or(1e-3));
    Outcome o;
    o.report["gap"] = a;
    o.report["n"] = n;
    o.report["smoothness"] = to_string(smoothness_of(c));
    o.report["support"] = to_json(Interval{a + gap_margin(a), 2.0 * std::numbers::pi - gap_margin(a)});
    o.report["tolerance"] = tol;
    o.report["verification"] = to_json(v);
    o.report["verdict"] = v.max_abs <= tol ? "GapVerified" : "ResidualAboveTolerance";
    o.report["measure"] = to_json(mu);
    std::ostringstream s;
    write_measure_csv(s, mu);
    o.csv = s.str();
    return o;
}

inline Outcome run_cauchy(const RunConfig& c) {
    DiscreteMeasure mu;
    std::vector<double> xs = c.a;
    Outcome o;
    if (c.gap) {
        const auto n = static_cast<std::int64_t>(c.sizes.empty() ? 256 : c.sizes.front());
        mu = centered_lattice_gap_measure(*c.gap, n, smoothness_of(c));
        const double half = *c.gap / 2.0;
        if (xs.empty()) xs = {half / 2.0, -half / 2.0, 2.0 * half, -2.0 * half};
        o.report["gap"] = *c.gap;
        o.report["vanishing_half_width"] = half;
        o.report["n"] = n;
        o.report["smoothness"] = to_string(smoothness_of(c));
    } else {
        mu = read_measure_csv_file(*c.input);
        o.report["measure_file"] = *c.input;
    }
    const std::vector<double> ys = c.y.empty() ? default_cauchy_heights() : c.y;
    const double tol = c.tol.value_or(1e-6);
    Json reports = Json::array();
    std::ostringstream s;
    s << "x,y,branch,re,im,abs\n";
    for (double x : xs) {
        const CauchyDecayReport r = cauchy_decay(mu, x, ys, tol);
        reports.push_back(to_json(r));
        for (std::size_t k = 0; k < ys.size(); ++k) {
            for (const auto* b : {&r.plus, &r.minus}) {
                const auto v = b->values[k];
                s << format_real(x) << ',' << format_real(ys[k]) << ',' << (b == &r.plus ? "+" : "-") << ','
                  << format_real(v.real()) << ',' << format_real(v.imag()) << ',' << format_real(std::abs(v)) << '\n';
            }
        }
    }
    o.report["total_variation"] = mu.total_variation();
    o.report["reports"] = std::move(reports);
    o.report["verdict"] = "Computed";
    o.csv = s.str();
    return o;
}

inline Outcome run_ftype(const RunConfig& c) {
    const std::string fn = c.function.value_or("qcos");
    const double scale = c.a.empty() ? 1.0 : c.a.front();
    std::vector<double> ys = c.y;
    if (ys.empty()) {
        const double y_max = c.y_max.value_or(fn == "qcos" ? 1e6 : 50.0 / scale);
        ys = log_spaced(y_max / 1e3, y_max, 32);
    }
    const TypeEstimate est = fn == "qcos" ? type_estimate(Qcos{}, ys) : type_estimate(ScaledCos{scale}, ys);
    Outcome o;
    o.report["function"] = fn;
    if (fn == "cos") o.report["scale"] = scale;
    o.report["estimate"] = to_json(est);
    o.report["verdict"] = "Computed";
    std::ostringstream s;
    s << "y,log_modulus\n";
    for (std::size_t k = 0; k < est.y_values.size(); ++k)
        s << format_real(est.y_values[k]) << ',' << format_real(est.log_moduli[k]) << '\n';
    o.csv = s.str();
    return o;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::Io, "cannot write '" + path + "'");
    f << text;
    require(static_cast<bool>(f), ErrorKind::Io, "write to '" + path + "' failed");
}

} // namespace detail

/// Executes a parsed configuration. Errors propagate as bmlab::Error.
inline int execute(const RunConfig& c, std::ostream& out) {
    detail::Outcome o;
    switch (c.subcommand) {
    case Subcommand::Density: o = detail::run_density(c, false); break;
    case Subcommand::Classify: o = detail::run_density(c, true); break;
    case Subcommand::Bm: o = detail::run_bm(c); break;
    case Subcommand::Short: o = detail::run_short(c); break;
    case Subcommand::GapProbe: o = detail::run_gap_probe(c); break;
    case Subcommand::GapMeasure: o = detail::run_gap_measure(c); break;
    case Subcommand::Cauchy: o = detail::run_cauchy(c); break;
    case Subcommand::Ftype: o = detail::run_ftype(c); break;
    }
    Json doc;
    doc["command"] = std::string(to_string(c.subcommand));
    doc["parameters"] = detail::parameters_json(c);
    for (auto it = o.report.begin(); it != o.report.end(); ++it) doc[it.key()] = it.value();
    doc["exit_code"] = o.code;

    const std::string text = json_text(doc);
    if (c.out)
        detail::write_text(*c.out, text);
    else
        out << text;
    if (c.csv_out) detail::write_text(*c.csv_out, o.csv);
    return o.code;
}

/// Full front end: parse, execute, map errors to exit codes.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig c;
    try {
        c = parse_args(args);
    } catch (const CLI::CallForHelp&) {
        out << usage_text();
        return exit_code::definite;
    } catch (const Error& e) {
        err << "bm-lab: " << e.what() << "\n\n" << usage_text();
        return exit_code::usage;
    }
    try {
        return execute(c, out);
    } catch (const Error& e) {
        err << "bm-lab: " << e.what() << '\n';
        const int code = exit_code_for(e.kind());
        if (code == exit_code::usage) err << '\n' << usage_text();
        return code;
    } catch (const std::exception& e) {
        err << "bm-lab: " << e.what() << '\n';
        return exit_code::error;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return run(args, out, err);
}

} // namespace bmlab::cli
