#pragma once

// JSON views of every report, and a deterministic writer: insertion-ordered keys,
// two-space indentation, doubles as %.17g, non-finite doubles as null.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmlab/density.hpp"
#include "bmlab/envelope.hpp"
#include "bmlab/function_lab.hpp"
#include "bmlab/gap_probe.hpp"
#include "bmlab/sequence.hpp"

namespace bmlab {

using Json = nlohmann::ordered_json;

namespace detail {

inline void write_json_string(std::ostream& out, const std::string& s) {
    out << Json(s).dump(-1, ' ', false, Json::error_handler_t::replace);
}

inline void write_json(std::ostream& out, const Json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out << ",\n";
            first = false;
            out << pad;
            write_json_string(out, it.key());
            out << ": ";
            write_json(out, it.value(), indent, depth + 1);
        }
        out << '\n' << close_pad << '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out << "[]";
            return;
        }
        // Arrays of scalars stay on one line.
        const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
        if (flat) {
            out << '[';
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k > 0) out << ", ";
                write_json(out, j[k], indent, depth + 1);
            }
            out << ']';
            return;
        }
        out << "[\n";
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (k > 0) out << ",\n";
            out << pad;
            write_json(out, j[k], indent, depth + 1);
        }
        out << '\n' << close_pad << ']';
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            out << "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
        return;
    }
    case Json::value_t::string: write_json_string(out, j.get<std::string>()); return;
    default: out << j.dump(); return;
    }
}

} // namespace detail

inline void write_json(std::ostream& out, const Json& j) {
    detail::write_json(out, j, 2, 0);
    out << '\n';
}

inline std::string json_text(const Json& j) {
    std::ostringstream ss;
    write_json(ss, j);
    return ss.str();
}

template <class T>
Json json_array(std::span<const T> values) {
    Json a = Json::array();
    for (const auto& v : values) a.push_back(v);
    return a;
}

template <class T>
Json json_array(const std::vector<T>& values) {
    return json_array(std::span<const T>(values));
}

inline Json to_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json to_json(const Window& w) { return Json{{"lo", w.lo}, {"hi", w.hi}}; }

inline Json to_json(const Interval& i) { return Json{{"left", i.left}, {"right", i.right}}; }

inline Json sequence_summary(const SeparatedSequence& seq) {
    Json j;
    j["points"] = seq.size();
    j["delta"] = seq.delta();
    j["window"] = to_json(seq.window());
    return j;
}

inline Json to_json(const IntervalFamily& f) {
    Json a = Json::array();
    for (std::size_t k = 0; k < f.size(); ++k)
        a.push_back(Json{{"left", f[k].left}, {"right", f[k].right}, {"flag", std::string(to_string(f.flags()[k]))}});
    return a;
}

inline Json to_json(const ShortnessThresholds& t) {
    return Json{{"convergence_tol", t.convergence_tol},
                {"min_r_squared", t.min_r_squared},
                {"min_radii", t.min_radii},
                {"cap_factor", t.cap_factor},
                {"min_persistence", t.min_persistence}};
}

inline Json to_json(const ShortnessReport& r) {
    Json j;
    j["radii"] = json_array(r.radii);
    j["partial_sums"] = json_array(r.partial_sums);
    j["edge_sums"] = json_array(r.edge_sums);
    j["fit"] = Json{{"model", std::string(to_string(r.fit.model))},
                    {"coefficient", r.fit.coefficient},
                    {"r_squared", r.fit.r_squared}};
    j["verdict"] = std::string(to_string(r.verdict));
    j["degenerate"] = r.degenerate;
    j["last_relative_increment"] = r.last_relative_increment;
    j["cap"] = r.cap;
    j["thresholds"] = to_json(r.thresholds);
    return j;
}

inline Json to_json(const DensityReport& r) {
    Json j;
    j["a_lower"] = r.a_lower;
    j["a_upper"] = r.a_upper;
    j["polya_class"] = std::string(to_string(r.polya_class));
    j["gap_lower"] = r.gap_lower;
    j["gap_upper"] = r.gap_upper;
    j["a_tolerance"] = r.a_tolerance;
    j["a_max"] = r.a_max;
    j["resolution"] = r.resolution;
    j["radii"] = json_array(r.radii);
    j["window"] = to_json(r.window);
    j["points"] = r.points;
    j["note"] = r.note;
    Json trials = Json::array();
    for (const auto& t : r.trials)
        trials.push_back(Json{{"a", t.a}, {"verdict", std::string(to_string(t.verdict))}, {"shortness", to_json(t.report)}});
    j["trials"] = std::move(trials);
    return j;
}

inline Json to_json(const WitnessFamily& w) {
    Json j;
    j["ladder_ratio"] = w.ladder_ratio;
    j["intervals"] = to_json(w.family);
    j["counts"] = json_array(w.counts);
    j["ratios"] = json_array(w.ratios);
    j["shortness"] = to_json(w.shortness);
    return j;
}

inline Json to_json(const WitnessSearchResult& r) {
    Json j;
    j["found"] = r.witness.has_value();
    j["ladders_tried"] = json_array(r.ladders_tried);
    j["candidates_examined"] = r.candidates_examined;
    j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
    return j;
}

inline Json to_json(const GapVerification& v) {
    return Json{{"interval", to_json(v.interval)},
                {"grid_step", v.grid_step},
                {"samples", v.samples},
                {"max_abs", v.max_abs},
                {"argmax", v.argmax}};
}

inline Json to_json(const CauchyBranch& b) {
    Json values = Json::array();
    for (const auto& v : b.values) values.push_back(to_json(v));
    return Json{{"values", std::move(values)},
                {"last_abs", b.last_abs},
                {"fit", Json{{"log_scale", b.fit.log_scale}, {"rate", b.fit.rate}, {"power", b.fit.power}}}};
}

inline Json to_json(const CauchyDecayReport& r) {
    Json j;
    j["x"] = r.x;
    j["y_values"] = json_array(r.y_values);
    j["tolerance"] = r.tolerance;
    j["verdict"] = std::string(to_string(r.verdict));
    j["plus"] = to_json(r.plus);
    j["minus"] = to_json(r.minus);
    return j;
}

inline Json to_json(const GapProbeReport& r) {
    Json j;
    j["gap_length"] = r.gap_length;
    j["sizes"] = json_array(r.sizes);
    j["min_eigenvalues"] = json_array(r.min_eigenvalues);
    j["log10_min_eigenvalues"] = json_array(r.log10_min_eigenvalues);
    j["max_eigenvalues"] = json_array(r.max_eigenvalues);
    j["digits"] = json_array(r.digits);
    j["minimizer_l1"] = json_array(r.minimizer_l1);
    j["minimizer_l2"] = json_array(r.minimizer_l2);
    j["classification"] = std::string(to_string(r.classification));
    j["fall_factor"] = r.fall_factor;
    j["band_factor"] = r.band_factor;
    j["log10_fall"] = r.log10_fall;
    j["monotone"] = r.monotone;
    return j;
}

inline Json to_json(const DiscreteMeasure& mu) {
    Json atoms = Json::array();
    for (const auto& a : mu.atoms())
        atoms.push_back(Json{{"point", a.point}, {"re", a.weight.real()}, {"im", a.weight.imag()}});
    return Json{{"size", mu.size()}, {"total_variation", mu.total_variation()}, {"atoms", std::move(atoms)}};
}

inline Json to_json(const TypeEstimate& t) {
    Json j;
    j["y_values"] = json_array(t.y_values);
    j["log_moduli"] = json_array(t.log_moduli);
    j["fitted_type"] = t.fitted_type;
    j["fitted_sqrt_coeff"] = t.fitted_sqrt_coeff;
    j["log_path"] = t.log_path;
    j["overflowed"] = t.overflowed;
    return j;
}

} // namespace bmlab
