#include "hyperlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace hyperlab {

namespace {

Json number(double x) {
    // JSON has no encoding for non-finite values; keep them visible as strings.
    if (!std::isfinite(x)) return format_double(x);
    return x;
}

Json numbers(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(number(x));
    return a;
}

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string csv_cell(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Json to_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
    return a;
}

Json to_json(const Word& w) { return Json(w.letters()); }

Json to_json(const Tolerances& tol) {
    return Json{{"point", tol.point},         {"renormalize", tol.renormalize}, {"iso", tol.iso},
                {"classify", tol.classify},   {"fit", tol.fit},                 {"embed", tol.embed},
                {"signature", tol.signature}, {"rep", tol.rep},                 {"angle", tol.angle}};
}

Json to_json(const HPoint& p) { return to_json(p.coords()); }

Json to_json(const Isometry& g) {
    return Json{{"signature", {{"N", g.dim_spatial()}, {"tol", g.tolerances().iso}}},
                {"matrix", to_json(g.matrix())},
                {"class", std::string(to_string(g.classification()))},
                {"translation_length", number(g.translation_length())}};
}

Json to_json(const Embedding& e) {
    return Json{{"kernel", {{"kind", std::string(to_string(e.kernel.kind))}, {"parameter", e.kernel.parameter}}},
                {"dim_spatial", e.dim_spatial()},
                {"points", e.size()},
                {"neg_eigenvalue", number(e.neg_eigenvalue)},
                {"kept_spectrum", numbers(e.kept_spectrum)},
                {"dropped_spectrum", numbers(e.dropped_spectrum)},
                {"null_spectrum", numbers(e.null_spectrum)},
                {"reconstruction_error", number(e.reconstruction_error)},
                {"max_snap", number(e.max_snap)},
                {"coords", to_json(e.coords)}};
}

Json to_json(const BlockDecomposition& d) {
    return Json{{"angles", numbers(d.angles)}, {"plus_dim", d.plus_dim}, {"minus_dim", d.minus_dim}, {"frame", to_json(d.frame)}};
}

Json to_json(const GroupPresentation& p) {
    Json relators = Json::array();
    for (const Word& r : p.relators) relators.push_back(to_json(r));
    return Json{{"kind", p.kind == PresentationKind::surface ? "surface" : "free"},
                {"genus", p.genus},
                {"generators", p.generators},
                {"relators", relators}};
}

Json to_json(const SplittingData& s) {
    const auto words = [](const std::vector<Word>& ws) {
        Json a = Json::array();
        for (const Word& w : ws) a.push_back(to_json(w));
        return a;
    };
    Json j{{"kind", s.kind == SplitKind::amalgam ? "amalgam" : "hnn"},
           {"a_generators", words(s.a_generators)},
           {"c_generator", to_json(s.c_generator)}};
    if (s.kind == SplitKind::amalgam) {
        j["b_generators"] = words(s.b_generators);
    } else {
        j["stable_letter"] = s.stable_letter;
        j["f1"] = to_json(s.boundary_identifications.first);
        j["f2"] = to_json(s.boundary_identifications.second);
    }
    return j;
}

Json to_json(const RepresentationTable& t) {
    Json images = Json::array();
    for (const auto& g : t.images()) images.push_back(to_json(g));
    Json params = Json::object();
    for (const auto& [k, v] : t.provenance().parameters) params[k] = number(v);
    return Json{{"presentation", to_json(t.presentation())},
                {"provenance", {{"kind", t.provenance().kind}, {"parameters", params}}},
                {"relator_residual", number(t.relator_residual())},
                {"images", images}};
}

Json to_json(const QIEstimate& q) {
    return Json{{"K", number(q.K)},
                {"C", number(q.C)},
                {"n_constraints", q.n_constraints},
                {"max_violation", number(q.max_violation)},
                {"delta_used", number(q.delta_used)}};
}

Json to_json(const NonconjugacyReport& r, const std::vector<std::string>& names) {
    Json j{{"verdict", std::string(r.verdict())}, {"max_difference", number(r.max_difference)}, {"threshold", number(r.threshold)}};
    if (r.witness) {
        j["witness"] = to_json(*r.witness);
        j["witness_name"] = r.witness->to_string(names);
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

Json to_json(const StabilityReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json trials = Json::array();
        for (const auto& t : row.trials)
            trials.push_back({{"K", number(t.K)}, {"C", number(t.C)}, {"relator_residual", number(t.relator_residual)}});
        rows.push_back({{"magnitude", number(row.magnitude)},
                        {"max_relative_K_change", number(row.max_relative_k_change)},
                        {"max_relative_C_change", number(row.max_relative_c_change)},
                        {"trials", trials}});
    }
    return Json{{"baseline", to_json(r.baseline)}, {"ball_radius", r.ball_radius}, {"c_budget", r.c_budget}, {"rows", rows}};
}

Json to_json(const RhoTDiagnostics& d) {
    return Json{{"orbit_points", d.orbit_points},
                {"dim_spatial", d.dim_spatial},
                {"neg_eigenvalue", number(d.neg_eigenvalue)},
                {"dropped_count", d.dropped_count},
                {"dropped_max", number(d.dropped_max)},
                {"null_count", d.null_count},
                {"polar_defects", numbers(d.polar_defects)},
                {"fit_residuals", numbers(d.fit_residuals)},
                {"base_lengths", numbers(d.base_lengths)},
                {"lengths", numbers(d.lengths)},
                {"length_ratios", numbers(d.length_ratios)},
                {"relator_residual", number(d.relator_residual)},
                {"relator_displacement", number(d.relator_displacement)},
                {"rescaled_distortion", number(d.rescaled_distortion)}};
}

std::string render_csv(const std::vector<CsvRow>& rows) {
    std::string out = "experiment,parameter,K,C,count,residual\n";
    const auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& r : rows)
        out += csv_cell(r.experiment) + "," + csv_cell(r.parameter) + "," + cell(r.K) + "," + cell(r.C) + "," +
               cell(r.count) + "," + cell(r.residual) + "\n";
    return out;
}

std::string render_svg(const Scatter& s) {
    constexpr double width = 640, height = 480, margin = 60;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!s.points.empty()) {
        xmin = xmax = s.points.front().first;
        ymin = ymax = s.points.front().second;
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    xmin = std::min(xmin, 0.0);
    ymin = std::min(ymin, 0.0);
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
    const auto py = [&](double y) { return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin); };
    const auto f = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape_xml(s.title) << "</text>\n";
    o << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << width / 2 << "\" y=\"" << height - 20 << "\" text-anchor=\"middle\">" << escape_xml(s.x_label) << "</text>\n";
    o << "<text x=\"20\" y=\"" << height / 2 << "\" transform=\"rotate(-90 20 " << height / 2
      << ")\" text-anchor=\"middle\">" << escape_xml(s.y_label) << "</text>\n";
    o << "<text x=\"" << margin << "\" y=\"" << height - margin + 16 << "\" font-size=\"10\">" << format_double(xmin) << "</text>\n";
    o << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 16 << "\" font-size=\"10\" text-anchor=\"end\">"
      << format_double(xmax) << "</text>\n";
    o << "<text x=\"" << margin - 4 << "\" y=\"" << margin << "\" font-size=\"10\" text-anchor=\"end\">" << format_double(ymax) << "</text>\n";
    for (const auto& [x, y] : s.points)
        o << "<circle cx=\"" << f(px(x)) << "\" cy=\"" << f(py(y)) << "\" r=\"2\" fill=\"steelblue\" fill-opacity=\"0.5\"/>\n";
    const char* colors[] = {"firebrick", "darkgreen", "darkorange", "purple"};
    std::size_t k = 0;
    for (const auto& line : s.lines) {
        const char* c = colors[k++ % 4];
        // Clip the line to the plotted y range by walking x across the frame.
        const double y0 = line.slope * xmin + line.intercept, y1 = line.slope * xmax + line.intercept;
        o << "<line x1=\"" << f(px(xmin)) << "\" y1=\"" << f(py(std::clamp(y0, ymin, ymax))) << "\" x2=\"" << f(px(xmax))
          << "\" y2=\"" << f(py(std::clamp(y1, ymin, ymax))) << "\" stroke=\"" << c << "\"/>\n";
        o << "<text x=\"" << width - margin - 4 << "\" y=\"" << margin + 16 * k << "\" font-size=\"11\" fill=\"" << c
          << "\" text-anchor=\"end\">" << escape_xml(line.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// nlohmann's own float printer round-trips but does not promise the shortest digits, so floats
// go through std::to_chars. A ".0" suffix keeps integral doubles recognisable as floats.
void write_json(const Json& j, std::string& out, int indent, int level) {
    const auto newline = [&](int depth) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * depth), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                newline(level + 1);
                out += Json(key).dump();
                out += indent < 0 ? ":" : ": ";
                write_json(value, out, indent, level + 1);
            }
            newline(level);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                newline(level + 1);
                write_json(j[i], out, indent, level + 1);
            }
            newline(level);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x)) {
                out += "null";
                return;
            }
            std::string text = format_double(x);
            if (text.find_first_of(".e") == std::string::npos) text += ".0";
            out += text;
            return;
        }
        default:
            out += j.dump();
    }
}

std::string dump(const Json& j, int indent) {
    std::string out;
    write_json(j, out, indent, 0);
    return out;
}

}  // namespace

std::string render_json(const Report& r) {
    Json doc{{"command", r.command}, {"config", r.config}, {"results", r.results}};
    doc["content_hash"] = content_hash(dump(doc, -1));
    return dump(doc, 2) + "\n";
}

std::string render_error(std::string_view kind, std::string_view message, int exit_code) {
    Json doc{{"error", {{"kind", std::string(kind)}, {"message", std::string(message)}, {"exit_code", exit_code}}}};
    return dump(doc, -1) + "\n";
}

}  // namespace hyperlab
