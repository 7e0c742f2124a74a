#pragma once

#include "hyperlab/analysis.hpp"
#include "hyperlab/bending.hpp"
#include "hyperlab/groups.hpp"
#include "hyperlab/isometry.hpp"
#include "hyperlab/kernel_embedding.hpp"
#include "hyperlab/spectral.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyperlab {

/// Reports keep keys in insertion order so the rendered bytes depend only on the data.
using Json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to the same double ("nan", "inf", "-inf" otherwise).
std::string format_double(double x);

Json to_json(const Mat& m);
Json to_json(const Vec& v);
Json to_json(const Word& w);  ///< signed 1-based letters
Json to_json(const Tolerances& tol);
Json to_json(const HPoint& p);
Json to_json(const Isometry& g);
Json to_json(const Embedding& e);
Json to_json(const BlockDecomposition& d);
Json to_json(const GroupPresentation& p);
Json to_json(const SplittingData& s);
Json to_json(const RepresentationTable& t);
Json to_json(const QIEstimate& q);
Json to_json(const NonconjugacyReport& r, const std::vector<std::string>& generator_names);
Json to_json(const StabilityReport& r);
Json to_json(const RhoTDiagnostics& d);

/// One row of the tabular report format.
struct CsvRow {
    std::string experiment;
    std::string parameter;
    std::optional<double> K;
    std::optional<double> C;
    std::optional<double> count;
    std::optional<double> residual;
};

/// Header "experiment,parameter,K,C,count,residual"; absent values are empty cells.
std::string render_csv(const std::vector<CsvRow>& rows);

/// Scatter of (x, y) points with optional straight reference lines y = slope x + intercept.
struct Scatter {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::pair<double, double>> points;
    struct Line {
        std::string label;
        double slope;
        double intercept;
    };
    std::vector<Line> lines;
};

std::string render_svg(const Scatter& s);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);

struct Report {
    std::string command;
    Json config;
    Json results;
    std::vector<CsvRow> csv;
    std::optional<Scatter> scatter;
};

/// {"command", "config", "results", "content_hash"} where the hash covers the compact dump of
/// the first three members. Pretty-printed with two-space indent and a trailing newline.
std::string render_json(const Report& r);

/// Machine-readable error document {"error": {"kind", "message", "exit_code"}}.
std::string render_error(std::string_view kind, std::string_view message, int exit_code);

}  // namespace hyperlab
