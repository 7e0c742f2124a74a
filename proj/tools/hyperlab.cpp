// Command-line front end for the hyperlab experiments.
//
// Every subcommand shares the numeric flags and the tolerance set; a config file given with
// --config holds one [section] per subcommand, and flags on the command line win over it.
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 acceptance failure.

#include "hyperlab/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

namespace {

using hyperlab::ErrorKind;
using hyperlab::Report;
using hyperlab::Settings;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitAcceptance = 4;

struct Output {
    std::string dir;
    std::string format = "json";
};

void add_common(CLI::App& sub, Settings& s, Output& out) {
    sub.add_option("--dim", s.dim, "Spatial dimension for block-embedded representations")->check(CLI::PositiveNumber);
    sub.add_option("--t", s.t, "Kernel exponent t in (0, 1]");
    sub.add_option("--lambda", s.lambda, "Tree kernel base, lambda > 1");
    sub.add_option("--genus", s.genus, "Surface genus")->check(CLI::Range(2, 64));
    sub.add_option("--ball-radius", s.ball_radius, "Word-length radius of the Cayley ball")->check(CLI::NonNegativeNumber);
    sub.add_option("--radius", s.radius, "Displacement radius R of the discreteness count");
    sub.add_option("--seed", s.seed, "Random seed");
    sub.add_option("--c-budget", s.c_budget, "Additive constant budget of the QI fit")->check(CLI::NonNegativeNumber);

    auto& t = s.tol;
    sub.add_option("--tol-point", t.point, "Hyperboloid membership tolerance");
    sub.add_option("--tol-renormalize", t.renormalize, "Largest defect a point constructor renormalizes");
    sub.add_option("--tol-iso", t.iso, "Isometry residual tolerance");
    sub.add_option("--tol-classify", t.classify, "Classification threshold");
    sub.add_option("--tol-fit", t.fit, "Relative Gram mismatch accepted when fitting isometries");
    sub.add_option("--tol-embed", t.embed, "Relative reconstruction error of an embedding");
    sub.add_option("--tol-signature", t.signature, "Relative eigenvalue cutoff of Gram matrices");
    sub.add_option("--tol-rep", t.rep, "Relator residual tolerance");
    sub.add_option("--tol-angle", t.angle, "Rotation angles closer than this are merged");

    sub.add_option("--out", out.dir, "Write <command>.<format> into this directory instead of stdout");
    sub.add_option("--format", out.format, "Output format")->check(CLI::IsMember({"json", "csv", "svg"}));
}

std::string render(const Report& r, const std::string& format) {
    if (format == "csv") return hyperlab::render_csv(r.csv);
    if (format == "svg") {
        if (!r.scatter) hyperlab::fail(ErrorKind::invalid_input, "subcommand '" + r.command + "' has no chart; use json or csv");
        return hyperlab::render_svg(*r.scatter);
    }
    return hyperlab::render_json(r);
}

void emit(const Report& r, const Output& out) {
    const std::string text = render(r, out.format);
    if (out.dir.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(out.dir, ec);
    const auto path = std::filesystem::path(out.dir) / (r.command + "." + out.format);
    std::ofstream file(path, std::ios::binary);
    if (!file || !file.write(text.data(), static_cast<std::streamsize>(text.size())))
        hyperlab::fail(ErrorKind::invalid_input, "cannot write " + path.string());
}

int report_error(std::string_view kind, std::string_view message, int code) {
    std::cerr << hyperlab::render_error(kind, message, code);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolic embeddings, kernel representations and bending experiments"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI file with one [section] per subcommand");
    app.get_config_ptr()->check(CLI::ExistingFile);

    Settings s;
    Output out;
    std::map<CLI::App*, std::function<Report()>> runners;

    auto sub = [&](const char* name, const char* help, std::function<Report()> run) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common(*cmd, s, out);
        runners[cmd] = std::move(run);
        return cmd;
    };

    auto* embed = sub("embed-tree", "Embed a tree with the cosh = lambda^d kernel and fit QI constants",
                      [&] { return hyperlab::run_embed_tree(s); });
    embed->add_option("--tree", s.tree, "path:N, star:M, regular:V:D or random:N:SEED");
    embed->add_option("--edges", s.edges_file, "Edge-list file (one 'u v' per line); overrides --tree")
        ->check(CLI::ExistingFile);
    embed->add_flag("--midpoints", s.midpoints, "Also embed edge midpoints");

    sub("fuchsian", "Genus-g surface group: generators, residuals, orbit QI fit",
        [&] { return hyperlab::run_fuchsian(s); });

    auto* rho = sub("rho-t", "Kernel representation of the surface group and its length ratios",
                    [&] { return hyperlab::run_rho_t(s); });
    rho->add_option("--mode", s.mode, "Generator construction")->check(CLI::IsMember({"galerkin", "suborbit"}));
    rho->add_option("--core-radius", s.core_radius, "Radius of the sampled core orbit");
    rho->add_option("--samples", s.samples, "Sampled words per length beyond the core");
    rho->add_option("--max-dim", s.max_dim, "Cap on the embedding dimension (-1: none)");

    auto* bend = sub("bend", "Bend a representation along a splitting and certify non-conjugacy",
                     [&] { return hyperlab::run_bend(s); });
    bend->add_option("--split", s.split, "Splitting")->check(CLI::IsMember({"amalgam", "hnn"}));
    bend->add_option("--z", s.z, "Centralizer element")->check(CLI::IsMember({"random", "identity"}));
    bend->add_option("--angles", s.angles, "Explicit rotation angle per angle class")->delimiter(',');
    bend->add_option("--bend-scale", s.bend_scale, "Scale of the random rotation parameters");
    bend->add_option("--words", s.words, "Mixed words in the certificate")->check(CLI::PositiveNumber);
    bend->add_option("--core-radius", s.core_radius, "Core radius when the base is a kernel representation");
    bend->add_option("--samples", s.samples, "Samples per length when the base is a kernel representation");

    auto* cent = sub("centralizer-dim", "Centralizer dimension of random orthogonal matrices vs the closed form",
                     [&] { return hyperlab::run_centralizer_dim(s); });
    cent->add_option("--count", s.count, "Number of random matrices")->check(CLI::PositiveNumber);
    cent->add_option("--max-size", s.max_size, "Largest matrix size")->check(CLI::PositiveNumber);

    auto* disc = sub("discreteness", "Count orbit points within R across two ball radii",
                     [&] { return hyperlab::run_discreteness(s); });

    auto* stab = sub("stability", "QI constants under random elliptic perturbations",
                     [&] { return hyperlab::run_stability(s); });
    stab->add_option("--trials", s.trials, "Trials per magnitude")->check(CLI::PositiveNumber);
    stab->add_option("--magnitudes", s.magnitudes, "Perturbation magnitudes")->delimiter(',');

    bool acceptance_failed = false;
    auto* verify = sub("verify", "Run the full acceptance suite", [&] {
        auto results = hyperlab::run_acceptance(s.seed, [](const hyperlab::CriterionResult& r) {
            std::cerr << hyperlab::summary_line(r) << '\n';
        });
        for (const auto& r : results) acceptance_failed = acceptance_failed || !r.passed;
        return hyperlab::verify_report(s, results);
    });
    (void)verify;

    // Defaults that differ per subcommand. Bending works on the Fuchsian table unless --t is given.
    bend->preparse_callback([&](std::size_t) { s.t = 1.0; });
    // Relator words have length 4g, so the count only settles once the ball reaches past them.
    disc->preparse_callback([&](std::size_t) { s.ball_radius = 9; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("config", e.what(), kExitConfig);
    }

    try {
        for (auto& [cmd, run] : runners) {
            if (!cmd->parsed()) continue;
            emit(run(), out);
            return acceptance_failed ? kExitAcceptance : 0;
        }
    } catch (const hyperlab::Error& e) {
        switch (e.kind()) {
            case ErrorKind::invalid_input: return report_error("config", e.what(), kExitConfig);
            case ErrorKind::numerical: return report_error("numerical", e.what(), kExitNumerical);
            case ErrorKind::acceptance: return report_error("acceptance", e.what(), kExitAcceptance);
        }
    } catch (const std::exception& e) {
        return report_error("numerical", e.what(), kExitNumerical);
    }
    return 0;
}
