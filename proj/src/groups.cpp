#include "hyperlab/groups.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

namespace hyperlab {

Word::Word(std::vector<int> letters) : letters_(reduce(letters).letters_) {}

Word reduce(const std::vector<int>& letters) {
    Word w;
    auto& out = w.letters_;
    out.reserve(letters.size());
    for (int l : letters) {
        if (l == 0) fail(ErrorKind::invalid_input, "word letters must be nonzero");
        if (!out.empty() && out.back() == -l)
            out.pop_back();
        else
            out.push_back(l);
    }
    return w;
}

int Word::max_generator() const {
    int m = 0;
    for (int l : letters_) m = std::max(m, std::abs(l));
    return m;
}

Word Word::inverse() const {
    std::vector<int> inv(letters_.rbegin(), letters_.rend());
    for (int& l : inv) l = -l;
    Word w;
    w.letters_ = std::move(inv);
    return w;
}

Word Word::operator*(const Word& rhs) const {
    std::vector<int> all = letters_;
    all.insert(all.end(), rhs.letters_.begin(), rhs.letters_.end());
    return reduce(all);
}

Word Word::power(int n) const {
    const Word base = n >= 0 ? *this : inverse();
    Word out;
    for (int k = 0; k < std::abs(n); ++k) out = out * base;
    return out;
}

std::string Word::to_string(const std::vector<std::string>& names) const {
    if (letters_.empty()) return "e";
    std::ostringstream os;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        const int g = std::abs(letters_[i]);
        if (g > static_cast<int>(names.size())) fail(ErrorKind::invalid_input, "word uses an unknown generator");
        if (i) os << ' ';
        os << names[g - 1];
        if (letters_[i] < 0) os << "^-1";
    }
    return os.str();
}

namespace {

int letter_rank(int l, int rank) { return l > 0 ? l - 1 : rank - l - 1; }

}  // namespace

bool Word::shortlex_less(const Word& a, const Word& b, int rank) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int ra = letter_rank(a.letters_[i], rank), rb = letter_rank(b.letters_[i], rank);
        if (ra != rb) return ra < rb;
    }
    return false;
}

Word commutator(const Word& x, const Word& y) { return x * y * x.inverse() * y.inverse(); }

GroupPresentation GroupPresentation::free_group(int rank) {
    if (rank < 1) fail(ErrorKind::invalid_input, "free group rank must be >= 1");
    GroupPresentation p;
    p.kind = PresentationKind::free;
    for (int i = 1; i <= rank; ++i) p.generators.push_back("x" + std::to_string(i));
    return p;
}

GroupPresentation GroupPresentation::surface(int genus) {
    if (genus < 1) fail(ErrorKind::invalid_input, "surface genus must be >= 1");
    GroupPresentation p;
    p.kind = PresentationKind::surface;
    p.genus = genus;
    Word relator;
    for (int i = 1; i <= genus; ++i) {
        p.generators.push_back("a" + std::to_string(i));
        p.generators.push_back("b" + std::to_string(i));
        relator = relator * commutator(Word::letter(2 * i - 1), Word::letter(2 * i));
    }
    p.relators.push_back(relator);
    return p;
}

std::uint64_t reduced_word_count(int rank, int radius) {
    std::uint64_t total = 1, level = 2 * static_cast<std::uint64_t>(rank);
    for (int k = 1; k <= radius; ++k) {
        total += level;
        if (total > (std::uint64_t{1} << 62)) return total;
        level *= 2 * static_cast<std::uint64_t>(rank) - 1;
    }
    return total;
}

namespace {

/// Letters in ShortLex order: 1..m, then -1..-m.
std::vector<int> ordered_letters(int rank) {
    std::vector<int> out;
    for (int i = 1; i <= rank; ++i) out.push_back(i);
    for (int i = 1; i <= rank; ++i) out.push_back(-i);
    return out;
}

}  // namespace

CayleyBall cayley_ball(const GroupPresentation& p, int radius, const BallPolicy& policy) {
    if (radius < 0) fail(ErrorKind::invalid_input, "ball radius must be >= 0");
    const int m = p.rank();
    CayleyBall ball;
    ball.duplicates_possible = p.kind == PresentationKind::surface;
    ball.words.emplace_back();
    const std::vector<int> letters = ordered_letters(m);

    if (policy.kind == BallPolicy::Kind::exhaustive) {
        if (reduced_word_count(m, radius) > kMaxBallWords) fail(ErrorKind::invalid_input, "ball too large");
        ball.words.reserve(reduced_word_count(m, radius));
        std::size_t level_begin = 0, level_end = 1;
        for (int k = 1; k <= radius; ++k) {
            for (std::size_t i = level_begin; i < level_end; ++i) {
                const std::vector<int>& base = ball.words[i].letters();
                for (int l : letters) {
                    if (!base.empty() && base.back() == -l) continue;
                    std::vector<int> next = base;
                    next.push_back(l);
                    ball.words.push_back(Word(std::move(next)));
                }
            }
            level_begin = level_end;
            level_end = ball.words.size();
        }
        return ball;
    }

    if (policy.per_length < 1) fail(ErrorKind::invalid_input, "sampled ball needs k >= 1");
    // Uniform over reduced words of each length: a uniform first letter, then a uniform choice
    // among the 2m - 1 letters that do not cancel.
    std::mt19937_64 rng(policy.seed);
    std::uniform_int_distribution<int> first(0, 2 * m - 1), next(0, 2 * m - 2);
    for (int k = 1; k <= radius; ++k) {
        for (int s = 0; s < policy.per_length; ++s) {
            std::vector<int> w{letters[first(rng)]};
            while (static_cast<int>(w.size()) < k) {
                int pick = next(rng);
                std::vector<int> allowed;
                for (int l : letters)
                    if (l != -w.back()) allowed.push_back(l);
                w.push_back(allowed[pick]);
            }
            ball.words.push_back(Word(std::move(w)));
        }
    }
    return ball;
}

RepresentationTable::RepresentationTable(GroupPresentation presentation, std::vector<Isometry> images,
                                         Provenance provenance)
    : presentation_(std::move(presentation)),
      images_(std::move(images)),
      provenance_(std::move(provenance)),
      cache_(std::make_shared<Cache>()) {
    if (static_cast<int>(images_.size()) != presentation_.rank())
        fail(ErrorKind::invalid_input, "representation needs one image per generator");
    for (const auto& g : images_) {
        if (g.dim_spatial() != images_.front().dim_spatial())
            fail(ErrorKind::invalid_input, "generator images have different dimensions");
        inverses_.push_back(g.inverse().matrix());
    }
}

const Mat& RepresentationTable::letter_matrix(int letter) const {
    const int g = std::abs(letter);
    if (g < 1 || g > presentation_.rank()) fail(ErrorKind::invalid_input, "word uses an unknown generator");
    return letter > 0 ? images_[g - 1].matrix() : inverses_[g - 1];
}

Mat RepresentationTable::evaluate_matrix(const Word& w) const {
    const auto n = images_.front().matrix().rows();
    Mat acc = Mat::Identity(n, n);
    int since = 0;
    for (int l : w.letters()) {
        acc = acc * letter_matrix(l);
        if (++since == 50) {
            acc = j_polar(acc);
            since = 0;
        }
    }
    return acc;
}

Isometry RepresentationTable::evaluate(const Word& w) const {
    {
        std::shared_lock lock(cache_->mutex);
        if (auto it = cache_->words.find(w); it != cache_->words.end())
            return Isometry::check(it->second, images_.front().tolerances());
    }
    Mat m = evaluate_matrix(w);
    {
        std::unique_lock lock(cache_->mutex);
        cache_->words.insert_or_assign(w, m);
    }
    return Isometry::check(m, images_.front().tolerances());
}

double RepresentationTable::relator_residual() const {
    double worst = 0.0;
    for (const Word& r : presentation_.relators) {
        const Mat m = evaluate_matrix(r);
        worst = std::max(worst, (m - Mat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff());
    }
    return worst;
}

RepresentationTable RepresentationTable::conjugated(const Isometry& g) const {
    const Isometry gi = g.inverse();
    std::vector<Isometry> out;
    for (const auto& x : images_) out.push_back(Isometry::check(g.matrix() * x.matrix() * gi.matrix(), x.tolerances()));
    Provenance p = provenance_;
    p.kind = "conjugated:" + p.kind;
    return RepresentationTable(presentation_, std::move(out), std::move(p));
}

RepresentationTable RepresentationTable::block_embedded(int dim_spatial) const {
    const int n0 = this->dim_spatial();
    if (dim_spatial < n0) fail(ErrorKind::invalid_input, "block embedding cannot lower the dimension");
    std::vector<Isometry> out;
    for (const auto& x : images_) {
        Mat m = Mat::Identity(dim_spatial + 1, dim_spatial + 1);
        m.topLeftCorner(n0 + 1, n0 + 1) = x.matrix();
        out.push_back(Isometry::check(m, x.tolerances()));
    }
    Provenance p = provenance_;
    p.kind = "block_embedded:" + p.kind;
    p.parameters["dim"] = dim_spatial;
    return RepresentationTable(presentation_, std::move(out), std::move(p));
}

RepresentationTable RepresentationTable::with_images(std::vector<Isometry> images, Provenance provenance) const {
    return RepresentationTable(presentation_, std::move(images), std::move(provenance));
}

namespace {

Vec lorentz_cross(const Vec& a, const Vec& b) {
    Eigen::Vector3d c = Eigen::Vector3d(a(0), a(1), a(2)).cross(Eigen::Vector3d(b(0), b(1), b(2)));
    return Vec(form_matrix(3) * Vec(c));
}

/// Columns [p, u, n]: the point p, the unit tangent toward q, and the oriented normal.
Mat polygon_frame(const Vec& p, const Vec& q) {
    Vec u = q + bilinear_form(p, q) * p;
    u /= std::sqrt(quadratic_form(u));
    Vec n = lorentz_cross(p, u);
    n /= std::sqrt(quadratic_form(n));
    Mat f(3, 3);
    f << p, u, n;
    return f;
}

/// The orientation-preserving isometry sending p1 to q1 and the direction toward p2 to the
/// direction toward q2.
Mat frame_map(const Vec& p1, const Vec& p2, const Vec& q1, const Vec& q2) {
    const Mat j = form_matrix(3);
    return polygon_frame(q1, q2) * j * polygon_frame(p1, p2).transpose() * j;
}

}  // namespace

RepresentationTable fuchsian_surface(int genus) {
    if (genus < 2) fail(ErrorKind::invalid_input, "Fuchsian construction needs genus >= 2");
    const int sides = 4 * genus;
    // Regular n-gon with interior angle alpha: cosh R = cot(pi/n) cot(alpha/2); alpha = 2 pi / n.
    const double cot = 1.0 / std::tan(std::numbers::pi / sides);
    const double r = std::acosh(cot * cot);
    std::vector<Vec> v;
    for (int k = 0; k < sides; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / sides;
        Vec x(3);
        x << std::cosh(r), std::sinh(r) * std::cos(phi), std::sinh(r) * std::sin(phi);
        v.push_back(x);
    }
    auto vertex = [&](int k) -> const Vec& { return v[k % sides]; };
    // Sends side k_minus, traversed backwards, onto side k_plus.
    auto pairing = [&](int k_plus, int k_minus) {
        return frame_map(vertex(k_minus + 1), vertex(k_minus), vertex(k_plus), vertex(k_plus + 1));
    };

    std::vector<Isometry> images;
    for (int i = 0; i < genus; ++i) {
        const Mat a = j_polar(pairing(4 * i, 4 * i + 2));
        const Mat b = j_polar(pairing(4 * i + 1, 4 * i + 3));
        images.push_back(Isometry::check(a));
        images.push_back(Isometry::check(b).inverse());
    }
    return RepresentationTable(GroupPresentation::surface(genus), std::move(images),
                               Provenance{"fuchsian", {{"genus", static_cast<double>(genus)}}});
}

SplittingData split_amalgam(int genus) {
    if (genus < 2) fail(ErrorKind::invalid_input, "amalgam splitting needs genus >= 2");
    SplittingData s;
    s.kind = SplitKind::amalgam;
    s.a_generators = {Word::letter(1), Word::letter(2)};
    for (int g = 3; g <= 2 * genus; ++g) s.b_generators.push_back(Word::letter(g));
    s.c_generator = commutator(Word::letter(1), Word::letter(2));
    return s;
}

SplittingData split_hnn_genus2() {
    SplittingData s;
    s.kind = SplitKind::hnn;
    s.a_generators = {Word::letter(1), Word::letter(3), Word::letter(4)};
    s.stable_letter = 2;
    const Word f1 = commutator(Word::letter(3), Word::letter(4)) * Word::letter(1);
    const Word f2 = Word::letter(1);
    s.boundary_identifications = {f1, f2};
    s.c_generator = f1;
    return s;
}

double splitting_residual(const RepresentationTable& rho, const SplittingData& split) {
    Word lhs, rhs;
    if (split.kind == SplitKind::amalgam) {
        const int genus = rho.presentation().genus;
        Word rest;
        for (int i = 2; i <= genus; ++i) rest = rest * commutator(Word::letter(2 * i - 1), Word::letter(2 * i));
        lhs = split.c_generator;
        rhs = rest.inverse();
    } else {
        const Word s = Word::letter(split.stable_letter);
        lhs = split.boundary_identifications.first;
        rhs = s * split.boundary_identifications.second * s.inverse();
    }
    // Compare the products letter by letter so that free cancellation does not hide anything.
    return (rho.evaluate_matrix(lhs) - rho.evaluate_matrix(rhs)).cwiseAbs().maxCoeff();
}

std::vector<Word> subgroup_ball(const std::vector<Word>& generators, int radius) {
    const int m = static_cast<int>(generators.size());
    const CayleyBall abstract = cayley_ball(GroupPresentation::free_group(m), radius);
    std::vector<Word> out;
    for (std::size_t i = 1; i < abstract.words.size(); ++i) {
        Word w;
        for (int l : abstract.words[i].letters()) w = w * (l > 0 ? generators[l - 1] : generators[-l - 1].inverse());
        out.push_back(w);
    }
    return out;
}

IntersectionReport amalgam_intersection(const RepresentationTable& rho, const SplittingData& split, int radius,
                                        double tol) {
    if (split.kind != SplitKind::amalgam) fail(ErrorKind::invalid_input, "intersection report needs an amalgam");
    const std::vector<Word> a = subgroup_ball(split.a_generators, radius);
    const std::vector<Word> b = subgroup_ball(split.b_generators, radius);
    std::vector<Mat> bm;
    for (const Word& w : b) bm.push_back(rho.evaluate_matrix(w));
    const Mat c = rho.evaluate_matrix(split.c_generator);
    IntersectionReport report;
    report.a_words = a.size();
    report.b_words = b.size();
    for (const Word& u : a) {
        const Mat mu = rho.evaluate_matrix(u);
        for (std::size_t j = 0; j < b.size(); ++j) {
            if ((mu - bm[j]).cwiseAbs().maxCoeff() > tol * entry_scale(mu)) continue;
            report.shared.emplace_back(u, b[j]);
            report.max_commutator_with_c =
                std::max(report.max_commutator_with_c, (mu * c - c * mu).cwiseAbs().maxCoeff() / entry_scale(mu));
        }
    }
    return report;
}

}  // namespace hyperlab
