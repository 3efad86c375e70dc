#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "specshift/continued_fraction.hpp"
#include "specshift/errors.hpp"
#include "specshift/generators.hpp"
#include "specshift/words.hpp"

namespace specshift {

enum class MeasureSource { parry, interval, empirical };

inline const char* to_string(MeasureSource s) {
    switch (s) {
        case MeasureSource::parry: return "parry";
        case MeasureSource::interval: return "interval";
        case MeasureSource::empirical: return "empirical";
    }
    return "?";
}

/// A positive mass per word of a LanguageTable.  For the interval source the
/// exact values in Z + Z*theta are kept alongside the doubles.
struct MeasureAssignment {
    MeasureSource source = MeasureSource::parry;
    std::vector<std::vector<double>> mu;             // [level][id]
    std::vector<std::vector<ThetaLinear>> exact;     // interval source only

    double value(int level, int id) const { return mu[static_cast<std::size_t>(level)][static_cast<std::size_t>(id)]; }
};

// ---------------------------------------------------------------------------
// Parry measure of a shift of finite type
// ---------------------------------------------------------------------------

// The eigenvector product over all length-1 words is u A v = lambda, so the
// exponent must be -n rather than -(n-1) for the level sets to carry total
// mass one.  Additivity is unaffected by the exponent choice.
inline MeasureAssignment parry_measure(const SftGraph& g, const PerronData& pd,
                                       const LanguageTable& table) {
    MeasureAssignment m;
    m.source = MeasureSource::parry;
    m.mu.resize(table.levels.size());
    m.mu[0] = {1.0};
    for (int n = 1; n <= table.max_level; ++n) {
        m.mu[static_cast<std::size_t>(n)].resize(table.levels[static_cast<std::size_t>(n)].size());
        for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i) {
            const Word& w = table.levels[static_cast<std::size_t>(n)][i];
            const auto& first = g.edge_by_label(w.front());
            const auto& last = g.edge_by_label(w.back());
            m.mu[static_cast<std::size_t>(n)][i] =
                pd.left(first.from - 1) * pd.right(last.to - 1) * std::pow(pd.lambda, -n);
        }
    }
    double mass1 = 0.0;
    for (double x : m.mu[1]) mass1 += x;
    if (std::abs(mass1 - 1.0) > 1e-9)
        throw consistency_error("parry_measure: level-1 mass deviates from one beyond tolerance");
    return m;
}

// ---------------------------------------------------------------------------
// Sturmian measure from exact circle-interval intersections
// ---------------------------------------------------------------------------

/// Partition atom of the circle at a given level together with its word.
struct CircleAtom {
    Word word;
    ThetaLinear length;
};

/// The circle [0,1) is cut by the points {-j*theta} for j in the coordinate
/// window extended by one; each atom codes one admissible word and its arc
/// length is the word's frequency.  All endpoints are exact elements of
/// Z + Z*theta.
inline std::vector<CircleAtom> sturmian_level_atoms(const ContinuedFraction& cf, int n) {
    if (n < 1) throw validation_error("sturmian_level_atoms: level must be >= 1");
    const long lo = window_left(n);
    const long hi = lo + n - 1;
    std::vector<ThetaLinear> pts;
    for (long j = lo; j <= hi + 1; ++j) {
        ThetaLinear raw(mpq_class(0), mpq_class(static_cast<long>(-j)));
        mpz_class f = cf.floor_value(raw);
        pts.emplace_back(mpq_class(-f), raw.slope);
    }
    std::sort(pts.begin(), pts.end(),
              [&](const ThetaLinear& x, const ThetaLinear& y) { return cf.less(x, y); });
    const ThetaLinear one(mpq_class(1), mpq_class(0));
    const ThetaLinear theta(mpq_class(0), mpq_class(1));
    auto letter_at = [&](const ThetaLinear& point, long j) {
        ThetaLinear y(point.constant, point.slope + j);
        mpz_class f = cf.floor_value(y);
        ThetaLinear frac(y.constant - mpq_class(f), y.slope);
        // frac < 1 - theta codes '0'
        return cf.sign(frac + theta - one) < 0 ? '0' : '1';
    };
    std::vector<CircleAtom> atoms;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const bool wrap = (i + 1 == pts.size());
        const ThetaLinear& a = pts[i];
        ThetaLinear b = wrap ? pts[0] + one : pts[i + 1];
        ThetaLinear len = b - a;
        if (cf.sign(len) <= 0) throw consistency_error("sturmian_level_atoms: empty atom");
        ThetaLinear mid = (a + b).scaled(mpq_class(1, 2));
        Word w;
        w.reserve(static_cast<std::size_t>(n));
        for (long j = lo; j <= hi; ++j) w.push_back(letter_at(mid, j));
        atoms.push_back({std::move(w), std::move(len)});
    }
    return atoms;
}

/// Frequencies permitted at a given word length: the classical three-value
/// set determined by the continued fraction block containing that length.
struct ThreeDistanceRule {
    int n = 0;            // block depth
    mpz_class k;          // position inside the block
    bool two_values_only = false;  // holds at the right edge of the block
    std::vector<ThetaLinear> values;
};

inline ThreeDistanceRule three_distance_rule(const ContinuedFraction& cf, long m) {
    if (m < 1) throw validation_error("three_distance_rule: length must be >= 1");
    int n = 0;
    while (true) {
        if (n + 1 > cf.order())
            throw precision_error("three_distance_rule: not enough partial quotients for this length");
        mpz_class lo = cf.q(n) + cf.q(n - 1);
        mpz_class hi = cf.q(n + 1) + cf.q(n);
        if (lo <= m && m < hi) break;
        ++n;
    }
    ThreeDistanceRule rule;
    rule.n = n;
    rule.k = (m - cf.q(n - 1)) / cf.q(n);
    auto lam = cf.lambda(n + 1);
    const ThetaLinear& ln = lam[static_cast<std::size_t>(n)];
    const ThetaLinear& ln1 = lam[static_cast<std::size_t>(n) + 1];
    mpq_class kq(rule.k), kq1(rule.k - 1);
    rule.values.push_back(ln - ln1.scaled(kq));
    rule.values.push_back(ln1);
    rule.values.push_back(ln - ln1.scaled(kq1));
    rule.two_values_only = (mpz_class((rule.k + 1) * cf.q(n) + cf.q(n - 1) - 1) == m);
    return rule;
}

/// Exact invariant measure of a Sturmian table.  Every computed frequency is
/// checked against the admissible three-value set of its level.
inline MeasureAssignment sturmian_measure(const ContinuedFraction& cf, const LanguageTable& table) {
    MeasureAssignment m;
    m.source = MeasureSource::interval;
    m.mu.resize(table.levels.size());
    m.exact.resize(table.levels.size());
    m.mu[0] = {1.0};
    m.exact[0] = {ThetaLinear(mpq_class(1), mpq_class(0))};
    for (int n = 1; n <= table.max_level; ++n) {
        const auto& words = table.levels[static_cast<std::size_t>(n)];
        auto atoms = sturmian_level_atoms(cf, n);
        if (atoms.size() != words.size())
            throw consistency_error("sturmian_measure: atom count does not match the table at level " +
                                    std::to_string(n));
        m.mu[static_cast<std::size_t>(n)].assign(words.size(), 0.0);
        m.exact[static_cast<std::size_t>(n)].assign(words.size(), ThetaLinear());
        std::vector<char> seen(words.size(), 0);
        const auto rule = three_distance_rule(cf, n);
        for (auto& atom : atoms) {
            const int id = table.index_of(n, atom.word);
            if (id < 0)
                throw consistency_error("sturmian_measure: atom codes a word absent from the table");
            if (seen[static_cast<std::size_t>(id)])
                throw consistency_error("sturmian_measure: two atoms coded the same word");
            seen[static_cast<std::size_t>(id)] = 1;
            bool admissible = false;
            for (const auto& v : rule.values)
                if (v == atom.length) admissible = true;
            if (!admissible)
                throw consistency_error("sturmian_measure: frequency outside the admissible three-value set");
            m.exact[static_cast<std::size_t>(n)][static_cast<std::size_t>(id)] = atom.length;
            m.mu[static_cast<std::size_t>(n)][static_cast<std::size_t>(id)] = cf.to_double(atom.length);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Empirical (Birkhoff) measure from a one-sided sample
// ---------------------------------------------------------------------------

inline MeasureAssignment empirical_measure(const std::string& sample, const LanguageTable& table) {
    if (sample.size() < 100 * static_cast<std::size_t>(std::max(1, table.max_level)))
        throw precision_error("empirical_measure: sample shorter than 100 times the depth");
    MeasureAssignment m;
    m.source = MeasureSource::empirical;
    m.mu.resize(table.levels.size());
    m.mu[0] = {1.0};
    std::string window;
    for (int n = 1; n <= table.max_level; ++n) {
        const auto& words = table.levels[static_cast<std::size_t>(n)];
        std::vector<std::int64_t> counts(words.size(), 0);
        const std::size_t positions = sample.size() - static_cast<std::size_t>(n) + 1;
        for (std::size_t i = 0; i < positions; ++i) {
            window.assign(sample, i, static_cast<std::size_t>(n));
            const int id = table.index_of(n, window);
            if (id >= 0) counts[static_cast<std::size_t>(id)]++;
        }
        m.mu[static_cast<std::size_t>(n)].resize(words.size());
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (counts[i] == 0)
                throw consistency_error("empirical_measure: table word never occurs in the sample: " + words[i]);
            m.mu[static_cast<std::size_t>(n)][i] =
                static_cast<double>(counts[i]) / static_cast<double>(positions);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Branching ratio and consistency checks
// ---------------------------------------------------------------------------

/// R(w): worst mass ratio of w against its one-step refinements.
inline double ratio_R(const LanguageTable& table, const MeasureAssignment& m, int level, int id) {
    if (level >= table.max_level)
        throw validation_error("ratio_R: refinements unknown at the top level");
    const auto& kids = table.children[static_cast<std::size_t>(level)][static_cast<std::size_t>(id)];
    if (kids.empty()) throw validation_error("ratio_R: word has no refinement");
    double worst = 0.0;
    for (int c : kids)
        worst = std::max(worst, m.value(level, id) / m.value(level + 1, c));
    return worst;
}

struct MeasureCheckReport {
    bool ok = true;
    double worst_mass_defect = 0.0;
    double worst_additivity_defect = 0.0;
    double worst_invariance_defect = 0.0;
    std::vector<std::string> failures;
};

/// Mass one per level, additivity over refinements, full support, and the
/// agreement of left- and right-extension mass sums with the word's mass.
inline MeasureCheckReport check_measure(const LanguageTable& table, const MeasureAssignment& m,
                                        double tol) {
    MeasureCheckReport rep;
    auto fail = [&](const std::string& s) {
        rep.ok = false;
        rep.failures.push_back(s);
    };
    if (std::abs(m.value(0, 0) - 1.0) > tol) fail("empty word does not carry mass one");
    for (int n = 1; n <= table.max_level; ++n) {
        double mass = 0.0;
        for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i) {
            const double mu = m.value(n, static_cast<int>(i));
            if (!(mu > 0)) fail("mass not positive at level " + std::to_string(n));
            mass += mu;
        }
        rep.worst_mass_defect = std::max(rep.worst_mass_defect, std::abs(mass - 1.0));
        if (std::abs(mass - 1.0) > tol) fail("level mass deviates from one at level " + std::to_string(n));
    }
    for (int n = 0; n < table.max_level; ++n) {
        for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i) {
            double sum = 0.0;
            for (int c : table.children[static_cast<std::size_t>(n)][i]) sum += m.value(n + 1, c);
            const double defect = std::abs(sum - m.value(n, static_cast<int>(i)));
            rep.worst_additivity_defect = std::max(rep.worst_additivity_defect, defect);
            if (defect > tol)
                fail("refinement additivity fails at level " + std::to_string(n) + " word " +
                     table.levels[static_cast<std::size_t>(n)][i]);
        }
        // shift-invariance cross-check: both extension sides must carry the word's mass
        for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i) {
            const Word& w = table.levels[static_cast<std::size_t>(n)][i];
            double left = 0.0, right = 0.0;
            const auto& above = table.levels[static_cast<std::size_t>(n) + 1];
            for (std::size_t v = 0; v < above.size(); ++v) {
                if (above[v].compare(1, static_cast<std::size_t>(n), w) == 0)
                    left += m.value(n + 1, static_cast<int>(v));
                if (above[v].compare(0, static_cast<std::size_t>(n), w) == 0)
                    right += m.value(n + 1, static_cast<int>(v));
            }
            const double defect =
                std::max(std::abs(left - m.value(n, static_cast<int>(i))),
                         std::abs(right - m.value(n, static_cast<int>(i))));
            rep.worst_invariance_defect = std::max(rep.worst_invariance_defect, defect);
            if (defect > tol)
                fail("extension-side invariance fails at level " + std::to_string(n) + " word " + w);
        }
    }
    return rep;
}

/// For every branching word, each refinement ratio is controlled by R(w):
/// (mu(w)/mu(w') - 1)^{-1} <= R(w).
inline double branch_ratio_inequality_margin(const LanguageTable& table, const MeasureAssignment& m) {
    double worst = std::numeric_limits<double>::infinity();
    for (int n = 0; n < table.max_level; ++n)
        for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i) {
            if (!table.special[static_cast<std::size_t>(n)][i]) continue;
            const double R = ratio_R(table, m, n, static_cast<int>(i));
            for (int c : table.children[static_cast<std::size_t>(n)][i]) {
                const double r = m.value(n, static_cast<int>(i)) / m.value(n + 1, c);
                worst = std::min(worst, R - 1.0 / (r - 1.0));
            }
        }
    return worst;
}

} // namespace specshift
