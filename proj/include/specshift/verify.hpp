#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "specshift/analysis.hpp"
#include "specshift/hilbert.hpp"
#include "specshift/measures.hpp"
#include "specshift/words.hpp"

namespace specshift {

// ---------------------------------------------------------------------------
// Identity checks for the branching calculus
// ---------------------------------------------------------------------------

/// Worst defects of the eta/zeta identities over every word with a
/// branching parent up to the given level: membership in the flag gap,
/// the pointwise quadratic relation, the closed-form norms, the rank-two
/// commutator decomposition, and the eigenvalue upper bound.
struct EtaZetaDefects {
    int words_checked = 0;
    double in_refined_level = 0.0;
    double orthogonal_to_base = 0.0;
    double pointwise_algebra = 0.0;
    double l2_norm_formula = 0.0;
    double oscillation_formula = 0.0;
    double rank_two_identity = 0.0;
    double norm_product_identity = 0.0;
    double companion_in_base = 0.0;
    double base_product_collapse = 0.0;
    double companion_min_norm = std::numeric_limits<double>::infinity();
    double norm_upper_margin = std::numeric_limits<double>::infinity();

    double worst_defect() const {
        return std::max({in_refined_level, orthogonal_to_base, pointwise_algebra, l2_norm_formula,
                         oscillation_formula, rank_two_identity, norm_product_identity,
                         companion_in_base, base_product_collapse});
    }
};

inline EtaZetaDefects eta_zeta_checks(const TruncatedSpace& s, const AlphaSequence& alpha,
                                      int max_word_level) {
    const LanguageTable& table = *s.table;
    EtaZetaDefects d;
    const Eigen::MatrixXd D = dirac_matrix(s, alpha);
    for (int lvl = 1; lvl <= std::min(max_word_level, s.level); ++lvl) {
        for (std::size_t id = 0; id < table.levels[static_cast<std::size_t>(lvl)].size(); ++id) {
            const int pid = table.parent[static_cast<std::size_t>(lvl)][id];
            if (!table.special[static_cast<std::size_t>(lvl) - 1][static_cast<std::size_t>(pid)]) continue;
            ++d.words_checked;
            bool degenerate = false;
            const LevelFunction et = eta_function(s, lvl, static_cast<int>(id), &degenerate);
            const LevelFunction ze = zeta_function(s, alpha, lvl, static_cast<int>(id));
            const double ratio = s.coarse_mass(lvl - 1, pid) / s.coarse_mass(lvl, static_cast<int>(id));
            const Eigen::VectorXd ex = to_coords(s, et);
            const Eigen::VectorXd zx = to_coords(s, ze);

            // membership in the gap between consecutive flag levels
            d.in_refined_level = std::max(
                d.in_refined_level, (apply_projection(s, lvl, ex) - ex).norm());
            d.orthogonal_to_base =
                std::max(d.orthogonal_to_base, apply_projection(s, lvl - 1, ex).norm());

            // pointwise quadratic relation against the parent indicator
            const LevelFunction xi_p = indicator(s, lvl - 1, pid);
            double alg = 0.0;
            for (int i = 0; i < s.dim(); ++i)
                alg = std::max(alg, std::abs(et.values(i) * et.values(i) -
                                             (ratio - 2.0) * et.values(i) -
                                             (ratio - 1.0) * xi_p.values(i)));
            d.pointwise_algebra = std::max(d.pointwise_algebra, alg);

            const double norm_sq_expected = s.coarse_mass(lvl - 1, pid) * (ratio - 1.0);
            d.l2_norm_formula =
                std::max(d.l2_norm_formula, std::abs(ex.squaredNorm() - norm_sq_expected));
            d.oscillation_formula =
                std::max(d.oscillation_formula, std::abs(oscillation_norm(et) - ratio / 2.0));

            // multiplication by a base-level indicator collapses onto the line
            // through eta: zero off the parent, eta itself on it
            for (std::size_t v = 0; v < table.levels[static_cast<std::size_t>(lvl) - 1].size(); ++v) {
                const LevelFunction xi_v = indicator(s, lvl - 1, static_cast<int>(v));
                Eigen::VectorXd prod = et.values.cwiseProduct(xi_v.values);
                if (static_cast<int>(v) == pid) prod -= et.values;
                d.base_product_collapse = std::max(d.base_product_collapse,
                                                   prod.lpNorm<Eigen::Infinity>());
            }

            // rank-two decomposition of the commutator with D
            Eigen::MatrixXd lhs = D;
            for (int i = 0; i < s.dim(); ++i)
                for (int j = 0; j < s.dim(); ++j) lhs(i, j) *= et.values(i) - et.values(j);
            const Eigen::MatrixXd rhs = ex * zx.transpose() - zx * ex.transpose();
            d.rank_two_identity = std::max(d.rank_two_identity, (lhs - rhs).norm());

            const double comm_norm = operator_norm(lhs);
            d.norm_product_identity =
                std::max(d.norm_product_identity, std::abs(comm_norm - ex.norm() * zx.norm()));
            d.companion_in_base =
                std::max(d.companion_in_base, (apply_projection(s, lvl - 1, zx) - zx).norm());
            d.companion_min_norm = std::min(d.companion_min_norm, zx.norm());
            d.norm_upper_margin = std::min(
                d.norm_upper_margin, std::sqrt(ratio) * alpha.at(lvl) - comm_norm);
        }
    }
    return d;
}

/// Pairwise orthogonality of the branching functions read off along the
/// ancestor chain of each top-level word.
inline double eta_chain_orthogonality_defect(const TruncatedSpace& s) {
    const LanguageTable& table = *s.table;
    double worst = 0.0;
    for (int w = 0; w < s.dim(); ++w) {
        std::vector<Eigen::VectorXd> chain;
        for (int m = 0; m < s.level; ++m) {
            const int anc_m = s.ancestor[static_cast<std::size_t>(m)][static_cast<std::size_t>(w)];
            if (!table.special[static_cast<std::size_t>(m)][static_cast<std::size_t>(anc_m)]) continue;
            const int anc_m1 = s.ancestor[static_cast<std::size_t>(m) + 1][static_cast<std::size_t>(w)];
            chain.push_back(to_coords(s, eta_function(s, m + 1, anc_m1)));
        }
        for (std::size_t a = 0; a < chain.size(); ++a)
            for (std::size_t b = a + 1; b < chain.size(); ++b)
                worst = std::max(worst, std::abs(chain[a].dot(chain[b])));
    }
    return worst;
}

/// Reconstruction of a mean-free function from its fiber components.
inline double q_reconstruction_defect(const TruncatedSpace& s, std::uint64_t seed) {
    const LanguageTable& table = *s.table;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    LevelFunction f;
    f.values.resize(s.dim());
    for (int i = 0; i < s.dim(); ++i) f.values(i) = gauss(rng);
    Eigen::VectorXd x = to_coords(s, f);
    x -= apply_projection(s, 0, x);
    f = from_coords(s, x);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(s.dim());
    for (int n = 0; n < s.level; ++n)
        for (std::size_t id = 0; id < table.levels[static_cast<std::size_t>(n)].size(); ++id)
            if (table.special[static_cast<std::size_t>(n)][id])
                sum += to_coords(s, q_component(s, n, static_cast<int>(id), f));
    return (sum - x).norm();
}

/// P_n P_m = P_min(n,m) and rank P_n = #X_n across the flag.
inline double flag_consistency_defect(const TruncatedSpace& s) {
    std::vector<Eigen::MatrixXd> P;
    for (int n = 0; n <= s.level; ++n) P.push_back(projection_matrix(s, n));
    double worst = 0.0;
    for (int n = 0; n <= s.level; ++n) {
        const Eigen::MatrixXd& Pn = P[static_cast<std::size_t>(n)];
        worst = std::max(worst, (Pn * Pn - Pn).norm());
        worst = std::max(worst, (Pn - Pn.transpose()).norm());
        const double rank_defect =
            std::abs(Pn.trace() - static_cast<double>(s.table->levels[static_cast<std::size_t>(n)].size()));
        worst = std::max(worst, rank_defect);
        for (int m = 0; m <= s.level; ++m)
            worst = std::max(worst,
                             (P[static_cast<std::size_t>(n)] * P[static_cast<std::size_t>(m)] -
                              P[static_cast<std::size_t>(std::min(n, m))]).norm());
    }
    return worst;
}

/// Functions of a coarse level leave every finer level invariant and their
/// Dirac commutator vanishes on the orthogonal complement of their level.
inline double multiplication_stability_defect(const TruncatedSpace& s, const AlphaSequence& alpha,
                                              std::uint64_t seed) {
    const int n = s.level / 2;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    // random function constant on level-n cylinders
    LevelFunction f;
    f.values.resize(s.dim());
    std::vector<double> per_word(s.table->levels[static_cast<std::size_t>(n)].size());
    for (auto& v : per_word) v = unif(rng);
    for (int i = 0; i < s.dim(); ++i)
        f.values(i) = per_word[static_cast<std::size_t>(
            s.ancestor[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)])];
    double worst = 0.0;
    for (int m = n; m <= s.level; ++m) {
        // multiply a random level-m function; the product must stay at level m
        LevelFunction g;
        g.values.resize(s.dim());
        std::vector<double> gw(s.table->levels[static_cast<std::size_t>(m)].size());
        for (auto& v : gw) v = unif(rng);
        for (int i = 0; i < s.dim(); ++i)
            g.values(i) = gw[static_cast<std::size_t>(
                s.ancestor[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)])];
        LevelFunction prod;
        prod.values = f.values.cwiseProduct(g.values);
        if (!lies_in_level(s, prod, m, 1e-12)) worst = std::max(worst, 1.0);
    }
    const Eigen::MatrixXd C = commutator_matrix(s, alpha, f);
    const Eigen::MatrixXd Pn = projection_matrix(s, n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(s.dim(), s.dim());
    worst = std::max(worst, (C * (I - Pn)).norm());
    return worst;
}

// ---------------------------------------------------------------------------
// The registered invariant suite
// ---------------------------------------------------------------------------

struct InvariantResult {
    std::string name;
    bool pass = false;
    double defect = 0.0;
    double tolerance = 0.0;
};

struct InvariantSuite {
    std::vector<InvariantResult> results;
    bool all_pass = true;

    void add(const std::string& name, double defect, double tol) {
        results.push_back({name, defect <= tol, defect, tol});
        if (defect > tol) all_pass = false;
    }
};

/// Every structural invariant of a configured system, at the given depth.
/// `measure_tol` widens the measure checks for empirical sources.
inline InvariantSuite run_invariant_suite(const LanguageTable& table, const MeasureAssignment& m,
                                          int N, double measure_tol = 1e-10,
                                          std::uint64_t seed = 7) {
    InvariantSuite suite;
    // language structure
    double parent_defect = 0.0, partition_defect = 0.0, branching_defect = 0.0;
    for (int n = 1; n <= table.max_level; ++n)
        for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i) {
            const Word& w = table.levels[static_cast<std::size_t>(n)][i];
            const int pid = table.index_of(n - 1, parent_word(w));
            if (pid != table.parent[static_cast<std::size_t>(n)][i]) parent_defect = 1.0;
        }
    for (int n = 0; n < table.max_level; ++n) {
        std::size_t specials = 0;
        for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i) {
            for (int c : table.children[static_cast<std::size_t>(n)][i])
                if (parent_word(table.levels[static_cast<std::size_t>(n) + 1][static_cast<std::size_t>(c)]) !=
                    table.levels[static_cast<std::size_t>(n)][i])
                    partition_defect = 1.0;
            if (table.special[static_cast<std::size_t>(n)][i]) ++specials;
        }
        if (specials == 0) branching_defect = 1.0;
    }
    suite.add("language-parent-rederivation", parent_defect, 0.0);
    suite.add("language-refinement-partition", partition_defect, 0.0);
    suite.add("language-branching-exists", branching_defect, 0.0);

    const auto ent = entropy_profile(table);
    double mono_defect = 0.0;
    for (std::size_t n = 2; n < ent.running_min.size(); ++n)
        mono_defect = std::max(mono_defect, ent.running_min[n] - ent.running_min[n - 1]);
    suite.add("entropy-running-min-monotone", mono_defect, 1e-15);

    // measure structure
    const auto mrep = check_measure(table, m, measure_tol);
    suite.add("measure-level-mass", mrep.worst_mass_defect, measure_tol);
    suite.add("measure-refinement-additivity", mrep.worst_additivity_defect, measure_tol);
    suite.add("measure-extension-invariance", mrep.worst_invariance_defect, measure_tol);
    suite.add("measure-branch-ratio-inequality",
              std::max(0.0, -branch_ratio_inequality_margin(table, m)), 1e-9);

    // operator structure
    const TruncatedSpace space = make_space(table, m, N);
    const AlphaSequence alpha = AlphaSequence::linear(N);
    suite.add("flag-projection-consistency", flag_consistency_defect(space), 1e-10);
    suite.add("multiplication-level-stability",
              multiplication_stability_defect(space, alpha, seed), 1e-10);
    const auto ez = eta_zeta_checks(space, alpha, std::min(N, 6));
    suite.add("branching-function-identities", ez.worst_defect(), 1e-10);
    suite.add("branching-function-upper-bound", std::max(0.0, -ez.norm_upper_margin), 1e-10);
    suite.add("branching-companion-nonzero", ez.companion_min_norm > 1e-12 ? 0.0 : 1.0, 0.0);
    suite.add("branching-chain-orthogonality", eta_chain_orthogonality_defect(space), 1e-10);
    suite.add("fiber-component-reconstruction", q_reconstruction_defect(space, seed), 1e-10);
    return suite;
}

} // namespace specshift
