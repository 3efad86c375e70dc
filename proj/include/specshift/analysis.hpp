#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "specshift/continued_fraction.hpp"
#include "specshift/errors.hpp"
#include "specshift/generators.hpp"
#include "specshift/hilbert.hpp"
#include "specshift/measures.hpp"
#include "specshift/words.hpp"

namespace specshift {

// ---------------------------------------------------------------------------
// Summability of the canonical Dirac operator
// ---------------------------------------------------------------------------

struct SummabilityReport {
    double s = 0.0;
    std::vector<double> terms;         // per-level contribution
    std::vector<double> partial_sums;
    std::string verdict;               // converging | diverging | inconclusive
    std::string evidence;              // growth-margin | block-trend
    double growth_estimate = 0.0;      // entropy or fitted degree
};

inline std::vector<double> counts_to_logs(const std::vector<double>& counts) {
    std::vector<double> logs(counts.size());
    for (std::size_t n = 0; n < counts.size(); ++n) logs[n] = std::log(counts[n]);
    return logs;
}

namespace detail {

/// Dyadic block sums of the terms; used as a trend test when the growth
/// comparison is inside its margin.
inline void block_trend_verdict(SummabilityReport& rep) {
    std::vector<double> blocks;
    std::size_t lo = 1;
    while (lo < rep.terms.size()) {
        const std::size_t hi = std::min(rep.terms.size(), lo * 2);
        if (hi - lo < lo) break;  // partial block: stop
        double sum = 0.0;
        for (std::size_t n = lo; n < hi; ++n) sum += rep.terms[n];
        blocks.push_back(sum);
        lo = hi;
    }
    rep.evidence = "block-trend";
    if (blocks.size() < 3) {
        rep.verdict = "inconclusive";
        return;
    }
    bool shrinking = true, growing = true;
    for (std::size_t b = blocks.size() - 3; b + 1 < blocks.size(); ++b) {
        if (!(blocks[b + 1] <= 0.9 * blocks[b] + 1e-300)) shrinking = false;
        if (!(blocks[b + 1] >= 0.98 * blocks[b])) growing = false;
    }
    rep.verdict = shrinking ? "converging" : (growing ? "diverging" : "inconclusive");
}

} // namespace detail

/// Partial sums of sum_n e^{-s n} (#X_n - #X_{n-1}).  The verdict compares
/// s against the entropy estimate; inside the margin a block trend decides.
inline SummabilityReport exp_summability(const std::vector<double>& counts, double s,
                                         double margin = 0.1) {
    if (counts.size() < 2) throw validation_error("exp_summability: need at least two levels");
    SummabilityReport rep;
    rep.s = s;
    rep.growth_estimate = entropy_profile(counts_to_logs(counts)).estimate;
    double acc = 0.0;
    for (std::size_t n = 0; n < counts.size(); ++n) {
        const double inc = counts[n] - (n == 0 ? 0.0 : counts[n - 1]);
        const double term = std::exp(-s * static_cast<double>(n)) * inc;
        rep.terms.push_back(term);
        acc += term;
        rep.partial_sums.push_back(acc);
    }
    if (s > rep.growth_estimate + margin) {
        rep.verdict = "converging";
        rep.evidence = "growth-margin";
    } else if (s < rep.growth_estimate - margin) {
        rep.verdict = "diverging";
        rep.evidence = "growth-margin";
    } else {
        detail::block_trend_verdict(rep);
    }
    return rep;
}

/// Least-squares estimate of d in #X_n ~ n^d over the top half of the range.
inline double fitted_complexity_degree(const std::vector<double>& counts) {
    const std::size_t n_max = counts.size() - 1;
    const std::size_t lo = std::max<std::size_t>(2, n_max / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t n = lo; n <= n_max; ++n) {
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(counts[n]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    if (cnt < 2) throw validation_error("fitted_complexity_degree: not enough levels");
    const double denom = cnt * sxx - sx * sx;
    return (cnt * sxy - sx * sy) / denom;
}

/// Partial sums of sum_n (1+n^2)^{-s/2} (#X_n - #X_{n-1}) with the verdict
/// against the fitted polynomial degree of the complexity.
inline SummabilityReport power_summability(const std::vector<double>& counts, double s,
                                           double margin = 0.3) {
    if (counts.size() < 8) throw validation_error("power_summability: need more levels");
    SummabilityReport rep;
    rep.s = s;
    rep.growth_estimate = fitted_complexity_degree(counts);
    double acc = 0.0;
    for (std::size_t n = 0; n < counts.size(); ++n) {
        const double inc = counts[n] - (n == 0 ? 0.0 : counts[n - 1]);
        const double term = std::pow(1.0 + static_cast<double>(n) * static_cast<double>(n), -s / 2.0) * inc;
        rep.terms.push_back(term);
        acc += term;
        rep.partial_sums.push_back(acc);
    }
    if (s > rep.growth_estimate + margin) {
        rep.verdict = "converging";
        rep.evidence = "growth-margin";
    } else if (s < rep.growth_estimate - margin) {
        rep.verdict = "diverging";
        rep.evidence = "growth-margin";
    } else {
        detail::block_trend_verdict(rep);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Commutant of the Dirac operator inside the function algebra
// ---------------------------------------------------------------------------

/// Dimension of { f : [D, M_f] = 0 } at the truncation.  A multiplication
/// operator commutes with D exactly when its values agree across every pair
/// coupled by a nonzero Dirac entry, so the null space dimension is the
/// number of connected components of the coupling graph.
inline int commutant_dimension(const TruncatedSpace& s, const AlphaSequence& alpha,
                               bool* ambiguous = nullptr) {
    const Eigen::MatrixXd D = dirac_matrix(s, alpha);
    const int n = s.dim();
    std::vector<int> root(static_cast<std::size_t>(n));
    std::iota(root.begin(), root.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (root[static_cast<std::size_t>(v)] != v) {
            root[static_cast<std::size_t>(v)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(v)])];
            v = root[static_cast<std::size_t>(v)];
        }
        return v;
    };
    if (ambiguous) *ambiguous = false;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double a = std::abs(D(i, j));
            if (ambiguous && a > 1e-12 && a < 1e-6) *ambiguous = true;
            if (a > 1e-9) root[static_cast<std::size_t>(find(i))] = find(j);
        }
    int components = 0;
    for (int i = 0; i < n; ++i)
        if (find(i) == i) ++components;
    return components;
}

// ---------------------------------------------------------------------------
// Shift of finite type: the log-weighted branching witnesses
// ---------------------------------------------------------------------------

struct CycleWitness {
    int vertex = 0;       // a vertex with at least two incoming edges
    std::string cycle;    // edge labels of a cycle through that vertex
    int period = 0;
};

inline CycleWitness find_branching_cycle(const SftGraph& g) {
    g.require_usable();
    int vertex = -1;
    std::vector<int> indeg(static_cast<std::size_t>(g.vertex_count), 0);
    for (const auto& e : g.edges) indeg[static_cast<std::size_t>(e.to) - 1]++;
    for (int j = 1; j <= g.vertex_count; ++j)
        if (indeg[static_cast<std::size_t>(j) - 1] >= 2) {
            vertex = j;
            break;
        }
    if (vertex < 0) throw validation_error("find_branching_cycle: no vertex with two incoming edges");
    // shortest cycle vertex -> vertex, lexicographically smallest labels
    std::deque<std::pair<int, std::string>> bfs{{vertex, ""}};
    std::map<int, std::string> best;  // shortest/lex-least path label string per vertex
    while (!bfs.empty()) {
        auto [v, path] = bfs.front();
        bfs.pop_front();
        std::vector<const SftGraph::Edge*> outs;
        for (const auto& e : g.edges)
            if (e.from == v) outs.push_back(&e);
        std::sort(outs.begin(), outs.end(),
                  [](const SftGraph::Edge* a, const SftGraph::Edge* b) { return a->label < b->label; });
        for (const auto* e : outs) {
            const std::string next = path + e->label;
            if (e->to == vertex) {
                CycleWitness c;
                c.vertex = vertex;
                c.cycle = next;
                c.period = static_cast<int>(next.size());
                return c;
            }
            auto it = best.find(e->to);
            if (it == best.end()) {
                best[e->to] = next;
                bfs.emplace_back(e->to, next);
            }
        }
    }
    throw consistency_error("find_branching_cycle: no cycle found in an irreducible graph");
}

inline std::string repeat_word(const std::string& w, int times) {
    std::string out;
    out.reserve(w.size() * static_cast<std::size_t>(times));
    for (int i = 0; i < times; ++i) out += w;
    return out;
}

struct FkRow {
    int K = 0;
    double harmonic = 0.0;    // H_K
    double osc_lower = 0.0;   // certified lower bound for the oscillation seminorm
    double lip = 0.0;         // exact commutator norm
    double min_value = 0.0;   // must stay <= 0 for the bound to be valid
};

struct FkExperimentReport {
    CycleWitness cycle;
    double ratio_a = 0.0;  // parent-to-child mass ratio along the cycle words, constant in k
    std::vector<FkRow> rows;
};

/// The harmonically weighted branching functions along a cycle through a
/// branching vertex: oscillation grows like the harmonic series while the
/// commutator norm stays bounded.
inline FkExperimentReport sft_fk_experiment(const SftGraph& g, const LanguageTable& table,
                                            const MeasureAssignment& m, int K_max) {
    if (K_max < 1) throw validation_error("sft_fk_experiment: K_max must be >= 1");
    FkExperimentReport rep;
    rep.cycle = find_branching_cycle(g);
    const int p = rep.cycle.period;
    const int N = 2 * p * K_max + 1;
    if (table.max_level < N)
        throw validation_error("sft_fk_experiment: table depth below 2 p K_max + 1");
    const TruncatedSpace space = make_space(table, m, N);
    const AlphaSequence alpha = AlphaSequence::linear(N);

    Eigen::MatrixXd etas(space.dim(), K_max), zetas(space.dim(), K_max);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(space.dim());
    std::vector<double> coeffs;
    for (int k = 1; k <= K_max; ++k) {
        const Word wk = rep.cycle.cycle.back() + repeat_word(rep.cycle.cycle, 2 * k);
        const int lvl = 2 * p * k + 1;
        const int id = table.index_of(lvl, wk);
        if (id < 0) throw consistency_error("sft_fk_experiment: cycle word missing from the table");
        bool degenerate = false;
        const LevelFunction ek = eta_function(space, lvl, id, &degenerate);
        if (degenerate)
            throw consistency_error("sft_fk_experiment: cycle parent does not branch");
        const int pid = table.parent[static_cast<std::size_t>(lvl)][static_cast<std::size_t>(id)];
        const double ratio = space.coarse_mass(lvl - 1, pid) / space.coarse_mass(lvl, id);
        if (k == 1) {
            rep.ratio_a = ratio;
            if (!(rep.ratio_a > 1.0))
                throw consistency_error("sft_fk_experiment: branching mass ratio is not above one");
        } else if (std::abs(ratio - rep.ratio_a) > 1e-9 * rep.ratio_a) {
            throw consistency_error("sft_fk_experiment: branching mass ratio is not constant along the cycle");
        }
        etas.col(k - 1) = to_coords(space, ek);
        zetas.col(k - 1) = to_coords(space, zeta_function(space, alpha, lvl, id));
        coeffs.push_back(1.0 / k);

        f += coeffs.back() * ek.values;
        FkRow row;
        row.K = k;
        row.harmonic = (k == 1) ? 1.0 : rep.rows.back().harmonic + 1.0 / k;
        row.min_value = f.minCoeff();
        if (row.min_value > 1e-12)
            throw consistency_error("sft_fk_experiment: witness never goes nonpositive");
        row.osc_lower = f.maxCoeff() / 2.0;
        Eigen::MatrixXd frame(space.dim(), 2 * k);
        frame.leftCols(k) = etas.leftCols(k);
        frame.rightCols(k) = zetas.leftCols(k);
        row.lip = rank_structured_commutator_norm(frame, coeffs);
        rep.rows.push_back(row);
    }
    return rep;
}

struct IdentityCheck {
    std::string name;
    double defect = 0.0;
};

/// Nested-projection identities of the cycle indicators: the coarse
/// projection scales the indicator by the mass ratio, the increments sit in
/// consecutive flag gaps with an explicit norm, and the telescoped sum
/// rebuilds the indicator.  At k = 1 the coarse level is the constants and
/// the scale is the raw mass rather than the eigenvalue power.
inline std::vector<IdentityCheck> sft_projection_identities(const SftGraph& g, const PerronData& pd,
                                                            const LanguageTable& table,
                                                            const MeasureAssignment& m, int k) {
    if (k < 1) throw validation_error("sft_projection_identities: k must be >= 1");
    const CycleWitness cyc = find_branching_cycle(g);
    const int p = cyc.period;
    const int N = 2 * p * k + 1;
    if (table.max_level < N)
        throw validation_error("sft_projection_identities: table depth below 2 p k + 1");
    const TruncatedSpace space = make_space(table, m, N);
    const double lam_pow = std::pow(pd.lambda, -2 * p);

    auto parent_indicator = [&](int j) {  // indicator of the 2pj-cycle word
        if (j == 0) return indicator(space, 0, 0);
        const Word w = repeat_word(cyc.cycle, 2 * j);
        const int id = table.index_of(2 * p * j, w);
        if (id < 0) throw consistency_error("sft_projection_identities: cycle power missing");
        return indicator(space, 2 * p * j, id);
    };

    std::vector<IdentityCheck> checks;
    const Eigen::VectorXd xik = to_coords(space, parent_indicator(k));
    const Eigen::VectorXd xikm = to_coords(space, parent_indicator(k - 1));
    const double mass_k = xik.squaredNorm();
    const double mass_km = xikm.squaredNorm();

    {   // coarse projection scales the indicator by the mass ratio
        const double c = mass_k / mass_km;
        const Eigen::VectorXd lhs = apply_projection(space, 2 * p * (k - 1), xik);
        checks.push_back({"coarse-projection-scaling", (lhs - c * xikm).norm()});
        if (k >= 2)
            checks.push_back({"mass-ratio-eigenvalue-power", std::abs(c - lam_pow)});
    }
    const Eigen::VectorXd incr = xik - lam_pow * xikm;
    if (k >= 2) {
        checks.push_back({"increment-in-fine-level",
                          (apply_projection(space, 2 * p * k, incr) - incr).norm()});
        checks.push_back({"increment-orthogonal-to-coarse",
                          apply_projection(space, 2 * p * (k - 1), incr).norm()});
        const double expected = mass_k - lam_pow * lam_pow * mass_km;
        checks.push_back({"increment-norm-formula", std::abs(incr.squaredNorm() - expected)});
    }
    {   // telescoping reconstruction from the increments
        Eigen::VectorXd sum = std::pow(pd.lambda, -2.0 * p * k) * to_coords(space, parent_indicator(0));
        for (int j = 1; j <= k; ++j) {
            const Eigen::VectorXd xj = to_coords(space, parent_indicator(j));
            const Eigen::VectorXd xjm = to_coords(space, parent_indicator(j - 1));
            sum += std::pow(pd.lambda, -2.0 * p * (k - j)) * (xj - lam_pow * xjm);
        }
        checks.push_back({"telescoping-reconstruction", (sum - xik).norm()});
    }
    return checks;
}

// ---------------------------------------------------------------------------
// Sturmian witnesses
// ---------------------------------------------------------------------------

struct SturmianWitness {
    int depth = 0;             // block index n
    mpz_class level;           // q_n + q_{n-1} - 1, the branching word's level
    mpq_class ratio_lower;     // certified bounds for (level+1)^{-2} mu(pi(w))/mu(w)
    mpq_class ratio_upper;
    double ratio_quantity = 0.0;
    bool materialized = false;
    double lip = 0.0;
    double osc = 0.0;
    double osc_predicted = 0.0;
};

/// The scaled branching witness at the unique branching word of level
/// q_n + q_{n-1} - 1.  The mass ratio of its extensions equals
/// lambda_n / lambda_{n+1}, which lies in the open integer bracket
/// (a_{n+1}, a_{n+1}+1); both bounds are exact.  When the level is small
/// enough the witness function itself is materialized and its commutator
/// norm and oscillation are evaluated.
inline SturmianWitness sturmian_witness(const ContinuedFraction& cf, int depth,
                                        bool materialize = false, long materialize_cap = 4096) {
    if (depth < 1) throw validation_error("sturmian_witness: depth must be >= 1");
    SturmianWitness w;
    w.depth = depth;
    w.level = cf.q(depth) + cf.q(depth - 1) - 1;
    // certifies positivity and strict decrease of the remainders
    auto lam = cf.lambda(depth + 2);
    const mpz_class m1 = w.level + 1;
    const mpq_class scale(mpz_class(1), m1 * m1);
    w.ratio_lower = mpq_class(cf.quotient(depth + 1)) * scale;
    w.ratio_upper = mpq_class(cf.quotient(depth + 1) + 1) * scale;
    // refine with the certified remainder enclosures when they are tighter
    {
        const mpq_class lo = cf.lower(lam[static_cast<std::size_t>(depth)]);
        const mpq_class hi = cf.upper(lam[static_cast<std::size_t>(depth)]);
        const mpq_class lo1 = cf.lower(lam[static_cast<std::size_t>(depth) + 1]);
        const mpq_class hi1 = cf.upper(lam[static_cast<std::size_t>(depth) + 1]);
        if (lo > 0 && lo1 > 0) {
            const mpq_class refined_lo(mpq_class(lo / hi1) * scale);
            const mpq_class refined_hi(mpq_class(hi / lo1) * scale);
            if (refined_lo > w.ratio_lower) w.ratio_lower = refined_lo;
            if (refined_hi < w.ratio_upper) w.ratio_upper = refined_hi;
        }
    }
    w.ratio_quantity = (mpq_class((w.ratio_lower + w.ratio_upper) / 2)).get_d();
    if (!materialize || w.level + 1 > materialize_cap) return w;

    const long N = mpz_class(w.level + 1).get_si();
    LanguageTable table = build_language([&](int n) { return sturmian_factors(cf, n); },
                                         static_cast<int>(N));
    MeasureAssignment mu = sturmian_measure(cf, table);
    const TruncatedSpace space = make_space(table, mu, static_cast<int>(N));
    const AlphaSequence alpha = AlphaSequence::linear(static_cast<int>(N));
    const int m_level = static_cast<int>(N) - 1;
    auto specials = special_words(table, m_level);
    if (specials.size() != 1)
        throw consistency_error("sturmian_witness: expected a unique branching word");
    const int pid = table.index_of(m_level, specials[0]);
    // the branching word carries mass lambda_n; take the extension of mass lambda_{n+1}
    if (mu.exact[static_cast<std::size_t>(m_level)][static_cast<std::size_t>(pid)] !=
        lam[static_cast<std::size_t>(depth)])
        throw consistency_error("sturmian_witness: branching word mass is not lambda_n");
    int child_id = -1;
    for (int c : table.children[static_cast<std::size_t>(m_level)][static_cast<std::size_t>(pid)])
        if (mu.exact[static_cast<std::size_t>(N)][static_cast<std::size_t>(c)] ==
            lam[static_cast<std::size_t>(depth) + 1])
            child_id = c;
    if (child_id < 0)
        throw consistency_error("sturmian_witness: no extension of mass lambda_{n+1}");
    const double ratio = space.coarse_mass(m_level, pid) / space.coarse_mass(static_cast<int>(N), child_id);
    bool degenerate = false;
    LevelFunction f = eta_function(space, static_cast<int>(N), child_id, &degenerate);
    if (degenerate) throw consistency_error("sturmian_witness: branching word did not branch");
    const double c = 1.0 / (static_cast<double>(N) * std::sqrt(ratio));
    f.values *= c;
    w.materialized = true;
    w.lip = lip_seminorm(space, alpha, f);
    w.osc = oscillation_norm(f);
    w.osc_predicted = std::sqrt(ratio) / (2.0 * static_cast<double>(N));
    return w;
}

// ---------------------------------------------------------------------------
// Control of the fiber components of Lipschitz-normalized functions
// ---------------------------------------------------------------------------

inline int ancestor_id(const LanguageTable& table, int level_from, int id, int level_to) {
    int cur = id;
    for (int n = level_from; n > level_to; --n)
        cur = table.parent[static_cast<std::size_t>(n)][static_cast<std::size_t>(cur)];
    return cur;
}

struct QwCheck {
    double pairing_lhs = 0.0;
    double pairing_rhs = 0.0;
    double qw_sup = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - qw_sup
};

/// The exact pairing identity between the commutator applied to a coarse
/// branching function and the fiber component Q_w(f), plus the sup-norm
/// bound it implies when the commutator norm of f is at most one.
inline QwCheck qw_bound_check(const TruncatedSpace& s, const AlphaSequence& alpha,
                              const LevelFunction& f, int n, int id_w, int m) {
    const LanguageTable& table = *s.table;
    if (!(m < n) || m < 0) throw validation_error("qw_bound_check: need 0 <= m < n");
    if (n + 1 > s.level) throw validation_error("qw_bound_check: refinement above truncation");
    if (!table.special[static_cast<std::size_t>(n)][static_cast<std::size_t>(id_w)])
        throw validation_error("qw_bound_check: w does not branch");
    const int anc_m = ancestor_id(table, n, id_w, m);
    if (!table.special[static_cast<std::size_t>(m)][static_cast<std::size_t>(anc_m)])
        throw validation_error("qw_bound_check: the level-m ancestor does not branch");
    const int anc_m1 = ancestor_id(table, n, id_w, m + 1);

    bool degenerate = false;
    const LevelFunction etap = eta_function(s, m + 1, anc_m1, &degenerate);
    if (degenerate) throw consistency_error("qw_bound_check: coarse branching function vanished");
    const LevelFunction qw = q_component(s, n, id_w, f);

    const Eigen::VectorXd x = to_coords(s, etap);
    Eigen::VectorXd fx = x, dfx;
    for (int i = 0; i < s.dim(); ++i) fx(i) *= f.values(i);
    Eigen::VectorXd y = apply_dirac(s, alpha, fx);
    dfx = apply_dirac(s, alpha, x);
    for (int i = 0; i < s.dim(); ++i) y(i) -= f.values(i) * dfx(i);

    QwCheck out;
    out.pairing_lhs = y.dot(to_coords(s, qw));
    const double ratio = s.coarse_mass(m, anc_m) / s.coarse_mass(m + 1, anc_m1);
    const double qw_l2 = l2_norm(s, qw);
    out.pairing_rhs = (alpha.at(n + 1) - alpha.at(m + 1)) * qw_l2 * qw_l2 * (ratio - 1.0);
    out.qw_sup = sup_norm(qw);
    out.bound = std::sqrt(branch_ratio(s, n, id_w)) * std::sqrt(branch_ratio(s, m, anc_m)) /
                (alpha.at(n + 1) - alpha.at(m + 1)) *
                std::sqrt(s.coarse_mass(m + 1, anc_m1) / s.coarse_mass(n, id_w));
    out.margin = out.bound - out.qw_sup;
    return out;
}

// ---------------------------------------------------------------------------
// Quotient growth of sampled rotation numbers
// ---------------------------------------------------------------------------

/// Exact partial quotients of the rational value of a double in (0,1).
inline std::vector<mpz_class> partial_quotients_of(double x, int max_depth) {
    if (!(x > 0.0 && x < 1.0)) throw validation_error("partial_quotients_of: need x in (0,1)");
    mpq_class frac(x);
    frac.canonicalize();
    std::vector<mpz_class> out;
    for (int j = 0; j < max_depth && frac != 0; ++j) {
        mpq_class inv = 1 / frac;
        mpz_class a;
        mpz_fdiv_q(a.get_mpz_t(), inv.get_num().get_mpz_t(), inv.get_den().get_mpz_t());
        out.push_back(a);
        frac = inv - mpq_class(a);
    }
    return out;
}

struct QuotientGrowthReport {
    int samples = 0;
    int depth = 0;
    double s = 0.0;
    double threshold = 0.0;        // the constant C in a_j <= C j^s
    double worst_ratio = 0.0;      // max over samples and j of a_j / j^s
    double fraction_within = 0.0;  // samples whose whole expansion obeys the bound
};

/// How often sampled rotation numbers satisfy the polynomial quotient
/// bound that keeps the induced metric finite.  Typical numbers pass by a
/// wide margin; isolated large quotients are expected and only lower the
/// fraction, they are not errors.
inline QuotientGrowthReport bounded_quotient_check(int samples, int depth, double s,
                                                   double threshold, std::uint64_t seed) {
    if (samples < 1 || depth < 1) throw validation_error("bounded_quotient_check: empty request");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    QuotientGrowthReport rep;
    rep.samples = samples;
    rep.depth = depth;
    rep.s = s;
    rep.threshold = threshold;
    int within = 0;
    for (int i = 0; i < samples; ++i) {
        double x = unif(rng);
        while (!(x > 0.0 && x < 1.0)) x = unif(rng);
        const auto quotients = partial_quotients_of(x, depth);
        bool ok = true;
        for (std::size_t j = 0; j < quotients.size(); ++j) {
            const double ratio =
                quotients[j].get_d() / std::pow(static_cast<double>(j + 1), s);
            rep.worst_ratio = std::max(rep.worst_ratio, ratio);
            if (ratio > threshold) ok = false;
        }
        if (ok) ++within;
    }
    rep.fraction_within = static_cast<double>(within) / samples;
    return rep;
}

// ---------------------------------------------------------------------------
// Linear-recurrence certificate
// ---------------------------------------------------------------------------

struct LrCertificate {
    double K_scan = 0.0;       // max return length over word length, from the sample
    double K_freq = 0.0;       // max of n mu(w) and 1/(n mu(w))
    double K_hat = 0.0;
    bool scan_stable = false;
    long band_limit = 0;       // ceil(K)(ceil(K)+1)^2
    double C0 = 0.0;           // fiber-component constant
    double C = 0.0;            // geometric prefactor
    double rate = 0.0;         // (1 + 1/K)^{-1/2}
    std::vector<long> band_counts;   // worst branching count per band over sampled centers
    std::vector<double> tail_bounds; // remaining oscillation bound from band k0 on
    double oscillation_constant = 0.0;
};

/// Finite numeric certificate that Lipschitz-normalized functions have
/// uniformly bounded oscillation on a linearly recurrent subshift: the
/// recurrence constant is estimated from return words and frequencies, the
/// per-band branching counts are verified against their combinatorial
/// limit, and the geometric tail of the fiber-component bounds is printed.
inline LrCertificate lr_certificate(const LanguageTable& table, const MeasureAssignment& m,
                                    const std::string& sample, int scan_levels, int bands,
                                    std::uint64_t seed = 20240817) {
    LrCertificate cert;
    scan_levels = std::min(scan_levels, table.max_level);
    bool stable = true;
    for (int n = 1; n <= scan_levels; ++n)
        for (const auto& w : table.levels[static_cast<std::size_t>(n)]) {
            const auto scan = return_words(sample, w, sample.size());
            if (!scan.stable) stable = false;
            for (const auto& r : scan.words)
                cert.K_scan = std::max(cert.K_scan,
                                       static_cast<double>(r.size()) / static_cast<double>(w.size()));
        }
    cert.scan_stable = stable;
    for (int n = 1; n <= table.max_level; ++n)
        for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i) {
            const double nmu = n * m.value(n, static_cast<int>(i));
            cert.K_freq = std::max({cert.K_freq, nmu, 1.0 / nmu});
        }
    cert.K_hat = std::max(cert.K_scan, cert.K_freq);
    const long K_int = static_cast<long>(std::ceil(cert.K_hat - 1e-9));
    cert.band_limit = K_int * (K_int + 1) * (K_int + 1);
    cert.rate = std::pow(1.0 + 1.0 / cert.K_hat, -0.5);

    double worst_R = 0.0;
    for (int n = 0; n < table.max_level; ++n)
        for (std::size_t i = 0; i < table.levels[static_cast<std::size_t>(n)].size(); ++i)
            if (table.special[static_cast<std::size_t>(n)][i])
                worst_R = std::max(worst_R, ratio_R(table, m, n, static_cast<int>(i)));
    cert.C0 = std::sqrt(worst_R * ratio_R(table, m, 0, 0));
    cert.C = cert.C0 * std::sqrt(cert.K_hat) * std::sqrt(1.0 + 1.0 / cert.K_hat);

    // branching counts per band along sampled centered windows
    const double growth = 1.0 + 1.0 / cert.K_hat;
    std::mt19937_64 rng(seed);
    const int deepest = table.max_level - 1;
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(deepest),
                                                    sample.size() - static_cast<std::size_t>(deepest) - 1);
    cert.band_counts.assign(static_cast<std::size_t>(bands), 0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t center = pick(rng);
        for (int k = 0; k < bands; ++k) {
            const double lo = std::pow(growth, k);
            const double hi = std::pow(growth, k + 1);
            long count = 0;
            for (int n = std::max(1, static_cast<int>(std::ceil(lo))); n < hi && n <= deepest; ++n) {
                const long start = static_cast<long>(center) + window_left(n);
                const Word w = sample.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(n));
                const int id = table.index_of(n, w);
                if (id < 0) throw consistency_error("lr_certificate: sampled window is not admissible");
                if (table.special[static_cast<std::size_t>(n)][static_cast<std::size_t>(id)]) ++count;
            }
            cert.band_counts[static_cast<std::size_t>(k)] =
                std::max(cert.band_counts[static_cast<std::size_t>(k)], count);
        }
    }
    for (long c : cert.band_counts)
        if (c > cert.band_limit)
            throw consistency_error("lr_certificate: band count exceeds the recurrence limit; re-estimate K");

    for (int k0 = 0; k0 <= bands; ++k0)
        cert.tail_bounds.push_back(static_cast<double>(cert.band_limit) * cert.C *
                                   std::pow(cert.rate, k0) / (1.0 - cert.rate));
    cert.oscillation_constant = cert.tail_bounds.front();
    return cert;
}

} // namespace specshift
