#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <string>
#include <vector>

#include "specshift/errors.hpp"
#include "specshift/measures.hpp"
#include "specshift/words.hpp"

namespace specshift {

// ---------------------------------------------------------------------------
// Eigenvalue sequences for the Dirac operator
// ---------------------------------------------------------------------------

struct AlphaSequence {
    std::vector<double> values;  // alpha_0 .. alpha_max

    static AlphaSequence linear(int max_level) { return powers(max_level, 1.0); }
    static AlphaSequence quadratic(int max_level) { return powers(max_level, 2.0); }

    static AlphaSequence powers(int max_level, double exponent) {
        AlphaSequence a;
        for (int n = 0; n <= max_level; ++n)
            a.values.push_back(std::pow(static_cast<double>(n), exponent));
        a.validate();
        return a;
    }

    static AlphaSequence custom(std::vector<double> v) {
        AlphaSequence a;
        a.values = std::move(v);
        a.validate();
        return a;
    }

    void validate() const {
        if (values.empty() || values[0] < 0)
            throw validation_error("alpha: need a nonnegative starting value");
        for (std::size_t n = 1; n < values.size(); ++n)
            if (!(values[n] > values[n - 1]))
                throw validation_error("alpha: eigenvalue sequence must be strictly increasing");
    }

    double at(int n) const {
        if (n < 0 || n >= static_cast<int>(values.size()))
            throw validation_error("alpha: level out of range");
        return values[static_cast<std::size_t>(n)];
    }
};

// ---------------------------------------------------------------------------
// The truncated representation space
// ---------------------------------------------------------------------------

/// The span of the top-level cylinder indicators with the orthonormal basis
/// e_w = indicator(w)/sqrt(mu(w)).  Masses of coarser cylinders are fiber
/// sums of the top-level masses, so refinement additivity holds exactly in
/// every identity computed here, whatever the measure source.
struct TruncatedSpace {
    const LanguageTable* table = nullptr;
    int level = 0;  // truncation depth N
    std::vector<double> weight;       // top-level masses
    std::vector<double> sqrt_weight;
    std::vector<std::vector<int>> ancestor;           // [n][w]: id of the level-n ancestor
    std::vector<std::vector<double>> mass;            // [n][id]: fiber-summed mass
    std::vector<std::vector<std::vector<int>>> fiber; // [n][id]: top-level ids below

    int dim() const { return static_cast<int>(weight.size()); }
    const Word& word(int id) const { return table->levels[static_cast<std::size_t>(level)][static_cast<std::size_t>(id)]; }
    double coarse_mass(int n, int id) const { return mass[static_cast<std::size_t>(n)][static_cast<std::size_t>(id)]; }
};

inline TruncatedSpace make_space(const LanguageTable& table, const std::vector<double>& top_weights,
                                 int N) {
    if (N < 0 || N > table.max_level)
        throw validation_error("make_space: truncation level outside the table");
    const std::size_t dim = table.levels[static_cast<std::size_t>(N)].size();
    if (top_weights.size() != dim)
        throw validation_error("make_space: weight vector does not match the level");
    TruncatedSpace s;
    s.table = &table;
    s.level = N;
    s.weight = top_weights;
    s.sqrt_weight.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(s.weight[i] > 0)) throw validation_error("make_space: nonpositive mass");
        s.sqrt_weight[i] = std::sqrt(s.weight[i]);
    }
    s.ancestor.assign(static_cast<std::size_t>(N) + 1, {});
    s.mass.assign(static_cast<std::size_t>(N) + 1, {});
    s.fiber.assign(static_cast<std::size_t>(N) + 1, {});
    s.ancestor[static_cast<std::size_t>(N)].resize(dim);
    for (std::size_t i = 0; i < dim; ++i) s.ancestor[static_cast<std::size_t>(N)][i] = static_cast<int>(i);
    for (int n = N - 1; n >= 0; --n) {
        s.ancestor[static_cast<std::size_t>(n)].resize(dim);
        for (std::size_t i = 0; i < dim; ++i)
            s.ancestor[static_cast<std::size_t>(n)][i] =
                table.parent[static_cast<std::size_t>(n) + 1]
                            [static_cast<std::size_t>(s.ancestor[static_cast<std::size_t>(n) + 1][i])];
    }
    for (int n = 0; n <= N; ++n) {
        const std::size_t cnt = table.levels[static_cast<std::size_t>(n)].size();
        s.mass[static_cast<std::size_t>(n)].assign(cnt, 0.0);
        s.fiber[static_cast<std::size_t>(n)].assign(cnt, {});
        for (std::size_t i = 0; i < dim; ++i) {
            const int a = s.ancestor[static_cast<std::size_t>(n)][i];
            s.mass[static_cast<std::size_t>(n)][static_cast<std::size_t>(a)] += s.weight[i];
            s.fiber[static_cast<std::size_t>(n)][static_cast<std::size_t>(a)].push_back(static_cast<int>(i));
        }
    }
    return s;
}

inline TruncatedSpace make_space(const LanguageTable& table, const MeasureAssignment& m, int N) {
    if (N < 0 || N >= static_cast<int>(m.mu.size()))
        throw validation_error("make_space: measure does not reach the requested level");
    return make_space(table, m.mu[static_cast<std::size_t>(N)], N);
}

/// A function constant on top-level cylinders, stored by its values.
struct LevelFunction {
    Eigen::VectorXd values;
};

inline Eigen::VectorXd to_coords(const TruncatedSpace& s, const LevelFunction& f) {
    Eigen::VectorXd x(s.dim());
    for (int i = 0; i < s.dim(); ++i) x(i) = f.values(i) * s.sqrt_weight[static_cast<std::size_t>(i)];
    return x;
}

inline LevelFunction from_coords(const TruncatedSpace& s, const Eigen::VectorXd& x) {
    LevelFunction f;
    f.values.resize(s.dim());
    for (int i = 0; i < s.dim(); ++i) f.values(i) = x(i) / s.sqrt_weight[static_cast<std::size_t>(i)];
    return f;
}

inline LevelFunction indicator(const TruncatedSpace& s, int level, int id) {
    LevelFunction f;
    f.values = Eigen::VectorXd::Zero(s.dim());
    for (int i : s.fiber[static_cast<std::size_t>(level)][static_cast<std::size_t>(id)]) f.values(i) = 1.0;
    return f;
}

inline double inner(const TruncatedSpace& s, const LevelFunction& f, const LevelFunction& g) {
    double acc = 0.0;
    for (int i = 0; i < s.dim(); ++i) acc += f.values(i) * g.values(i) * s.weight[static_cast<std::size_t>(i)];
    return acc;
}

inline double l2_norm(const TruncatedSpace& s, const LevelFunction& f) {
    return std::sqrt(std::max(0.0, inner(s, f, f)));
}

inline double sup_norm(const LevelFunction& f) { return f.values.lpNorm<Eigen::Infinity>(); }

/// Best constant-offset sup norm: half the value spread.
inline double oscillation_norm(const LevelFunction& f) {
    return (f.values.maxCoeff() - f.values.minCoeff()) / 2.0;
}

/// Whether the values are constant on level-n fibers, i.e. the function
/// lies in the n-th space of the flag.
inline bool lies_in_level(const TruncatedSpace& s, const LevelFunction& f, int n, double tol = 1e-10) {
    for (const auto& fib : s.fiber[static_cast<std::size_t>(n)]) {
        for (std::size_t k = 1; k < fib.size(); ++k)
            if (std::abs(f.values(fib[k]) - f.values(fib[0])) > tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Projections and the Dirac operator
// ---------------------------------------------------------------------------

/// Conditional expectation onto the level-n subspace, applied in the
/// orthonormal coordinates.
inline Eigen::VectorXd apply_projection(const TruncatedSpace& s, int n, const Eigen::VectorXd& x) {
    if (n < 0 || n > s.level) throw validation_error("apply_projection: level out of range");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(s.dim());
    const auto& fibers = s.fiber[static_cast<std::size_t>(n)];
    for (std::size_t a = 0; a < fibers.size(); ++a) {
        double acc = 0.0;
        for (int i : fibers[a]) acc += s.sqrt_weight[static_cast<std::size_t>(i)] * x(i);
        acc /= s.mass[static_cast<std::size_t>(n)][a];
        for (int i : fibers[a]) out(i) = s.sqrt_weight[static_cast<std::size_t>(i)] * acc;
    }
    return out;
}

inline constexpr int kDenseDimLimit = 2100;

inline Eigen::MatrixXd projection_matrix(const TruncatedSpace& s, int n) {
    if (s.dim() > kDenseDimLimit)
        throw validation_error("projection_matrix: space too large for a dense matrix");
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(s.dim(), s.dim());
    const auto& fibers = s.fiber[static_cast<std::size_t>(n)];
    for (std::size_t a = 0; a < fibers.size(); ++a)
        for (int i : fibers[a])
            for (int j : fibers[a])
                P(i, j) = s.sqrt_weight[static_cast<std::size_t>(i)] *
                          s.sqrt_weight[static_cast<std::size_t>(j)] /
                          s.mass[static_cast<std::size_t>(n)][a];
    return P;
}

inline Eigen::VectorXd apply_dirac(const TruncatedSpace& s, const AlphaSequence& alpha,
                                   const Eigen::VectorXd& x) {
    Eigen::VectorXd out = alpha.at(s.level) * x;
    Eigen::VectorXd p;
    for (int n = 0; n < s.level; ++n) {
        p = apply_projection(s, n, x);
        out -= (alpha.at(n + 1) - alpha.at(n)) * p;
    }
    return out;
}

inline Eigen::MatrixXd dirac_matrix(const TruncatedSpace& s, const AlphaSequence& alpha) {
    if (s.dim() > kDenseDimLimit)
        throw validation_error("dirac_matrix: space too large for a dense matrix");
    Eigen::MatrixXd D = alpha.at(s.level) * Eigen::MatrixXd::Identity(s.dim(), s.dim());
    for (int n = 0; n < s.level; ++n)
        D -= (alpha.at(n + 1) - alpha.at(n)) * projection_matrix(s, n);
    return D;
}

inline double operator_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

/// Matrix of [D, M_f] on the truncated space; because f lives at or below
/// the truncation level, this is the full commutator of the multiplication
/// operator, so the largest singular value is its exact operator norm.
inline Eigen::MatrixXd commutator_matrix(const TruncatedSpace& s, const AlphaSequence& alpha,
                                         const LevelFunction& f) {
    Eigen::MatrixXd C = dirac_matrix(s, alpha);
    for (int i = 0; i < s.dim(); ++i)
        for (int j = 0; j < s.dim(); ++j) C(i, j) *= f.values(j) - f.values(i);
    return C;
}

inline double lip_seminorm(const TruncatedSpace& s, const AlphaSequence& alpha,
                           const LevelFunction& f) {
    return operator_norm(commutator_matrix(s, alpha, f));
}

// ---------------------------------------------------------------------------
// The branching calculus: eta, zeta, and the fiber projections Q_w
// ---------------------------------------------------------------------------

/// eta(w) = (mu(pi(w))/mu(w)) indicator(w) - indicator(pi(w)).  Zero (and
/// flagged) when the parent does not branch.
inline LevelFunction eta_function(const TruncatedSpace& s, int level, int id,
                                  bool* degenerate = nullptr) {
    if (level < 1 || level > s.level) throw validation_error("eta: level out of range");
    const int pid = s.table->parent[static_cast<std::size_t>(level)][static_cast<std::size_t>(id)];
    if (degenerate) *degenerate = false;
    LevelFunction f;
    f.values = Eigen::VectorXd::Zero(s.dim());
    if (!s.table->special[static_cast<std::size_t>(level) - 1][static_cast<std::size_t>(pid)]) {
        if (degenerate) *degenerate = true;
        return f;
    }
    const double ratio = s.coarse_mass(level - 1, pid) / s.coarse_mass(level, id);
    for (int i : s.fiber[static_cast<std::size_t>(level) - 1][static_cast<std::size_t>(pid)])
        f.values(i) = (s.ancestor[static_cast<std::size_t>(level)][static_cast<std::size_t>(i)] == id)
                          ? ratio - 1.0
                          : -1.0;
    return f;
}

/// zeta(w) = mu(pi(w))^{-1} (D - alpha_{n+1}) indicator(pi(w)), a vector of
/// the level-n space pairing with eta(w) in the rank-two commutator.
inline LevelFunction zeta_function(const TruncatedSpace& s, const AlphaSequence& alpha, int level,
                                   int id) {
    if (level < 1 || level > s.level) throw validation_error("zeta: level out of range");
    const int pid = s.table->parent[static_cast<std::size_t>(level)][static_cast<std::size_t>(id)];
    const Eigen::VectorXd xi = to_coords(s, indicator(s, level - 1, pid));
    Eigen::VectorXd y = apply_dirac(s, alpha, xi) - alpha.at(level) * xi;
    y /= s.coarse_mass(level - 1, pid);
    return from_coords(s, y);
}

/// Q_w(f) = indicator(w) (P_{n+1} f - P_n f): the component of f in the
/// branching fiber above w.
inline LevelFunction q_component(const TruncatedSpace& s, int level, int id,
                                 const LevelFunction& f) {
    if (level + 1 > s.level) throw validation_error("q_component: refinement level above truncation");
    const Eigen::VectorXd x = to_coords(s, f);
    const Eigen::VectorXd diff = apply_projection(s, level + 1, x) - apply_projection(s, level, x);
    LevelFunction g = from_coords(s, diff);
    for (int i = 0; i < s.dim(); ++i)
        if (s.ancestor[static_cast<std::size_t>(level)][static_cast<std::size_t>(i)] != id)
            g.values(i) = 0.0;
    return g;
}

/// Largest mass ratio of the word against its refinements, from the space's
/// own fiber masses.
inline double branch_ratio(const TruncatedSpace& s, int level, int id) {
    if (level + 1 > s.level) throw validation_error("branch_ratio: refinements above truncation");
    double worst = 0.0;
    const auto& kids = s.table->children[static_cast<std::size_t>(level)][static_cast<std::size_t>(id)];
    for (int c : kids)
        worst = std::max(worst, s.coarse_mass(level, id) / s.coarse_mass(level + 1, c));
    return worst;
}

struct NormComparison {
    double l2 = 0.0;
    double sup = 0.0;
    double middle = 0.0;  // sqrt(mu(w)) * sup
    double upper = 0.0;   // sqrt(R(w)) * l2
    bool lower_ok = false;
    bool upper_ok = false;
};

/// The two-sided comparison of the L2 and sup norms on the branching fiber
/// F_w; rejects functions outside that fiber.
inline NormComparison fiber_norm_comparison(const TruncatedSpace& s, int level, int id,
                                            const LevelFunction& f, double tol = 1e-10) {
    if (level + 1 > s.level) throw validation_error("fiber_norm_comparison: level above truncation");
    for (int i = 0; i < s.dim(); ++i)
        if (s.ancestor[static_cast<std::size_t>(level)][static_cast<std::size_t>(i)] != id &&
            std::abs(f.values(i)) > tol)
            throw validation_error("fiber_norm_comparison: function not supported on the word");
    if (!lies_in_level(s, f, level + 1, tol))
        throw validation_error("fiber_norm_comparison: function not constant on the refinements");
    const LevelFunction xi = indicator(s, level, id);
    if (std::abs(inner(s, f, xi)) > tol * std::max(1.0, l2_norm(s, f)))
        throw validation_error("fiber_norm_comparison: function not orthogonal to the word");
    NormComparison cmp;
    cmp.l2 = l2_norm(s, f);
    cmp.sup = sup_norm(f);
    cmp.middle = std::sqrt(s.coarse_mass(level, id)) * cmp.sup;
    cmp.upper = std::sqrt(branch_ratio(s, level, id)) * cmp.l2;
    cmp.lower_ok = cmp.l2 <= cmp.middle + 1e-12;
    cmp.upper_ok = cmp.middle <= cmp.upper + 1e-12;
    return cmp;
}

// ---------------------------------------------------------------------------
// The shift operator between truncation levels
// ---------------------------------------------------------------------------

/// Matrix of the unitary induced by the shift, from the level-N space into
/// the level-(N+2) space of the same table.  The image of a level-N
/// indicator is the sum of the level-(N+2) indicators whose shifted window
/// restricts to the word, which is the substring at offset two.
inline Eigen::MatrixXd shift_matrix(const TruncatedSpace& deep, int N) {
    if (deep.level != N + 2)
        throw validation_error("shift_matrix: deep space must sit two levels above the domain");
    const auto& domain_words = deep.table->levels[static_cast<std::size_t>(N)];
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(deep.dim(), static_cast<int>(domain_words.size()));
    for (int v = 0; v < deep.dim(); ++v) {
        const Word& dv = deep.word(v);
        const Word target = dv.substr(2, static_cast<std::size_t>(N));
        const int w = deep.table->index_of(N, target);
        if (w < 0) throw consistency_error("shift_matrix: shifted restriction is not admissible");
        U(v, w) = std::sqrt(deep.weight[static_cast<std::size_t>(v)] / deep.coarse_mass(N, w));
    }
    return U;
}

/// Matrix of the plain inclusion of the level-N space into the deep space.
inline Eigen::MatrixXd inclusion_matrix(const TruncatedSpace& deep, int N) {
    if (deep.level != N + 2)
        throw validation_error("inclusion_matrix: deep space must sit two levels above the domain");
    const std::size_t cols = deep.table->levels[static_cast<std::size_t>(N)].size();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(deep.dim(), static_cast<int>(cols));
    for (int v = 0; v < deep.dim(); ++v) {
        const int w = deep.ancestor[static_cast<std::size_t>(N)][static_cast<std::size_t>(v)];
        J(v, w) = std::sqrt(deep.weight[static_cast<std::size_t>(v)] / deep.coarse_mass(N, w));
    }
    return J;
}

/// Worst deviation of the shift columns from unit length; zero exactly when
/// the masses are shift invariant.
inline double shift_isometry_defect(const Eigen::MatrixXd& U) {
    double worst = 0.0;
    for (int c = 0; c < U.cols(); ++c) worst = std::max(worst, std::abs(U.col(c).squaredNorm() - 1.0));
    return worst;
}

/// Exact norm of the commutator of D with the given embedding, restricted
/// to the level-N space.  For the shift this is a lower bound for the full
/// commutator norm, since the commutator does not vanish off the domain.
inline double embedded_commutator_norm(const TruncatedSpace& deep, const AlphaSequence& alpha,
                                       int N, const Eigen::MatrixXd& op) {
    const LanguageTable& table = *deep.table;
    TruncatedSpace shallow = make_space(table, deep.mass[static_cast<std::size_t>(N)], N);
    Eigen::MatrixXd M(deep.dim(), shallow.dim());
    for (int c = 0; c < shallow.dim(); ++c) M.col(c) = apply_dirac(deep, alpha, op.col(c));
    const Eigen::MatrixXd DN = dirac_matrix(shallow, alpha);
    M -= op * DN;
    return operator_norm(M);
}

inline double shift_commutator_restricted_norm(const LanguageTable& table,
                                               const MeasureAssignment& m,
                                               const AlphaSequence& alpha, int N) {
    if (N + 2 > table.max_level)
        throw validation_error("shift_commutator_restricted_norm: table too shallow");
    TruncatedSpace deep = make_space(table, m, N + 2);
    return embedded_commutator_norm(deep, alpha, N, shift_matrix(deep, N));
}

// ---------------------------------------------------------------------------
// Norms of rank-structured commutators
// ---------------------------------------------------------------------------

/// Exact operator norm of sum_k c_k (zeta_k (x) eta_k^* - eta_k (x) zeta_k^*)
/// computed inside the span of the given vectors; columns of `frame` are the
/// eta's followed by the zeta's, in orthonormal coordinates.
inline double rank_structured_commutator_norm(const Eigen::MatrixXd& frame,
                                              const std::vector<double>& coeffs) {
    const int K = static_cast<int>(coeffs.size());
    if (frame.cols() != 2 * K)
        throw validation_error("rank_structured_commutator_norm: frame/coefficient mismatch");
    Eigen::MatrixXd G = frame.transpose() * frame;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd half = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * K, 2 * K);
    for (int k = 0; k < K; ++k) {
        M(k, K + k) = -coeffs[static_cast<std::size_t>(k)];
        M(K + k, k) = coeffs[static_cast<std::size_t>(k)];
    }
    return operator_norm(half * M * half);
}

} // namespace specshift
