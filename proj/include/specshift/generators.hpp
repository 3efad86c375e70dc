#pragma once

#include <Eigen/Dense>
#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "specshift/continued_fraction.hpp"
#include "specshift/errors.hpp"
#include "specshift/words.hpp"

namespace specshift {

// ---------------------------------------------------------------------------
// Shifts of finite type
// ---------------------------------------------------------------------------

/// Finite directed graph whose bi-infinite edge paths form the subshift.
/// Edge labels are the alphabet and must be distinct single characters.
struct SftGraph {
    struct Edge {
        char label;
        int from;  // 1-based vertex
        int to;
    };

    int vertex_count = 0;
    std::vector<Edge> edges;
    Eigen::MatrixXd incidence;  // counts, recomputed from the edges
    bool irreducible = false;
    bool aperiodic = false;  // here: the path space is infinite

    static SftGraph from_edges(int vertices, std::vector<Edge> edge_list) {
        if (vertices < 1) throw validation_error("sft: need at least one vertex");
        SftGraph g;
        g.vertex_count = vertices;
        g.edges = std::move(edge_list);
        std::set<char> labels;
        g.incidence = Eigen::MatrixXd::Zero(vertices, vertices);
        for (const auto& e : g.edges) {
            if (e.from < 1 || e.from > vertices || e.to < 1 || e.to > vertices)
                throw validation_error("sft: edge endpoint out of range");
            if (!labels.insert(e.label).second)
                throw validation_error("sft: duplicate edge label");
            g.incidence(e.from - 1, e.to - 1) += 1.0;
        }
        g.irreducible = g.check_irreducible();
        g.aperiodic = g.check_infinite();
        return g;
    }

    const Edge& edge_by_label(char c) const {
        for (const auto& e : edges)
            if (e.label == c) return e;
        throw validation_error(std::string("sft: unknown edge label '") + c + "'");
    }

    void require_usable() const {
        if (!irreducible) throw validation_error("sft: graph is not irreducible");
        if (!aperiodic) throw validation_error("sft: path space is finite (single cycle)");
    }

    /// All edge paths of length n, as label strings.
    std::vector<Word> factors(int n) const {
        require_usable();
        if (n == 0) return {Word{}};
        std::vector<Word> cur;
        std::vector<int> ends;  // terminal vertex per word in `cur`
        for (const auto& e : edges) {
            cur.push_back(Word(1, e.label));
            ends.push_back(e.to);
        }
        for (int len = 2; len <= n; ++len) {
            std::vector<Word> next;
            std::vector<int> next_ends;
            for (std::size_t i = 0; i < cur.size(); ++i)
                for (const auto& e : edges)
                    if (e.from == ends[i]) {
                        next.push_back(cur[i] + e.label);
                        next_ends.push_back(e.to);
                    }
            cur = std::move(next);
            ends = std::move(next_ends);
        }
        std::sort(cur.begin(), cur.end());
        return cur;
    }

    /// Exact number of paths of length n (the sum of all entries of the
    /// n-th power of the incidence matrix).
    mpz_class factor_count(int n) const {
        require_usable();
        if (n == 0) return 1;
        const int I = vertex_count;
        std::vector<std::vector<mpz_class>> A(I, std::vector<mpz_class>(I, 0)), P;
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < I; ++j) A[i][j] = static_cast<long>(incidence(i, j));
        P = A;
        for (int step = 1; step < n; ++step) {
            std::vector<std::vector<mpz_class>> R(I, std::vector<mpz_class>(I, 0));
            for (int i = 0; i < I; ++i)
                for (int k = 0; k < I; ++k)
                    if (P[i][k] != 0)
                        for (int j = 0; j < I; ++j) R[i][j] += P[i][k] * A[k][j];
            P = std::move(R);
        }
        mpz_class total = 0;
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < I; ++j) total += P[i][j];
        return total;
    }

private:
    bool check_irreducible() const {
        const int I = vertex_count;
        auto reach = [&](bool forward) {
            std::vector<std::vector<char>> r(I, std::vector<char>(I, 0));
            for (int s = 0; s < I; ++s) {
                std::deque<int> bfs{s};
                std::vector<char> seen(I, 0);
                while (!bfs.empty()) {
                    int v = bfs.front();
                    bfs.pop_front();
                    for (const auto& e : edges) {
                        int a = forward ? e.from - 1 : e.to - 1;
                        int b = forward ? e.to - 1 : e.from - 1;
                        if (a == v && !seen[b]) {
                            seen[b] = 1;
                            bfs.push_back(b);
                        }
                    }
                }
                for (int tgt = 0; tgt < I; ++tgt) r[s][tgt] = seen[tgt];
            }
            return r;
        };
        auto fwd = reach(true);
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < I; ++j)
                if (!fwd[i][j]) return false;
        return true;
    }

    // An irreducible graph carries infinitely many paths iff some vertex
    // has two outgoing edges (two distinct cycles through a common vertex).
    bool check_infinite() const {
        if (!irreducible && !check_irreducible()) return false;
        std::vector<int> outdeg(vertex_count, 0);
        for (const auto& e : edges) outdeg[e.from - 1]++;
        for (int d : outdeg)
            if (d >= 2) return true;
        return false;
    }
};

/// Perron eigendata of the incidence matrix, normalised so that the right
/// eigenvector sums to one and the two eigenvectors pair to one.
struct PerronData {
    double lambda = 0.0;
    Eigen::VectorXd left;   // u
    Eigen::VectorXd right;  // v
};

inline PerronData perron(const SftGraph& g) {
    g.require_usable();
    const Eigen::MatrixXd A = g.incidence;
    const int I = g.vertex_count;
    // Power iteration on A + I; the shift removes incidence periodicity
    // without changing the eigenvectors.
    const Eigen::MatrixXd B = A + Eigen::MatrixXd::Identity(I, I);
    auto iterate = [&](const Eigen::MatrixXd& M) {
        Eigen::VectorXd x = Eigen::VectorXd::Ones(I);
        double rho = 0.0;
        for (int it = 0; it < 200000; ++it) {
            Eigen::VectorXd y = M * x;
            rho = x.dot(y) / x.dot(x);
            y /= y.sum();
            if ((M * y - rho * y).lpNorm<Eigen::Infinity>() <= 1e-14 * rho) return y;
            x = y;
        }
        throw precision_error("perron: power iteration did not converge");
    };
    PerronData pd;
    pd.right = iterate(B);
    pd.left = iterate(B.transpose());
    pd.lambda = pd.right.dot(A * pd.right) / pd.right.dot(pd.right);
    pd.right /= pd.right.sum();
    pd.left /= pd.left.dot(pd.right);
    const double res_r = (A * pd.right - pd.lambda * pd.right).lpNorm<Eigen::Infinity>();
    const double res_l = (A.transpose() * pd.left - pd.lambda * pd.left).lpNorm<Eigen::Infinity>();
    if (res_r > 1e-12 * pd.lambda || res_l > 1e-12 * pd.lambda)
        throw consistency_error("perron: eigenvector residual above tolerance");
    if (pd.right.minCoeff() <= 0 || pd.left.minCoeff() <= 0)
        throw consistency_error("perron: eigenvector has a nonpositive entry");
    return pd;
}

/// A path sampled from the maximal-entropy Markov chain of the graph; the
/// word frequencies along it converge to the Parry measure.
inline std::string sample_max_entropy_path(const SftGraph& g, const PerronData& pd,
                                           std::size_t length, std::uint64_t seed) {
    g.require_usable();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // stationary vertex distribution u_j v_j
    int vertex = 1;
    {
        double r = unif(rng), acc = 0.0;
        for (int j = 0; j < g.vertex_count; ++j) {
            acc += pd.left(j) * pd.right(j);
            if (r <= acc) {
                vertex = j + 1;
                break;
            }
        }
    }
    std::string out;
    out.reserve(length);
    while (out.size() < length) {
        double r = unif(rng), acc = 0.0;
        const SftGraph::Edge* chosen = nullptr;
        for (const auto& e : g.edges) {
            if (e.from != vertex) continue;
            acc += pd.right(e.to - 1) / (pd.lambda * pd.right(vertex - 1));
            if (r <= acc) {
                chosen = &e;
                break;
            }
        }
        if (!chosen) {  // numerical slack: take the last admissible edge
            for (const auto& e : g.edges)
                if (e.from == vertex) chosen = &e;
        }
        out.push_back(chosen->label);
        vertex = chosen->to;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Primitive substitutions
// ---------------------------------------------------------------------------

struct Substitution {
    std::map<char, std::string> rules;

    static Substitution from_rules(std::map<char, std::string> r) {
        Substitution s;
        s.rules = std::move(r);
        if (s.rules.empty()) throw validation_error("substitution: empty rule set");
        for (const auto& [c, img] : s.rules) {
            if (img.empty()) throw validation_error("substitution: empty image");
            for (char x : img)
                if (!s.rules.count(x))
                    throw validation_error("substitution: image uses a letter without a rule");
        }
        if (!s.primitive())
            throw validation_error("substitution: not primitive");
        return s;
    }

    std::vector<char> alphabet() const {
        std::vector<char> a;
        for (const auto& [c, _] : rules) a.push_back(c);
        return a;
    }

    /// Letter-count matrix M(x, y) = occurrences of x in the image of y.
    Eigen::MatrixXi abelianization() const {
        const auto alpha = alphabet();
        const int d = static_cast<int>(alpha.size());
        Eigen::MatrixXi M = Eigen::MatrixXi::Zero(d, d);
        for (int y = 0; y < d; ++y)
            for (char c : rules.at(alpha[static_cast<std::size_t>(y)]))
                for (int x = 0; x < d; ++x)
                    if (alpha[static_cast<std::size_t>(x)] == c) M(x, y)++;
        return M;
    }

    /// Some power of the abelianization is entrywise positive; the exponent
    /// d^2 is a sufficient bound at this alphabet size.
    bool primitive() const {
        const auto M = abelianization();
        const int d = static_cast<int>(M.rows());
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> P(d, d), R(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) P(i, j) = M(i, j) > 0;
        R = P;
        int power = 1;
        const int target = d * d;
        auto all_true = [&](const auto& X) {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    if (!X(i, j)) return false;
            return true;
        };
        auto boolmul = [&](const auto& X, const auto& Y) {
            Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> Z(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    bool v = false;
                    for (int k = 0; k < d && !v; ++k) v = X(i, k) && Y(k, j);
                    Z(i, j) = v;
                }
            return Z;
        };
        while (power < target) {
            if (all_true(R)) return true;
            R = boolmul(R, P);
            ++power;
        }
        return all_true(R);
    }

    std::string apply(const std::string& w) const {
        std::string out;
        for (char c : w) out += rules.at(c);
        return out;
    }

    /// Length-n factors of the substitution language: iterate letter images
    /// until the collected factor set stops growing.
    std::vector<Word> factors(int n) const {
        if (n == 0) return {Word{}};
        const auto alpha = alphabet();
        std::map<char, std::string> image;
        for (char c : alpha) image[c] = std::string(1, c);
        std::set<Word> found;
        const std::size_t length_cap = 1u << 24;
        int stable_rounds = 0;
        for (int round = 0; round < 64; ++round) {
            for (auto& [c, img] : image)
                if (img.size() < length_cap) img = apply(img);
            const std::size_t before = found.size();
            bool long_enough = true;
            for (const auto& [c, img] : image) {
                if (img.size() < static_cast<std::size_t>(n)) {
                    long_enough = false;
                    continue;
                }
                for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= img.size(); ++i)
                    found.insert(img.substr(i, static_cast<std::size_t>(n)));
            }
            if (long_enough && found.size() == before)
                ++stable_rounds;
            else
                stable_rounds = 0;
            if (stable_rounds >= 2) return {found.begin(), found.end()};
        }
        throw consistency_error("substitution: factor set did not stabilize");
    }

    /// A long admissible prefix; a genuine fixed-point prefix when some
    /// letter starts its own image.
    std::string sample_prefix(std::size_t length) const {
        char seed = alphabet().front();
        for (const auto& [c, img] : rules)
            if (img.front() == c) {
                seed = c;
                break;
            }
        std::string w(1, seed);
        while (w.size() < length) {
            w = apply(w);
            if (w.size() > (1u << 28))
                throw validation_error("substitution: sample too long to materialize");
        }
        return w.substr(0, length);
    }
};

// ---------------------------------------------------------------------------
// Sturmian languages via standard words
// ---------------------------------------------------------------------------

/// Prefix of the characteristic word, built from the standard-word
/// recurrence; a one-sided sample of the subshift for Birkhoff counting.
inline std::string sturmian_sample_prefix(const ContinuedFraction& cf, std::size_t length) {
    mpz_class a1 = cf.quotient(1);
    if (a1 > 1024) throw validation_error("sturmian_sample_prefix: quotients too large to materialize");
    std::string prev = "0";
    std::string cur(a1.get_ui() - 1, '0');
    cur += '1';
    for (int k = 1; k < cf.order() && cur.size() < length; ++k) {
        const mpz_class& a = cf.quotient(k + 1);
        if (mpz_class(a * static_cast<long>(cur.size()) + static_cast<long>(prev.size())) >
            static_cast<long>(4 * length))
            break;
        std::string next;
        next.reserve(a.get_ui() * cur.size() + prev.size());
        for (unsigned long rep = 0; rep < a.get_ui(); ++rep) {
            next += cur;
            if (next.size() >= 2 * length) break;
        }
        next += prev;
        prev = cur;
        cur = std::move(next);
    }
    if (cur.size() < length)
        throw precision_error("sturmian_sample_prefix: not enough partial quotients for this length");
    return cur.substr(0, length);
}

/// Exact length-n factor set of the Sturmian subshift with the given
/// parameter, collected from standard words s_{k+1} = s_k^{a_{k+1}} s_{k-1}
/// until the factor set stabilizes.  No real arithmetic is involved.
inline std::vector<Word> sturmian_factors(const ContinuedFraction& cf, int n) {
    if (n < 0) throw validation_error("sturmian_factors: negative length");
    if (n == 0) return {Word{}};
    const std::size_t length_cap = 1u << 26;
    mpz_class a1 = cf.quotient(1);
    if (a1 > 1024) throw validation_error("sturmian_factors: quotients too large to materialize words");
    std::string prev = "0";                                  // s_0
    std::string cur(a1.get_ui() - 1, '0');                   // s_1 = 0^{a_1 - 1} 1
    cur += '1';
    auto collect = [&](const std::string& s) {
        std::set<Word> f;
        if (s.size() >= static_cast<std::size_t>(n))
            for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= s.size(); ++i)
                f.insert(s.substr(i, static_cast<std::size_t>(n)));
        return f;
    };
    std::set<Word> factors = collect(cur);
    for (int k = 1; k < cf.order(); ++k) {
        const mpz_class& a = cf.quotient(k + 1);
        if (mpz_class(a * static_cast<long>(cur.size()) + static_cast<long>(prev.size())) >
            static_cast<long>(length_cap))
            throw validation_error("sturmian_factors: standard word too large to materialize");
        std::string next;
        next.reserve(a.get_ui() * cur.size() + prev.size());
        for (unsigned long rep = 0; rep < a.get_ui(); ++rep) next += cur;
        next += prev;
        prev = cur;
        cur = std::move(next);
        auto f = collect(cur);
        if (!factors.empty() && f == factors && cur.size() >= static_cast<std::size_t>(n) + prev.size())
            return {f.begin(), f.end()};
        factors = std::move(f);
    }
    throw precision_error("sturmian_factors: factor set did not stabilize; supply more partial quotients");
}

} // namespace specshift
