#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "specshift/analysis.hpp"
#include "specshift/verify.hpp"

using namespace specshift;

namespace {

const double kLogPhi = std::log((1.0 + std::sqrt(5.0)) / 2.0);

SftGraph golden_mean() {
    return SftGraph::from_edges(2, {{'a', 1, 1}, {'b', 1, 2}, {'c', 2, 1}});
}

std::vector<double> golden_counts(int N) {
    auto g = golden_mean();
    std::vector<double> counts{1.0};
    for (int n = 1; n <= N; ++n) counts.push_back(g.factor_count(n).get_d());
    return counts;
}

std::vector<double> sturmian_counts(int N) {
    std::vector<double> counts{1.0};
    for (int n = 1; n <= N; ++n) counts.push_back(n + 1.0);
    return counts;
}

} // namespace

TEST_CASE("heat-trace partial sums flip around the entropy") {
    auto counts = golden_counts(60);
    auto above = exp_summability(counts, kLogPhi + 0.2);
    CHECK(above.verdict == "converging");
    CHECK(above.evidence == "growth-margin");
    CHECK(above.terms.back() < 1e-5);
    for (std::size_t n = 30; n + 1 < above.terms.size(); ++n)
        CHECK(above.terms[n + 1] < above.terms[n]);

    auto below = exp_summability(counts, kLogPhi - 0.2);
    CHECK(below.verdict == "diverging");
    for (std::size_t n = 30; n + 1 < below.terms.size(); ++n)
        CHECK(below.terms[n + 1] > below.terms[n]);

    // zero-entropy languages converge for every positive exponent
    auto st = sturmian_counts(200);
    CHECK(exp_summability(st, 0.05).verdict == "converging");
    CHECK(exp_summability(st, 0.3).verdict == "converging");
}

TEST_CASE("power-trace partial sums flip around the complexity degree") {
    auto st = sturmian_counts(200);
    auto hi = power_summability(st, 1.5);
    CHECK(hi.verdict == "converging");
    CHECK(hi.growth_estimate == Approx(1.0).margin(0.1));
    auto lo = power_summability(st, 0.8);
    CHECK(lo.verdict == "diverging");

    // exponential complexity beats every polynomial weight
    auto gm = power_summability(golden_counts(60), 3.0);
    CHECK(gm.verdict == "diverging");
    for (std::size_t n = 20; n + 1 < gm.terms.size(); ++n) CHECK(gm.terms[n + 1] > gm.terms[n]);
}

TEST_CASE("only constants commute with the dirac operator") {
    {
        auto g = SftGraph::from_edges(1, {{'0', 1, 1}, {'1', 1, 1}});
        auto t = build_language([&](int n) { return g.factors(n); }, 4);
        auto m = parry_measure(g, perron(g), t);
        bool ambiguous = true;
        CHECK(commutant_dimension(make_space(t, m, 4), AlphaSequence::linear(4), &ambiguous) == 1);
        CHECK_FALSE(ambiguous);
    }
    {
        ContinuedFraction cf(std::vector<mpz_class>(40, 1));
        auto t = build_language([&](int n) { return sturmian_factors(cf, n); }, 6);
        auto m = sturmian_measure(cf, t);
        CHECK(commutant_dimension(make_space(t, m, 6), AlphaSequence::linear(6)) == 1);
    }
    {
        auto g = golden_mean();
        auto t = build_language([&](int n) { return g.factors(n); }, 5);
        auto m = parry_measure(g, perron(g), t);
        CHECK(commutant_dimension(make_space(t, m, 5), AlphaSequence::linear(5)) == 1);
    }
}

TEST_CASE("harmonically weighted branching witnesses on the golden mean") {
    auto g = golden_mean();
    auto t = build_language([&](int n) { return g.factors(n); }, 9);
    auto m = parry_measure(g, perron(g), t);
    auto rep = sft_fk_experiment(g, t, m, 4);

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(rep.cycle.cycle == "a");
    CHECK(rep.cycle.vertex == 1);
    CHECK(rep.ratio_a == Approx(phi).margin(1e-10));
    double H = 0.0;
    for (const auto& row : rep.rows) {
        H += 1.0 / row.K;
        CHECK(row.harmonic == Approx(H).margin(1e-12));
        CHECK(row.osc_lower == Approx((rep.ratio_a - 1.0) / 2.0 * H).margin(1e-12));
        CHECK(row.min_value <= 0.0);
        if (row.K > 1) CHECK(row.lip >= rep.rows[row.K - 2].lip - 1e-12);
    }
    // K = 3 oscillation lower bound from the closed form
    CHECK(rep.rows[2].osc_lower == Approx(0.56653).margin(5e-5));
}

TEST_CASE("nested projection identities along the cycle") {
    auto g = golden_mean();
    auto pd = perron(g);
    auto t = build_language([&](int n) { return g.factors(n); }, 13);
    auto m = parry_measure(g, pd, t);
    for (int k = 1; k <= 3; ++k) {
        auto checks = sft_projection_identities(g, pd, t, m, k);
        for (const auto& c : checks) {
            INFO(c.name << " at k=" << k);
            CHECK(c.defect < 1e-10);
        }
    }
}

TEST_CASE("sturmian witnesses: golden rotation stays small") {
    ContinuedFraction cf(std::vector<mpz_class>(48, 1));
    double prev = 1e9;
    for (int n = 2; n <= 6; ++n) {
        auto w = sturmian_witness(cf, n, n <= 5);
        CHECK(w.ratio_quantity < prev);
        prev = w.ratio_quantity;
        if (w.materialized) {
            CHECK(w.lip <= 1.0 + 1e-9);
            CHECK(w.osc == Approx(w.osc_predicted).margin(1e-12));
        }
    }
}

TEST_CASE("sturmian witnesses: fast quotients certify unbounded ratios") {
    auto ub = ContinuedFraction::unbounded_quotients(4);
    CHECK(ub.quotient(3) == 72);
    for (int n = 1; n <= 4; ++n) {
        auto w = sturmian_witness(ub, n);
        CHECK(w.ratio_lower >= mpq_class(n));
        CHECK(w.ratio_upper > w.ratio_lower);
        CHECK(mpz_class(ub.q(n) + ub.q(n - 1) - 1) == w.level);
    }
    // the depth-2 branching ratio sits between the quotient and its successor
    auto w2 = sturmian_witness(ub, 2);
    const mpq_class m1sq((w2.level + 1) * (w2.level + 1));
    CHECK(w2.ratio_lower * m1sq >= 72);
    CHECK(w2.ratio_upper * m1sq <= 73);
}

TEST_CASE("fiber component control for normalized functions") {
    auto g = SftGraph::from_edges(1, {{'0', 1, 1}, {'1', 1, 1}});
    auto t = build_language([&](int n) { return g.factors(n); }, 5);
    auto m = parry_measure(g, perron(g), t);
    auto space = make_space(t, m, 5);
    auto alpha = AlphaSequence::linear(5);

    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss;
    double worst_margin = 1e100, worst_defect = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        LevelFunction f;
        f.values.resize(space.dim());
        for (int i = 0; i < space.dim(); ++i) f.values(i) = gauss(rng);
        f.values /= lip_seminorm(space, alpha, f);
        for (int n = 1; n + 1 <= 5; ++n)
            for (int mm = 0; mm < n; ++mm) {
                auto q = qw_bound_check(space, alpha, f, n, 0, mm);
                worst_margin = std::min(worst_margin, q.margin);
                worst_defect = std::max(worst_defect,
                                        std::abs(q.pairing_lhs - q.pairing_rhs));
            }
    }
    CHECK(worst_margin >= -1e-10);
    CHECK(worst_defect < 1e-10);

    // the scaled branching function itself saturates the pairing identity
    bool deg = false;
    LevelFunction et = eta_function(space, 3, 0, &deg);
    REQUIRE_FALSE(deg);
    et.values /= lip_seminorm(space, alpha, et);
    auto q = qw_bound_check(space, alpha, et, 2, 0, 0);
    CHECK(std::abs(q.pairing_lhs - q.pairing_rhs) < 1e-10);
}

TEST_CASE("fiber control along the unique sturmian branching chain") {
    ContinuedFraction cf(std::vector<mpz_class>(48, 1));
    auto t = build_language([&](int n) { return sturmian_factors(cf, n); }, 8);
    auto m = sturmian_measure(cf, t);
    auto space = make_space(t, m, 8);
    auto alpha = AlphaSequence::linear(8);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 10; ++trial) {
        LevelFunction f;
        f.values.resize(space.dim());
        for (int i = 0; i < space.dim(); ++i) f.values(i) = gauss(rng);
        f.values /= lip_seminorm(space, alpha, f);
        for (int n = 1; n + 1 <= 8; ++n)
            for (std::size_t id = 0; id < t.count(n); ++id) {
                if (!t.special[n][id]) continue;
                for (int mm = 0; mm < n; ++mm) {
                    const int anc = ancestor_id(t, n, static_cast<int>(id), mm);
                    if (!t.special[mm][anc]) continue;
                    auto q = qw_bound_check(space, alpha, f, n, static_cast<int>(id), mm);
                    CHECK(q.margin >= -1e-10);
                    CHECK(std::abs(q.pairing_lhs - q.pairing_rhs) < 1e-10);
                }
            }
    }
}

TEST_CASE("sampled rotation numbers have polynomially bounded quotients") {
    // exact quotient extraction: the golden number's double approximation
    // starts with a long run of ones
    const auto fib = partial_quotients_of((std::sqrt(5.0) - 1.0) / 2.0, 12);
    REQUIRE(fib.size() == 12);
    for (const auto& a : fib) CHECK(a == 1);
    const auto silver = partial_quotients_of(std::sqrt(2.0) - 1.0, 10);
    for (const auto& a : silver) CHECK(a == 2);

    auto rep = bounded_quotient_check(200, 15, 1.5, 60.0, 20240817);
    CHECK(rep.fraction_within >= 0.8);
    CHECK(std::isfinite(rep.worst_ratio));
    // deterministic under the seed
    auto rep2 = bounded_quotient_check(200, 15, 1.5, 60.0, 20240817);
    CHECK(rep.worst_ratio == rep2.worst_ratio);
    CHECK(rep.fraction_within == rep2.fraction_within);
}

TEST_CASE("linear recurrence certificate for the fibonacci substitution") {
    auto sub = Substitution::from_rules({{'a', "ab"}, {'b', "a"}});
    auto t = build_language([&](int n) { return sub.factors(n); }, 12);
    const std::string sample = sub.sample_prefix(200000);
    auto m = empirical_measure(sample, t);
    auto cert = lr_certificate(t, m, sample, 8, 7);
    CHECK(cert.K_hat >= 1.0);
    CHECK(cert.K_hat <= 4.0);
    CHECK(cert.scan_stable);
    CHECK(cert.band_limit >= 1);
    for (long c : cert.band_counts) CHECK(c <= cert.band_limit);
    CHECK(std::isfinite(cert.oscillation_constant));
    for (std::size_t k = 1; k < cert.tail_bounds.size(); ++k) {
        CHECK(cert.tail_bounds[k] < cert.tail_bounds[k - 1]);
        CHECK(cert.tail_bounds[k] == Approx(cert.tail_bounds[k - 1] * cert.rate).epsilon(1e-12));
    }
}
