#include <catch2/catch.hpp>

#include <cmath>
#include <set>
#include <utility>

#include "specshift/generators.hpp"
#include "specshift/measures.hpp"

using namespace specshift;

namespace {

SftGraph golden_mean() {
    return SftGraph::from_edges(2, {{'a', 1, 1}, {'b', 1, 2}, {'c', 2, 1}});
}

SftGraph bernoulli() { return SftGraph::from_edges(1, {{'0', 1, 1}, {'1', 1, 1}}); }

LanguageTable table_of(const SftGraph& g, int N) {
    return build_language([&](int n) { return g.factors(n); }, N);
}

} // namespace

TEST_CASE("parry measure values") {
    auto g = golden_mean();
    auto t = table_of(g, 6);
    auto m = parry_measure(g, perron(g), t);
    CHECK(m.value(1, t.index_of(1, "a")) == Approx(0.4472135955).margin(1e-9));
    double mass = 0;
    for (std::size_t i = 0; i < t.count(1); ++i) mass += m.value(1, static_cast<int>(i));
    CHECK(mass == Approx(1.0).margin(1e-12));

    auto b = bernoulli();
    auto tb = table_of(b, 6);
    auto mb = parry_measure(b, perron(b), tb);
    for (int n = 1; n <= 6; ++n)
        for (std::size_t i = 0; i < tb.count(n); ++i)
            CHECK(mb.value(n, static_cast<int>(i)) == Approx(std::pow(2.0, -n)).margin(1e-12));
}

TEST_CASE("measure checks detect corruption") {
    auto g = golden_mean();
    auto t = table_of(g, 6);
    auto m = parry_measure(g, perron(g), t);
    CHECK(check_measure(t, m, 1e-10).ok);
    CHECK(branch_ratio_inequality_margin(t, m) >= -1e-12);

    m.mu[3][0] += 1e-3;
    auto rep = check_measure(t, m, 1e-10);
    CHECK_FALSE(rep.ok);
    CHECK(rep.worst_additivity_defect > 1e-4);
}

TEST_CASE("sturmian interval measure") {
    ContinuedFraction fib(std::vector<mpz_class>(40, 1));
    auto t = build_language([&](int n) { return sturmian_factors(fib, n); }, 20);
    auto m = sturmian_measure(fib, t);  // construction validates the value sets
    const double theta = (std::sqrt(5.0) - 1.0) / 2.0;
    CHECK(m.value(1, t.index_of(1, "1")) == Approx(theta).margin(1e-12));
    CHECK(check_measure(t, m, 1e-10).ok);

    // exact mass: coefficients of the level sum collapse to 1 + 0*theta
    for (int n = 1; n <= 20; ++n) {
        ThetaLinear total;
        for (const auto& v : m.exact[n]) total = total + v;
        CHECK(total.constant == 1);
        CHECK(total.slope == 0);
    }

    // at the block edges only the two short frequencies occur
    auto lam = fib.lambda(12);
    for (int k = 2; k <= 5; ++k) {
        const long mlen = mpz_class(fib.q(k) + fib.q(k - 1) - 1).get_si();
        std::set<std::pair<std::string, std::string>> distinct;
        for (const auto& v : m.exact[mlen])
            distinct.insert({v.constant.get_str(), v.slope.get_str()});
        CHECK(distinct.size() == 2);
        for (const auto& v : m.exact[mlen])
            CHECK((v == lam[k] || v == lam[k + 1]));
    }
}

TEST_CASE("branch ratios") {
    auto b = bernoulli();
    auto tb = table_of(b, 5);
    auto mb = parry_measure(b, perron(b), tb);
    for (int n = 0; n < 5; ++n)
        for (std::size_t i = 0; i < tb.count(n); ++i)
            CHECK(ratio_R(tb, mb, n, static_cast<int>(i)) == Approx(2.0).margin(1e-12));
    CHECK_THROWS_AS(ratio_R(tb, mb, 5, 0), validation_error);

    ContinuedFraction fib(std::vector<mpz_class>(40, 1));
    auto ts = build_language([&](int n) { return sturmian_factors(fib, n); }, 14);
    auto ms = sturmian_measure(fib, ts);
    for (int n = 1; n < 14; ++n)
        for (std::size_t i = 0; i < ts.count(n); ++i) {
            const double R = ratio_R(ts, ms, n, static_cast<int>(i));
            if (!ts.special[n][i]) {
                CHECK(R == Approx(1.0).margin(1e-12));
            } else {
                // The branching word's mass splits as lambda_{j+1} plus a
                // remainder that can drop to lambda_{j+2}, so the ratio is
                // controlled by the two quotients after the block of this
                // length.  (The smaller child beats lambda_{j+1} whenever
                // a_{j+1} = 1, which caps golden-rotation ratios at 1/(1-theta).)
                const auto rule = three_distance_rule(fib, n);
                const mpz_class a1 = fib.quotient(rule.n + 1);
                const mpz_class a2 = fib.quotient(rule.n + 2);
                const double bound = mpz_class((a1 > a2 ? a1 : a2) + 2).get_d();
                CHECK(R <= bound + 1e-9);
            }
        }
    // golden rotation: every branching ratio equals 1/(1-theta)
    const double phi2 = 1.0 / (1.0 - (std::sqrt(5.0) - 1.0) / 2.0);
    for (int n = 1; n < 14; ++n)
        for (std::size_t i = 0; i < ts.count(n); ++i)
            if (ts.special[n][i])
                CHECK(ratio_R(ts, ms, n, static_cast<int>(i)) == Approx(phi2).margin(1e-10));
}

TEST_CASE("empirical measure from samples") {
    auto sub = Substitution::from_rules({{'a', "ab"}, {'b', "a"}});
    auto t = build_language([&](int n) { return sub.factors(n); }, 8);
    const std::string sample = sub.sample_prefix(200000);
    auto m = empirical_measure(sample, t);
    const double theta = (std::sqrt(5.0) - 1.0) / 2.0;
    CHECK(m.value(1, t.index_of(1, "a")) == Approx(theta).margin(2e-3));
    CHECK(check_measure(t, m, 1e-3).ok);

    CHECK_THROWS_AS(empirical_measure("ab", t), precision_error);

    // a sample that misses admissible words has no full-support estimate
    auto g = golden_mean();
    auto tg = table_of(g, 3);
    CHECK_THROWS_AS(empirical_measure(std::string(5000, 'a'), tg), consistency_error);
}

TEST_CASE("linear recurrence keeps level-scaled masses bounded") {
    auto sub = Substitution::from_rules({{'a', "ab"}, {'b', "a"}});
    const std::string sample = sub.sample_prefix(300000);
    auto estimate = [&](int depth) {
        auto t = build_language([&](int n) { return sub.factors(n); }, depth);
        auto m = empirical_measure(sample, t);
        double K = 0.0;
        for (int n = 1; n <= depth; ++n)
            for (std::size_t i = 0; i < t.count(n); ++i) {
                const double nmu = n * m.value(n, static_cast<int>(i));
                K = std::max({K, nmu, 1.0 / nmu});
            }
        return K;
    };
    const double k6 = estimate(6);
    const double k12 = estimate(12);
    CHECK(k6 > 1.0);
    CHECK(k12 < 6.0);                 // finite, golden-ratio sized
    CHECK(k12 <= k6 * 1.6 + 1e-12);  // stable rather than drifting upward

    // the branching ratios stay in a band controlled by that constant
    auto t = build_language([&](int n) { return sub.factors(n); }, 12);
    auto m = empirical_measure(sample, t);
    for (int n = 0; n < 12; ++n)
        for (std::size_t i = 0; i < t.count(n); ++i)
            if (t.special[n][i]) {
                const double R = ratio_R(t, m, n, static_cast<int>(i));
                CHECK(R >= 1.0);
                CHECK(R <= 2.0 * k12 * k12);
            }
}

TEST_CASE("sturmian sample prefix matches the interval measure") {
    ContinuedFraction fib(std::vector<mpz_class>(40, 1));
    auto t = build_language([&](int n) { return sturmian_factors(fib, n); }, 6);
    auto exact = sturmian_measure(fib, t);
    auto emp = empirical_measure(sturmian_sample_prefix(fib, 200000), t);
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n)
        for (std::size_t i = 0; i < t.count(n); ++i)
            worst = std::max(worst, std::abs(emp.value(n, static_cast<int>(i)) -
                                             exact.value(n, static_cast<int>(i))));
    CHECK(worst < 1e-3);
}

TEST_CASE("periodic sample splits mass evenly") {
    auto periodic_factors = [](int n) -> std::vector<Word> {
        if (n == 1) return {"a", "b"};
        return {"ab", "ba"};
    };
    auto t = build_language(periodic_factors, 2);
    std::string sample;
    for (int i = 0; i < 5000; ++i) sample += "ab";
    auto m = empirical_measure(sample, t);
    const double slack = 1.0 / (sample.size() - 1.0);
    CHECK(std::abs(m.value(2, t.index_of(2, "ab")) - 0.5) <= slack);
    CHECK(std::abs(m.value(2, t.index_of(2, "ba")) - 0.5) <= slack);
}

TEST_CASE("sampled max-entropy path reproduces the parry measure") {
    auto g = golden_mean();
    auto pd = perron(g);
    auto t = table_of(g, 6);
    auto exact = parry_measure(g, pd, t);
    auto sample = sample_max_entropy_path(g, pd, 300000, 20240817);
    auto emp = empirical_measure(sample, t);
    double worst = 0;
    for (std::size_t i = 0; i < t.count(6); ++i)
        worst = std::max(worst, std::abs(emp.value(6, static_cast<int>(i)) -
                                         exact.value(6, static_cast<int>(i))));
    CHECK(worst < 1e-2);
}
