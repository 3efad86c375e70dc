#include <catch2/catch.hpp>

#include <cmath>
#include <random>
#include <set>

#include "specshift/generators.hpp"
#include "specshift/measures.hpp"
#include "specshift/verify.hpp"

#include "oracles.hpp"

using namespace specshift;

TEST_CASE("perron iteration survives period-two incidence structure") {
    // only cycles of length two and four pass through vertex 1
    auto g = SftGraph::from_edges(4, {{'a', 1, 2}, {'b', 2, 1}, {'c', 2, 3}, {'d', 3, 4}, {'e', 4, 1}});
    REQUIRE(g.irreducible);
    REQUIRE(g.aperiodic);
    auto pd = perron(g);
    CHECK(pd.lambda == Approx(std::sqrt((1.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-10));
    auto t = build_language([&](int n) { return g.factors(n); }, 6);
    auto m = parry_measure(g, pd, t);
    auto suite = run_invariant_suite(t, m, 5);
    CHECK(suite.all_pass);
}

TEST_CASE("random graphs run the whole pipeline") {
    std::mt19937_64 rng(20240817);
    int accepted = 0, attempts = 0;
    while (accepted < 6 && attempts < 500) {
        ++attempts;
        const int vertices = 2 + static_cast<int>(rng() % 2);
        const int edge_count = 3 + static_cast<int>(rng() % 2);
        std::vector<SftGraph::Edge> edges;
        for (int e = 0; e < edge_count; ++e)
            edges.push_back({static_cast<char>('a' + e), 1 + static_cast<int>(rng() % vertices),
                             1 + static_cast<int>(rng() % vertices)});
        auto g = SftGraph::from_edges(vertices, edges);
        if (!g.irreducible || !g.aperiodic) continue;
        ++accepted;
        INFO("graph attempt " << attempts);
        for (int n = 1; n <= 6; ++n)
            CHECK(mpz_class(static_cast<long>(g.factors(n).size())) == g.factor_count(n));
        auto t = build_language([&](int n) { return g.factors(n); }, 5);
        auto pd = perron(g);
        CHECK((g.incidence * pd.right - pd.lambda * pd.right).lpNorm<Eigen::Infinity>() <=
              1e-12 * pd.lambda);
        auto m = parry_measure(g, pd, t);
        CHECK(check_measure(t, m, 1e-10).ok);
        CHECK(branch_ratio_inequality_margin(t, m) >= -1e-12);
        auto space = make_space(t, m, 4);
        CHECK(flag_consistency_defect(space) < 1e-10);
        CHECK(q_reconstruction_defect(space, rng()) < 1e-10);
        CHECK(eta_chain_orthogonality_defect(space) < 1e-11);
    }
    REQUIRE(accepted == 6);
}

TEST_CASE("tribonacci substitution") {
    auto tri = Substitution::from_rules({{'a', "ab"}, {'b', "ac"}, {'c', "a"}});
    for (int n = 1; n <= 10; ++n) {
        auto got = tri.factors(n);
        auto brute = oracle::substitution_factors_brute({{'a', "ab"}, {'b', "ac"}, {'c', "a"}},
                                                        'a', 18, n);
        CHECK(std::set<std::string>(got.begin(), got.end()) == brute);
        CHECK(got.size() == 2 * static_cast<std::size_t>(n) + 1);
    }
    auto t = build_language([&](int n) { return tri.factors(n); }, 6);
    auto m = empirical_measure(tri.sample_prefix(300000), t);
    auto suite = run_invariant_suite(t, m, 6, 1e-2);
    CHECK(suite.all_pass);
}

TEST_CASE("random rotation parameters run the exact pipeline") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<mpz_class> quotients;
        for (int k = 0; k < 30; ++k) quotients.emplace_back(1 + static_cast<long>(rng() % 4));
        ContinuedFraction cf(quotients);
        INFO("quotients start " << quotients[0].get_str() << "," << quotients[1].get_str() << ","
                                << quotients[2].get_str());
        for (int n = 1; n <= 15; ++n)
            CHECK(sturmian_factors(cf, n).size() == static_cast<std::size_t>(n) + 1);
        auto t = build_language([&](int n) { return sturmian_factors(cf, n); }, 8);
        auto m = sturmian_measure(cf, t);  // construction validates the frequency sets
        auto suite = run_invariant_suite(t, m, 6);
        CHECK(suite.all_pass);

        // factor sets of a mid-length agree with a rotation-coded orbit
        const double theta =
            mpq_class(mpq_class(cf.p(20)) / mpq_class(cf.q(20))).get_d();
        auto brute = oracle::rotation_coded_factors(theta, 6, 200000);
        auto got = sturmian_factors(cf, 6);
        CHECK(std::set<std::string>(got.begin(), got.end()) == brute);
    }
}
