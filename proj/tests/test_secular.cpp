#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "qg/secular.hpp"

using namespace qg;
using namespace qg::test;

namespace {

/// Root of 2 cot k + cot(k/2) = 0 in (1.6, 2.2) by plain bisection.
double letter_t_root()
{
    auto f = [](double k) { return 2.0 / std::tan(k) + 1.0 / std::tan(k / 2); };
    double lo = 1.6, hi = 2.2;
    REQUIRE(f(lo) > 0.0);
    REQUIRE(f(hi) < 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Spectrum scan(const QuantumGraph& q, std::size_t count)
{
    SecularSettings st;
    st.count = count;
    return eigs_by_scan(q, st);
}

void check_k_agreement(const Spectrum& s, const std::vector<double>& k_expected)
{
    REQUIRE(s.size() >= k_expected.size());
    for (std::size_t i = 0; i < k_expected.size(); ++i) {
        CAPTURE(i);
        CHECK(std::abs(std::sqrt(s[i]) - k_expected[i]) <= 1e-9);
    }
}

}  // namespace

TEST_SUITE("spectral-secular")
{
    TEST_CASE("secular_matrix: shape and entry bound")
    {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const QuantumGraph q = make_family(random_pool_spec(seed));
            for (double k : {0.3, 2.0, 17.0}) {
                const Eigen::MatrixXd m = secular_matrix(q, k);
                const auto n = static_cast<Eigen::Index>(2 * q.graph.edge_count());
                CHECK(m.rows() == n);
                CHECK(m.cols() == n);
                CHECK(m.cwiseAbs().maxCoeff() <= std::max(1.0, k) + 1e-12);
            }
        }
        CHECK_THROWS_AS(secular_matrix(interval(), 0.0), InputError);
        CHECK_THROWS_AS(secular_matrix(interval(), -1.0), InputError);
    }

    TEST_CASE("secular_matrix: Dirichlet interval vanishes where sin k = 0")
    {
        const QuantumGraph q = with_dirichlet_leaves(interval());
        for (int n = 1; n <= 3; ++n) {
            CHECK(secular_sigma_min(q, n * pi) < 1e-12);
            CHECK(std::abs(secular_determinant(q, n * pi)) < 1e-12);
        }
        CHECK(secular_sigma_min(q, 1.5) > 0.1);
        CHECK(std::abs(secular_determinant(q, 1.5)) == doctest::Approx(std::abs(std::sin(1.5))));
    }

    TEST_CASE("secular_matrix: Dirichlet-Neumann interval vanishes where cos k = 0")
    {
        const QuantumGraph q = with_dirichlet(interval(), "v0");
        CHECK(secular_sigma_min(q, pi / 2) < 1e-12);
        CHECK(secular_sigma_min(q, 3 * pi / 2) < 1e-12);
        CHECK(secular_sigma_min(q, pi) > 0.1);
        CHECK(scan(q, 1)[0] == doctest::Approx(pi2 / 4).epsilon(1e-12));
    }

    TEST_CASE("secular_matrix: letter-T root")
    {
        const double k = letter_t_root();
        const QuantumGraph t = with_dirichlet_leaves(star({1.0, 1.0, 0.5}));
        CHECK(secular_sigma_min(t, k) < 1e-10);
        CHECK(secular_sigma_min(t, k + 0.05) > 1e-4);
        const Spectrum s = scan(t, 1);
        CHECK(std::abs(std::sqrt(s[0]) - k) <= 1e-9);
        CHECK(s[0] == doctest::Approx(3.6505).epsilon(1e-4));
        CHECK(s[0] < pi2 / (4 * 0.75 * 0.75));
    }

    TEST_CASE("eigs_by_scan: loop and Dirichlet star")
    {
        const Spectrum l = scan(loop(), 3);
        CHECK(l[0] == 0.0);
        CHECK(l[1] == doctest::Approx(4 * pi2).epsilon(1e-12));
        CHECK(l[2] == doctest::Approx(4 * pi2).epsilon(1e-12));
        CHECK(l.multiplicity(1) == 2);

        const Spectrum s = scan(with_dirichlet_leaves(star(3)), 1);
        CHECK(s[0] == doctest::Approx(pi2 / 4).epsilon(1e-12));
        CHECK(s.method == SpectrumMethod::secular);
    }

    TEST_CASE("property: scan matches closed-form spectra")
    {
        std::vector<double> k_interval, k_loop, k_star, k_loop_short;
        for (int n = 0; n < 8; ++n) k_interval.push_back(n * pi / 1.3);
        k_loop.push_back(0.0);
        for (int n = 1; n < 5; ++n) k_loop.insert(k_loop.end(), 2, 2 * n * pi / 0.7);
        // equilateral 3-star, arms 0.9: sin(k l) = 0 simple, cos(k l) = 0 double
        for (int n = 0; n < 5; ++n) {
            k_star.push_back(n * pi / 0.9);
            k_star.insert(k_star.end(), 2, (n + 0.5) * pi / 0.9);
        }
        std::sort(k_star.begin(), k_star.end());
        check_k_agreement(scan(interval(1.3), k_interval.size()), k_interval);
        check_k_agreement(scan(loop(0.7), k_loop.size()), k_loop);
        check_k_agreement(scan(star(3, 0.9), k_star.size()), k_star);
    }

    TEST_CASE("property: eigenvalue counts follow the Weyl estimate")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const QuantumGraph q = make_family(random_pool_spec(seed));
            const double len = family_total_length(random_pool_spec(seed));
            SecularSettings st;
            st.k_upper = 25.0;
            const Spectrum s = eigs_by_scan(q, st);
            const double weyl = len * 25.0 / pi;
            CHECK(std::abs(static_cast<double>(s.size()) - weyl) <= 2.0);
            for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] >= s[i - 1]);
        }
    }

    TEST_CASE("eigs_by_scan: input errors")
    {
        CHECK_THROWS_AS(eigs_by_scan(interval(), SecularSettings{}), InputError);
        SecularSettings st;
        st.count = 1;
        st.max_edges = 2;
        CHECK_THROWS_AS(eigs_by_scan(star(3), st), InputError);
    }
}
