#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "qg/bounds.hpp"
#include "qg/fem.hpp"
#include "qg/secular.hpp"
#include "qg/surgery.hpp"

using namespace qg;
using namespace qg::test;

namespace {

/// Eigenvalue of the uniform P1 discretisation for the continuous
/// eigenvalue (w)^2 at element width h.
double discrete_p1(double w, double h)
{
    const double c = std::cos(w * h);
    return 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
}

Eigen::MatrixXd dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

}  // namespace

TEST_SUITE("spectral-fem")
{
    TEST_CASE("mesh examples")
    {
        const FemMesh m = mesh(interval(), 0.25);
        CHECK(m.segments == std::vector<int>{4});
        CHECK(m.node_count == 5);
        CHECK(m.free_count == 5);
        CHECK(mesh(with_dirichlet_leaves(interval()), 0.25).free_count == 3);

        const FemMesh s = mesh(star(3), 0.5);
        CHECK(s.segments == std::vector<int>{2, 2, 2});
        CHECK(s.node_count == 7);

        // short edges still get two subintervals
        CHECK(mesh(interval(0.01), 1.0).segments == std::vector<int>{2});
    }

    TEST_CASE("mesh: the DOF cap coarsens and flags")
    {
        const QuantumGraph c = comb(1.5, 1000);
        const FemMesh free_mesh = mesh(c, 1e-4);
        CHECK_FALSE(free_mesh.capped);
        CHECK(free_mesh.node_count > 20'000);
        const FemMesh capped = mesh(c, 1e-4, 20'000);
        CHECK(capped.capped);
        CHECK(capped.node_count <= 20'000);
        for (int s : capped.segments) CHECK(s >= 2);
        CHECK_THROWS_AS(mesh(c, 1e-4, 1000), InputError);
        CHECK_THROWS_AS(mesh(interval(), 0.0), InputError);
        CHECK_THROWS_AS(mesh(interval(), -1.0), InputError);
    }

    TEST_CASE("assemble: element matrices")
    {
        const double h = 0.1;
        const FemSystem s = assemble(mesh(interval(2 * h), h));
        Eigen::MatrixXd K(3, 3), M(3, 3);
        K << 1, -1, 0, -1, 2, -1, 0, -1, 1;
        M << 2, 1, 0, 1, 4, 1, 0, 1, 2;
        K /= h;
        M *= h / 6;
        // nodes: vertices first, then the interior node
        const Eigen::Vector3i order(s.mesh.free_index[0], s.mesh.free_index[2], s.mesh.free_index[1]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                CHECK(dense(s.K)(order[i], order[j]) == doctest::Approx(K(i, j)).epsilon(1e-14));
                CHECK(dense(s.M)(order[i], order[j]) == doctest::Approx(M(i, j)).epsilon(1e-14));
            }
    }

    TEST_CASE("assemble: constants are in the kernel and the star centre row")
    {
        const FemSystem s = assemble(mesh(interval(), 1e-2));
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(s.mesh.free_count));
        CHECK((s.K * ones).norm() < 1e-10);

        const FemSystem st = assemble(mesh(star(3), 1.0));
        const Eigen::MatrixXd K = dense(st.K);
        const auto centre = st.mesh.free_index[0];
        CHECK(K(centre, centre) == doctest::Approx(3 / 0.5));
        int neighbours = 0;
        for (Eigen::Index j = 0; j < K.cols(); ++j)
            if (j != centre && K(centre, j) != 0.0) {
                CHECK(K(centre, j) == doctest::Approx(-1 / 0.5));
                ++neighbours;
            }
        CHECK(neighbours == 3);
    }

    TEST_CASE("property: K and M symmetric, M positive definite, kernel of K")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            QuantumGraph q = make_family(random_pool_spec(seed));
            for (bool dir : {false, true}) {
                if (dir) q.conditions.dirichlet.insert(0);
                const FemSystem s = assemble(mesh(q, 0.1));
                const Eigen::MatrixXd K = dense(s.K), M = dense(s.M);
                CHECK((K - K.transpose()).norm() <= 1e-14 * K.norm());
                CHECK((M - M.transpose()).norm() <= 1e-14 * M.norm());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(M);
                CHECK(em.eigenvalues().minCoeff() > 0.0);
                Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ek(K, M);
                const auto ev = ek.eigenvalues();
                const int zeros = static_cast<int>((ev.array().abs() < 1e-8).count());
                CHECK(zeros == (dir ? 0 : 1));
            }
        }
    }

    TEST_CASE("solve_eigs examples")
    {
        const Spectrum iv = solve_fem(interval(), 3, 1e-3);
        CHECK(iv[0] == 0.0);
        CHECK(rel_diff(iv[1], pi2) < 1e-5);

        const Spectrum dn = solve_fem(with_dirichlet(interval(), "v0"), 1, 1e-3);
        CHECK(rel_diff(dn[0], pi2 / 4) < 1e-5);

        const Spectrum st = solve_extrapolated(star(3), 4, 5e-3);
        CHECK(rel_diff(st[1], pi2 / 4) < 1e-6);
        CHECK(rel_diff(st[2], pi2 / 4) < 1e-6);
        CHECK(st.groups[1] == st.groups[2]);
        CHECK(st.multiplicity(1) == 2);
        CHECK(st.groups[3] != st.groups[2]);

        CHECK_THROWS_AS(solve_fem(interval(), 100, 0.25), InputError);
    }

    TEST_CASE("solve_eigs agrees with the discrete P1 formula on both paths")
    {
        const double h = 1.0 / 64;
        for (std::size_t threshold : {std::size_t{400}, std::size_t{10}}) {
            SolverSettings st;
            st.dense_threshold = threshold;
            const Spectrum s = solve_fem(interval(), 5, h, kDefaultDofCap, st);
            for (int k = 1; k < 5; ++k) CHECK(rel_diff(s[static_cast<std::size_t>(k)], discrete_p1(k * pi, h)) < 1e-10);
        }
    }

    TEST_CASE("solve_eigs: zero modes are exact constants")
    {
        const Spectrum s = solve_fem(star(3), 2, 0.1);
        CHECK(s[0] == 0.0);
        const Eigen::VectorXd u = s.eigenvectors.col(0);
        CHECK(u.maxCoeff() - u.minCoeff() < 1e-14);
        const FemSystem sys = assemble(mesh(star(3), 0.1));
        CHECK((u.transpose() * sys.M * u)(0, 0) == doctest::Approx(1.0));
    }

    TEST_CASE("property: residuals below the limit and M-orthonormal vectors")
    {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            QuantumGraph q = make_family(random_pool_spec(seed));
            if (seed % 2) q.conditions.dirichlet.insert(0);
            const FemSystem sys = assemble(mesh(q, 2e-3));
            const Spectrum s = solve_eigs(sys, 6);
            for (double r : s.residuals) CHECK(r <= 1e-9);
            const Eigen::MatrixXd G = s.eigenvectors.transpose() * sys.M * s.eigenvectors;
            CHECK((G - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-8);
            for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] >= s[i - 1]);
        }
    }

    TEST_CASE("richardson examples")
    {
        const double h = 5e-3;
        const Spectrum coarse = solve_fem(interval(), 3, h);
        const Spectrum fine = solve_fem(interval(), 3, h / 2);
        const Spectrum ex = richardson(coarse, fine);
        CHECK(std::abs(coarse[1] - pi2) > 1e-5);
        CHECK(std::abs(ex[1] - pi2) <= 1e-9 * pi2);
        CHECK(ex[0] == 0.0);
        CHECK(ex.method == SpectrumMethod::fem_extrapolated);
        CHECK_THROWS_AS(richardson(coarse, solve_fem(interval(), 2, h / 2)), InputError);
    }

    TEST_CASE("rayleigh examples")
    {
        const FemSystem neu = assemble(mesh(star(3), 0.05));
        CHECK(rayleigh(neu, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(neu.mesh.free_count))) == 0.0);

        const FemSystem dir = assemble(mesh(with_dirichlet_leaves(interval()), 1e-3));
        const Eigen::VectorXd s = interpolate(dir.mesh, [](EdgeIndex, double x) { return std::sin(pi * x); });
        const double r = rayleigh(dir, s);
        CHECK(r > pi2);
        CHECK(rel_diff(r, pi2) < 1e-5);

        const Spectrum sp = solve_eigs(dir, 1);
        CHECK(rel_diff(rayleigh(dir, sp.eigenvectors.col(0)), sp[0]) < 1e-12);
        CHECK_THROWS_AS(rayleigh(dir, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dir.mesh.free_count))), InputError);
    }

    TEST_CASE("tail_indicator examples")
    {
        const FemSystem whole = assemble(mesh(star(3), 0.05));
        const TailIndicator t = tail_indicator(whole, {true, true, true});
        CHECK(t.trivial);
        CHECK(t.sigma == 0.0);

        auto sigmas = [](double alpha) {
            const QuantumGraph c = comb(alpha, 200);
            const FemSystem s = assemble(mesh(c, 1e-3, 50'000));
            std::vector<double> out;
            for (int m : {25, 50, 100}) {
                const TailIndicator ti = tail_indicator(s, comb_core_edges(c, m));
                CHECK(ti.sigma >= 0.0);
                CHECK(ti.sigma <= 1.0);
                out.push_back(ti.sigma);
            }
            return out;
        };
        const auto thin = sigmas(1.5);
        CHECK(thin[1] < thin[0]);
        CHECK(thin[2] < thin[1]);
        CHECK(thin[2] < 0.1);
        const auto fat = sigmas(0.3);
        for (double s : fat) CHECK(s > 0.5);
    }

    TEST_CASE("property: enlarging the Dirichlet set never lowers an eigenvalue")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            QuantumGraph q = make_family(random_pool_spec(seed));
            Spectrum prev = solve_extrapolated(q, 5, 1e-2);
            for (VertexIndex v = 0; v < std::min<std::size_t>(3, q.graph.vertex_count()); ++v) {
                q.conditions.dirichlet.insert(v);
                if (q.conditions.dirichlet.size() == q.graph.vertex_count()) break;
                const Spectrum next = solve_extrapolated(q, 5, 1e-2);
                for (std::size_t k = 0; k < 5; ++k) CHECK(next[k] >= prev[k] * (1 - 1e-6) - 1e-9);
                prev = next;
            }
        }
    }

    TEST_CASE("property: dummy vertices leave the spectrum unchanged")
    {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const QuantumGraph q = make_family(random_pool_spec(seed));
            const QuantumGraph d = insert_dummy(q, 0, 0.37 * q.graph.edge(0).length);
            const Spectrum a = solve_extrapolated(q, 10, 5e-3);
            const Spectrum b = solve_extrapolated(d, 10, 5e-3);
            for (std::size_t k = 0; k < 10; ++k) CHECK(rel_diff(a[k], b[k]) <= 1e-6);
        }
    }

    TEST_CASE("property: gluing Dirichlet vertices keeps the spectrum")
    {
        const QuantumGraph s = with_dirichlet_leaves(star({1.0, 0.8, 0.6}));
        const QuantumGraph g = glue_vertices(s, s.graph.vertex_index("x1"), s.graph.vertex_index("x2"));
        CHECK(g.conditions.dirichlet.size() == 2);
        const Spectrum a = solve_extrapolated(s, 5, 5e-3);
        const Spectrum b = solve_extrapolated(g, 5, 5e-3);
        for (std::size_t k = 0; k < 5; ++k) CHECK(rel_diff(a[k], b[k]) <= 1e-9);
    }

    TEST_CASE("property: extrapolated FEM matches the secular oracle")
    {
        for (std::uint64_t seed = 40; seed < 46; ++seed) {
            QuantumGraph q = make_family(random_pool_spec(seed));
            if (seed % 2) q.conditions.dirichlet.insert(0);
            const Spectrum f = solve_extrapolated(q, 5, 5e-3);
            SecularSettings st;
            st.count = 5;
            const Spectrum s = eigs_by_scan(q, st);
            for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(f[k] - s[k]) <= 1e-6 * std::max(1.0, s[k]));
        }
    }
}
