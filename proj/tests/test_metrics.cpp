#include "opinionlab/metrics.hpp"

#include <doctest.h>

#include "test_util.hpp"

using namespace opinionlab;

namespace {

WeightedGraph two_node(double w) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 1) = w;
    m(1, 0) = w;
    return WeightedGraph(std::move(m));
}

/// Direct summation forms, independent of the quadratic-form production path.
double disagreement_by_sum(const WeightedGraph& g, const OpinionVector& z) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        total += local_disagreement(g, z, i);
    }
    return 0.5 * total;
}

double conflict_by_sum(const OpinionVector& z, const OpinionVector& s) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        total += (z(i) - s(i)) * (z(i) - s(i));
    }
    return total;
}

}  // namespace

TEST_CASE("polarization") {
    OpinionVector z2(2);
    z2 << 1.0, -1.0;
    CHECK(polarization(z2) == doctest::Approx(2.0).epsilon(1e-15));

    CHECK(polarization(OpinionVector::Constant(5, 0.7)) == doctest::Approx(0.0));

    OpinionVector z3(3);
    z3 << 1.0, 0.0, -1.0;
    CHECK(polarization(z3) == doctest::Approx(2.0).epsilon(1e-15));

    // maximal: half +1, half -1 on 2n nodes gives 2n
    const Eigen::Index n = 6;
    OpinionVector extremes(2 * n);
    extremes.head(n).setConstant(1.0);
    extremes.tail(n).setConstant(-1.0);
    CHECK(polarization(extremes) == doctest::Approx(2.0 * n).epsilon(1e-15));

    CHECK_THROWS_AS(polarization(OpinionVector()), std::invalid_argument);
}

TEST_CASE("polarization is translation invariant") {
    // Dyadic entries make the shifted mean exact, so equality is bitwise.
    OpinionVector z(3);
    z << 0.5, -0.25, 0.75;
    const OpinionVector shifted = z.array() + 0.5;
    CHECK(polarization(shifted) == polarization(z));

    std::mt19937_64 rng(3);
    const OpinionVector r = testutil::random_opinions(10, rng);
    const OpinionVector r_shifted = r.array() + 0.123;
    CHECK(polarization(r_shifted) == doctest::Approx(polarization(r)).epsilon(1e-12));
}

TEST_CASE("local_disagreement") {
    SUBCASE("isolated node") {
        CHECK(local_disagreement(WeightedGraph::empty(3), OpinionVector::Zero(3), 0) == 0.0);
    }
    SUBCASE("two nodes, weight three") {
        OpinionVector z(2);
        z << 1.0, -1.0;
        CHECK(local_disagreement(two_node(3.0), z, 0) == doctest::Approx(12.0));
        CHECK(local_disagreement(two_node(3.0), z, 1) == doctest::Approx(12.0));
    }
    SUBCASE("consensus vanishes at every node") {
        std::mt19937_64 rng(4);
        const WeightedGraph g = testutil::random_graph(6, 0.7, 2.0, rng);
        const OpinionVector z = OpinionVector::Constant(6, -0.3);
        for (Eigen::Index i = 0; i < 6; ++i) {
            CHECK(local_disagreement(g, z, i) == doctest::Approx(0.0));
        }
    }
    SUBCASE("index out of range") {
        CHECK_THROWS_AS(local_disagreement(two_node(1.0), OpinionVector::Zero(2), 2),
                        std::out_of_range);
        CHECK_THROWS_AS(local_disagreement(two_node(1.0), OpinionVector::Zero(2), -1),
                        std::out_of_range);
    }
}

TEST_CASE("global_disagreement") {
    OpinionVector z(2);
    z << 1.0, -1.0;
    CHECK(global_disagreement(two_node(3.0), z) == doctest::Approx(12.0));

    CHECK(global_disagreement(two_node(3.0), OpinionVector::Constant(2, 0.4)) ==
          doctest::Approx(0.0));

    // sum form and quadratic form agree
    std::mt19937_64 rng(8);
    const WeightedGraph g = testutil::random_graph(7, 0.6, 2.0, rng);
    const OpinionVector r = testutil::random_opinions(7, rng);
    CHECK(global_disagreement(g, r) == doctest::Approx(disagreement_by_sum(g, r)).epsilon(1e-12));
}

TEST_CASE("global_disagreement is invariant under mean shift") {
    std::mt19937_64 rng(9);
    const WeightedGraph g = testutil::random_graph(8, 0.5, 1.5, rng);
    const OpinionVector z = testutil::random_opinions(8, rng);
    const OpinionVector centered = z.array() - z.mean();
    CHECK(global_disagreement(g, z) ==
          doctest::Approx(global_disagreement(g, centered)).epsilon(1e-12));
}

TEST_CASE("internal_conflict") {
    OpinionVector s(2);
    s << 1.0, -1.0;
    CHECK(internal_conflict(s, s) == 0.0);
    CHECK(internal_conflict(OpinionVector::Zero(2), s) == doctest::Approx(2.0));

    std::mt19937_64 rng(10);
    const OpinionVector a = testutil::random_opinions(9, rng);
    const OpinionVector b = testutil::random_opinions(9, rng);
    CHECK(internal_conflict(a, b) == doctest::Approx(conflict_by_sum(a, b)).epsilon(1e-12));

    CHECK_THROWS_AS(internal_conflict(OpinionVector::Zero(2), OpinionVector::Zero(3)),
                    std::invalid_argument);
}

TEST_CASE("conservation_check closed forms") {
    SUBCASE("empty graph: identity holds exactly") {
        std::mt19937_64 rng(12);
        const OpinionVector s = testutil::random_opinions(5, rng);
        const MetricsReport m = conservation_check(WeightedGraph::empty(5), s);
        CHECK(m.global_disagreement == 0.0);
        CHECK(m.global_internal_conflict <= 1e-25);
        CHECK(m.conservation_residual == doctest::Approx(0.0).epsilon(1e-14));
        const OpinionVector centered = s.array() - s.mean();
        CHECK(m.polarization == doctest::Approx(centered.squaredNorm()).epsilon(1e-14));
    }
    SUBCASE("two-node hand evaluation") {
        OpinionVector s(2);
        s << 1.0, -1.0;
        const MetricsReport m = conservation_check(two_node(1.0), s);
        CHECK(m.polarization == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
        CHECK(m.global_disagreement == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
        CHECK(m.global_internal_conflict == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
        CHECK(std::abs(m.conservation_residual) <= 1e-12);
        CHECK(m.mean_opinion == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("conservation law holds on random instances") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 10;
        const WeightedGraph g = testutil::random_graph(n, 0.5, 3.0, rng);
        const OpinionVector s = testutil::random_opinions(n, rng);
        const MetricsReport m = conservation_check(g, s);
        const OpinionVector centered = s.array() - s.mean();
        CHECK(std::abs(m.conservation_residual) <= 1e-8 * std::max(1.0, centered.squaredNorm()));
    }
}

TEST_CASE("equilibrium_polarization_quadform") {
    SUBCASE("empty graph reduces to centered energy") {
        std::mt19937_64 rng(14);
        const OpinionVector s = testutil::random_opinions(6, rng);
        const OpinionVector centered = s.array() - s.mean();
        CHECK(equilibrium_polarization_quadform(WeightedGraph::empty(6), s) ==
              doctest::Approx(centered.squaredNorm()).epsilon(1e-12));
    }
    SUBCASE("two-node closed form") {
        OpinionVector s(2);
        s << 1.0, -1.0;
        CHECK(equilibrium_polarization_quadform(two_node(1.0), s) ==
              doctest::Approx(2.0 / 9.0).epsilon(1e-12));
    }
    SUBCASE("matches the polarization of the solved equilibrium") {
        std::mt19937_64 rng(15);
        for (int trial = 0; trial < 10; ++trial) {
            const WeightedGraph g = testutil::random_graph(9, 0.5, 2.0, rng);
            const OpinionVector s = testutil::random_opinions(9, rng);
            const double quadform = equilibrium_polarization_quadform(g, s);
            const double direct = polarization(fj_equilibrium(g, s));
            CHECK(quadform == doctest::Approx(direct).epsilon(1e-8));
        }
    }
}

TEST_CASE("equilibrium maximizes polarization plus disagreement on the conservation manifold") {
    // P + D is maximal at z* among opinion vectors with the same value of
    // P + 2D + I, where maximizing P + D is equivalent to minimizing D + I.
    // Perturbations are scaled back onto that level set around its center
    // before comparing.
    std::mt19937_64 rng(16);
    const WeightedGraph g = testutil::random_graph(10, 0.5, 2.0, rng);
    const OpinionVector s = testutil::random_opinions(10, rng);
    const OpinionVector z_star = fj_equilibrium(g, s);

    const auto total = [&](const OpinionVector& z) {
        return polarization(z) + 2.0 * global_disagreement(g, z) + internal_conflict(z, s);
    };
    const double level = total(z_star);  // = s̄ᵀs̄ by the conservation law
    // Center of the level-set ellipsoid: the minimizer of P + 2D + I.
    Eigen::MatrixXd system = 2.0 * laplacian(g);
    system.diagonal().array() += 2.0;
    const OpinionVector s_centered = s.array() - s.mean();
    const OpinionVector center =
        (system.llt().solve(s_centered).array() + s.mean()).matrix();
    const double at_center = total(center);
    REQUIRE(at_center <= level);

    const double at_star = polarization(z_star) + global_disagreement(g, z_star);
    for (int k = 0; k < 100; ++k) {
        const OpinionVector delta = testutil::random_opinions(10, rng, -0.01, 0.01);
        const OpinionVector direction = z_star + delta - center;
        // total(center + t*direction) = at_center + t^2 * curvature
        const double curvature = total(center + direction) - at_center;
        REQUIRE(curvature > 0.0);
        const double t = std::sqrt((level - at_center) / curvature);
        const OpinionVector on_manifold = center + t * direction;
        CHECK(total(on_manifold) == doctest::Approx(level).epsilon(1e-9));
        const double value =
            polarization(on_manifold) + global_disagreement(g, on_manifold);
        CHECK(value <= at_star + 1e-12);
    }
}

TEST_CASE("metrics CSV row") {
    MetricsReport m;
    m.polarization = 0.25;
    m.global_disagreement = 1.5;
    m.global_internal_conflict = 0.75;
    m.conservation_residual = 0.0;
    m.mean_opinion = -0.125;
    CHECK(metrics_csv_header() ==
          "round,polarization,disagreement,internal_conflict,conservation_residual,mean_opinion");
    CHECK(to_csv_row(m, 3) == "3,0.25,1.5,0.75,0,-0.125");
}
