#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

#include "trunclap/closed_form.hpp"
#include "trunclap/pde_solver.hpp"

using namespace trunclap;

namespace {

constexpr double kPi = std::numbers::pi;

GridDomain square_grid(double side, double h) {
    return GridDomain(
        ConvexDomain::box({-side / 2.0, -side / 2.0}, {side / 2.0, side / 2.0}), h);
}

GridDomain disc_grid(double radius, double h) {
    return GridDomain(ConvexDomain::ball({0.0, 0.0}, radius), h);
}

// sup over interior nodes of |field - reference(x)|
template <typename F>
double sup_error(const ScalarField& u, F&& ref) {
    double worst = 0.0;
    for (auto flat : u.grid().interior_nodes()) {
        const auto x = u.grid().point_of(flat);
        worst = std::max(worst, std::abs(u[flat] - ref(std::span<const double>(x))));
    }
    return worst;
}

}  // namespace

TEST(DirectionSetTest, Order1TwoDimensional) {
    const auto ds = DirectionSet::make(2, 1);
    ASSERT_EQ(ds.size(), 4u);
    const std::vector<std::vector<int>> want = {{0, 1}, {1, -1}, {1, 0}, {1, 1}};
    EXPECT_EQ(ds.dirs, want);
}

TEST(DirectionSetTest, CoprimeCanonicalAndAxesPresent) {
    for (int dim : {2, 3}) {
        for (int order : {1, 2, 3, 4}) {
            if (dim == 3 && order == 4) continue;
            const auto ds = DirectionSet::make(dim, order);
            int axes = 0;
            for (const auto& e : ds.dirs) {
                int g = 0, nonzero = 0, first = 0;
                bool seen = false;
                for (int c : e) {
                    g = std::gcd(g, std::abs(c));
                    EXPECT_LE(std::abs(c), order);
                    if (c != 0) {
                        ++nonzero;
                        if (!seen) first = c, seen = true;
                    }
                }
                EXPECT_EQ(g, 1);
                EXPECT_GT(first, 0);  // canonical sign
                if (nonzero == 1) ++axes;
            }
            EXPECT_EQ(axes, dim);
            EXPECT_TRUE(std::is_sorted(ds.dirs.begin(), ds.dirs.end()));
            // one representative per +/- pair: no vector appears negated
            for (const auto& e : ds.dirs) {
                auto neg = e;
                for (int& c : neg) c = -c;
                EXPECT_EQ(std::count(ds.dirs.begin(), ds.dirs.end(), neg), 0);
            }
        }
    }
    EXPECT_EQ(DirectionSet::make(2, 2).size(), 8u);
    EXPECT_THROW(DirectionSet::make(0, 1), std::invalid_argument);
    EXPECT_THROW(DirectionSet::make(2, 0), std::invalid_argument);
}

TEST(GridDomainTest, SquareLatticeLayout) {
    const auto grid = square_grid(2.0, 0.5);
    EXPECT_EQ(grid.dim(), 2);
    // boundary lattice nodes carry no equation; (-1,1)^2 at h=1/2 leaves 3x3
    EXPECT_EQ(grid.interior_count(), 9);
    for (auto flat : grid.interior_nodes()) {
        const auto x = grid.point_of(flat);
        EXPECT_GT(grid.domain().boundary_gap(x), 0.25);
        EXPECT_EQ(grid.interior_rank(flat) >= 0, true);
        EXPECT_EQ(grid.nearest_node(x), flat);
    }
    EXPECT_THROW(GridDomain(ConvexDomain::box({0.0}, {1.0}), 0.1), std::invalid_argument);
    EXPECT_THROW(square_grid(2.0, -0.5), std::invalid_argument);
    EXPECT_THROW(square_grid(2.0, 5.0), std::invalid_argument);  // no interior nodes
}

TEST(GridDomainTest, BinaryRoundTrip) {
    const auto grid = disc_grid(1.0, 0.3);
    ScalarField u(grid);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    u.assign_interior([&](std::span<const double>) { return dist(rng); });

    std::stringstream buf;
    io::write_field(buf, u);
    const auto raw = io::read_field(buf);
    ASSERT_EQ(raw.dim, 2);
    ASSERT_EQ(raw.shape.size(), 2u);
    EXPECT_EQ(raw.shape[0], grid.shape()[0]);
    EXPECT_EQ(raw.shape[1], grid.shape()[1]);
    EXPECT_EQ(raw.h, grid.h());
    EXPECT_EQ(raw.lo[0], grid.origin()[0]);
    ASSERT_EQ(std::int64_t(raw.values.size()), grid.node_count());
    for (std::int64_t i = 0; i < grid.node_count(); ++i)
        EXPECT_EQ(raw.values[std::size_t(i)], u[i]);

    std::stringstream truncated(buf.str().substr(0, 40));
    EXPECT_THROW(io::read_field(truncated), std::runtime_error);
}

TEST(GridDomainTest, CsvHasHeaderAndOneRowPerNode) {
    const auto grid = square_grid(2.0, 0.5);
    ScalarField u(grid);
    u.fill_interior(1.0);
    std::stringstream buf;
    io::write_field_csv(buf, u);
    std::string line;
    ASSERT_TRUE(std::getline(buf, line));
    EXPECT_EQ(line, "x0,x1,value,interior");
    std::int64_t rows = 0;
    while (std::getline(buf, line)) ++rows;
    EXPECT_EQ(rows, grid.node_count());
}

TEST(WideStencilTest, SecondDifferenceExactForQuadratics) {
    const auto grid = square_grid(2.0, 0.25);
    const auto dirs = DirectionSet::make(2, 2);
    const WideStencil st(grid, dirs);

    ScalarField u(grid);
    // fill every lattice node so regular reads see the true values
    for (std::int64_t i = 0; i < grid.node_count(); ++i) {
        const auto x = grid.point_of(i);
        u[i] = x[0] * x[0];
    }
    std::vector<double> centre = {0.0, 0.0};
    const std::int64_t c = grid.nearest_node(centre);
    const int e10[] = {1, 0}, e01[] = {0, 1}, e11[] = {1, 1}, e1m1[] = {-1, 1};
    EXPECT_NEAR(st.second_difference(u, c, std::span<const int>(e10, 2)), 2.0, 1e-12);
    EXPECT_NEAR(st.second_difference(u, c, std::span<const int>(e01, 2)), 0.0, 1e-12);
    // normalization: approximates <D^2u e,e>/|e|^2, so the diagonal gives 1
    EXPECT_NEAR(st.second_difference(u, c, std::span<const int>(e11, 2)), 1.0, 1e-12);
    EXPECT_NEAR(st.second_difference(u, c, std::span<const int>(e1m1, 2)), 1.0, 1e-12);

    const int bad[] = {3, 1};
    EXPECT_THROW(st.second_difference(u, c, std::span<const int>(bad, 2)),
                 std::invalid_argument);
    EXPECT_THROW(st.second_difference(u, 0, std::span<const int>(e10, 2)), std::domain_error);
    EXPECT_THROW(st.pplus1_at(u, 0), std::domain_error);
}

TEST(WideStencilTest, ApplyIsExactlyMinusOneForRadialParaboloid) {
    // u = (rho^2 - |x|^2)/2 vanishes on the circle and has Hessian -I, so
    // every direction sees exactly -1 -- including one-sided boundary cuts,
    // which is precisely what the exact ray distances buy.
    const auto grid = disc_grid(1.0, 0.11);
    const WideStencil st(grid, DirectionSet::make(2, 3));
    ScalarField u(grid);
    u.assign_interior([](std::span<const double> x) {
        return 0.5 * (1.0 - x[0] * x[0] - x[1] * x[1]);
    });
    const auto pu = st.apply_pplus1(u);
    for (auto flat : grid.interior_nodes()) EXPECT_NEAR(pu[flat], -1.0, 1e-9);
}

TEST(WideStencilTest, ApplyPicksLargestEigenvalueOnSaddle) {
    // u = x^2/2 - y^2 has eigenvalues {1, -2}; on a full stencil the max
    // second difference is along the first axis and equals 1 exactly.
    const auto grid = square_grid(2.0, 0.125);
    const auto dirs = DirectionSet::make(2, 4);
    const WideStencil st(grid, dirs);
    ScalarField u(grid);
    for (std::int64_t i = 0; i < grid.node_count(); ++i) {
        const auto x = grid.point_of(i);
        u[i] = 0.5 * x[0] * x[0] - x[1] * x[1];
    }
    const auto pu = st.apply_pplus1(u);
    const double reach = 4 * 0.125 * std::sqrt(2.0) + 1e-12;
    for (auto flat : grid.interior_nodes()) {
        const auto x = grid.point_of(flat);
        if (grid.domain().boundary_gap(x) > reach) EXPECT_NEAR(pu[flat], 1.0, 1e-12);
    }
}

TEST(WideStencilTest, ConsistencyImprovesWithGridAndAngle) {
    // discretization error against the analytic largest Hessian eigenvalue
    // of the square's principal eigenfunction, away from the boundary
    const auto pair = cube_eigenpair(2, kPi / 2.0);
    auto measure = [&](double h, int order) {
        const auto grid = square_grid(kPi, h);
        const WideStencil st(grid, DirectionSet::make(2, order));
        ScalarField u(grid);
        u.assign_interior([&](std::span<const double> x) { return pair.value(x); });
        const auto pu = st.apply_pplus1(u);
        double worst = 0.0;
        for (auto flat : grid.interior_nodes()) {
            const auto x = grid.point_of(flat);
            if (grid.domain().boundary_gap(x) < 0.5) continue;
            worst = std::max(worst, std::abs(pu[flat] - (-pair.mu() * pair.value(x))));
        }
        return worst;
    };
    const double coarse = measure(kPi / 16.0, 2);
    const double fine = measure(kPi / 64.0, 4);
    EXPECT_LT(coarse, 0.05);
    EXPECT_LT(fine, coarse * 0.5);
    EXPECT_LT(fine, 0.01);
}

TEST(SolveDirichletTest, ZeroForcingGivesZero) {
    const auto grid = square_grid(kPi, kPi / 16.0);
    const WideStencil st(grid, DirectionSet::make(2, 2));
    const ScalarField f(grid);
    const auto out = st.solve_dirichlet(f);
    EXPECT_EQ(out.u.sup_norm(), 0.0);
    EXPECT_EQ(out.sweeps, 1);
}

TEST(SolveDirichletTest, NonnegativeForcingGivesNonpositiveSolution) {
    const auto grid = disc_grid(1.0, 0.1);
    const WideStencil st(grid, DirectionSet::make(2, 2));
    ScalarField f(grid);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    f.assign_interior([&](std::span<const double>) { return dist(rng); });
    SolveConfig cfg;
    cfg.tolerance = 1e-12;
    const auto out = st.solve_dirichlet(f, cfg);
    EXPECT_LE(out.u.max_interior(), 1e-12);
    EXPECT_LT(out.u.min_interior(), 0.0);
}

TEST(SolveDirichletTest, RecoverstheRadialParaboloidExactly) {
    // P+_1(D^2 u) = -1 with zero boundary data on the unit disc is solved by
    // the concave paraboloid, which the cut-cell scheme reproduces exactly;
    // the remaining error is the fixed-point stopping tolerance.
    const auto grid = disc_grid(1.0, kPi / 32.0);
    const WideStencil st(grid, DirectionSet::make(2, 3));
    ScalarField f(grid);
    f.fill_interior(-1.0);
    SolveConfig cfg;
    cfg.tolerance = 1e-13;
    const auto out = st.solve_dirichlet(f, cfg);
    EXPECT_LT(sup_error(out.u,
                        [](std::span<const double> x) {
                            return 0.5 * (1.0 - x[0] * x[0] - x[1] * x[1]);
                        }),
              1e-8);
    // update history is the documented stopping diagnostic
    ASSERT_EQ(std::int64_t(out.update_history.size()), out.sweeps);
    EXPECT_LT(out.update_history.back(), 1e-13);
}

TEST(SolveDirichletTest, SquareSolutionInheritsLatticeSymmetry) {
    const auto grid = square_grid(kPi, kPi / 16.0);
    const WideStencil st(grid, DirectionSet::make(2, 3));
    ScalarField f(grid);
    f.assign_interior([](std::span<const double> x) {
        return -1.0 - x[0] * x[0] - x[1] * x[1];
    });
    const auto out = st.solve_dirichlet(f);
    // forcing and domain are symmetric under (x,y) -> (y,x); node arithmetic
    // sees permuted but identical term sets, so values match bitwise
    for (auto flat : grid.interior_nodes()) {
        const auto x = grid.point_of(flat);
        const double swapped[] = {x[1], x[0]};
        const auto mirror = grid.nearest_node(std::span<const double>(swapped, 2));
        EXPECT_EQ(out.u[flat], out.u[mirror]);
    }
}

TEST(SolveDirichletTest, RejectsBadConfigsAndForcing) {
    const auto grid = square_grid(2.0, 0.25);
    const WideStencil st(grid, DirectionSet::make(2, 2));
    ScalarField f(grid);
    f.fill_interior(-1.0);
    SolveConfig bad;
    bad.tau_factor = 0.7;
    EXPECT_THROW(st.solve_dirichlet(f, bad), std::invalid_argument);
    bad.tau_factor = -0.1;
    EXPECT_THROW(st.solve_dirichlet(f, bad), std::invalid_argument);

    ScalarField g(grid);
    g.fill_interior(std::numeric_limits<double>::infinity());
    EXPECT_THROW(st.solve_dirichlet(g), std::invalid_argument);

    EXPECT_THROW(WideStencil(grid, DirectionSet::make(3, 2)), std::invalid_argument);
}

TEST(SolveDirichletTest, SweepLimitRaisesWithHistoryAttached) {
    const auto grid = square_grid(kPi, kPi / 16.0);
    const WideStencil st(grid, DirectionSet::make(2, 2));
    ScalarField f(grid);
    f.fill_interior(-1.0);
    SolveConfig cfg;
    cfg.max_sweeps = 25;
    try {
        st.solve_dirichlet(f, cfg);
        FAIL() << "expected iteration_limit_error";
    } catch (const iteration_limit_error& e) {
        EXPECT_EQ(e.residual_history().size(), 25u);
        for (double r : e.residual_history()) EXPECT_GT(r, 0.0);
    }
    cfg.throw_on_limit = false;
    const auto out = st.solve_dirichlet(f, cfg);  // partial result, no throw
    EXPECT_EQ(out.sweeps, 25);
    EXPECT_GT(out.u.sup_norm(), 0.0);
}

TEST(MonotonicityTest, RaisingANeighbourNeverLowersTheOperator) {
    const auto grid = disc_grid(1.0, 0.15);
    const WideStencil st(grid, DirectionSet::make(2, 2));
    std::mt19937_64 rng(20260814);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField u(grid);
    u.assign_interior([&](std::span<const double>) { return dist(rng); });
    const auto base = st.apply_pplus1(u);

    const auto& nodes = grid.interior_nodes();
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    for (int trial = 0; trial < 25; ++trial) {
        const std::int64_t j = nodes[pick(rng)];
        ScalarField v = u;
        v[j] += 0.5;
        const auto bumped = st.apply_pplus1(v);
        for (auto flat : nodes) {
            if (flat == j)
                EXPECT_LE(bumped[flat], base[flat] + 1e-14);  // diagonal is decreasing
            else
                EXPECT_GE(bumped[flat], base[flat] - 1e-14);  // off-diagonal increasing
        }
    }
}

TEST(MonotonicityTest, DiscreteComparisonOnRandomPairs) {
    const auto grid = square_grid(2.0, 0.125);
    const WideStencil st(grid, DirectionSet::make(2, 2));
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> base(-2.0, 2.0), gap(0.0, 1.0);
    SolveConfig cfg;
    cfg.tolerance = 1e-12;
    for (int trial = 0; trial < 10; ++trial) {
        ScalarField f(grid), g(grid);
        for (auto flat : grid.interior_nodes()) {
            f[flat] = base(rng);
            g[flat] = f[flat] + gap(rng);  // f <= g pointwise
        }
        const auto uf = st.solve_dirichlet(f, cfg).u;
        const auto ug = st.solve_dirichlet(g, cfg).u;
        for (auto flat : grid.interior_nodes()) EXPECT_GE(uf[flat], ug[flat] - 1e-9);
    }
}

TEST(EigenTest, SquarePrincipalEigenvalue) {
    const auto grid = square_grid(kPi, kPi / 32.0);
    const WideStencil st(grid, DirectionSet::make(2, 3));
    const auto est = eigen_inverse_power(st);
    EXPECT_NEAR(est.mu_h, 0.5, 0.5 * 0.05);
    EXPECT_GT(est.iterations, 2);
    EXPECT_TRUE(est.converged);
    // eigenfield: sup-normalized and positive inside
    EXPECT_EQ(est.eigenfield.sup_norm(), 1.0);
    EXPECT_GT(est.eigenfield.min_interior(), 0.0);
    // mu increments settle down after a burn-in
    ASSERT_GE(est.residual_history.size(), 4u);
    const auto& hist = est.residual_history;
    EXPECT_LT(hist.back(), hist.front());
    for (std::size_t i = hist.size() / 2; i + 1 < hist.size(); ++i)
        EXPECT_LE(hist[i + 1], hist[i] * 1.10 + 1e-14);
}

TEST(EigenTest, CubeEigenvalueInThreeDimensions) {
    const auto grid = GridDomain(
        ConvexDomain::box({-kPi / 2, -kPi / 2, -kPi / 2}, {kPi / 2, kPi / 2, kPi / 2}),
        kPi / 10.0);
    const WideStencil st(grid, DirectionSet::make(3, 2));
    EigenConfig cfg;
    cfg.tolerance = 1e-4;
    const auto est = eigen_inverse_power(st, cfg);
    EXPECT_NEAR(est.mu_h, 1.0 / 3.0, (1.0 / 3.0) * 0.08);
    EXPECT_GT(est.eigenfield.min_interior(), 0.0);
}

TEST(EigenTest, ReportsNonConvergenceWhenTheOuterCapIsTooLow) {
    const auto grid = square_grid(kPi, kPi / 16.0);
    const WideStencil st(grid, DirectionSet::make(2, 2));
    EigenConfig cfg;
    cfg.max_outer = 3;
    const auto est = eigen_inverse_power(st, cfg);
    EXPECT_FALSE(est.converged);
    EXPECT_EQ(est.iterations, 3);
}

TEST(EigenTest, StartScaleDoesNotChangeTheIterates) {
    const auto grid = square_grid(kPi, kPi / 16.0);
    const WideStencil st(grid, DirectionSet::make(2, 2));
    ScalarField one(grid), seven(grid);
    one.fill_interior(1.0);
    seven.fill_interior(7.0);
    const auto a = eigen_inverse_power(st, {}, &one);
    const auto b = eigen_inverse_power(st, {}, &seven);
    EXPECT_EQ(a.mu_h, b.mu_h);
    EXPECT_EQ(a.iterations, b.iterations);
    ASSERT_EQ(a.residual_history.size(), b.residual_history.size());
    for (std::size_t i = 0; i < a.residual_history.size(); ++i)
        EXPECT_EQ(a.residual_history[i], b.residual_history[i]);
}

TEST(EigenTest, WarmStartOnAnotherGridIsRejected) {
    const auto grid = square_grid(kPi, kPi / 8.0);
    const auto other = square_grid(kPi, kPi / 16.0);
    const WideStencil st(grid, DirectionSet::make(2, 2));
    ScalarField w(other);
    w.fill_interior(1.0);
    EXPECT_THROW(eigen_inverse_power(st, {}, &w), std::invalid_argument);
    ScalarField z(grid);  // identically zero start
    EXPECT_THROW(eigen_inverse_power(st, {}, &z), std::invalid_argument);
}

TEST(CertifierTest, CubeEigenfunctionBoundsTheEigenvalue) {
    const auto grid = square_grid(kPi, kPi / 64.0);
    const WideStencil st(grid, DirectionSet::make(2, 4));
    const auto pair = cube_eigenpair(2, kPi / 2.0);
    ScalarField phi(grid);
    phi.assign_interior([&](std::span<const double> x) { return pair.value(x); });
    EXPECT_TRUE(bnv_certify_lower_bound(st, 0.49, phi));
    EXPECT_FALSE(bnv_certify_lower_bound(st, 0.60, phi));

    ScalarField neg(grid);
    neg.fill_interior(-1.0);
    EXPECT_THROW(bnv_certify_lower_bound(st, 0.49, neg), std::invalid_argument);
}

TEST(ProlongateTest, ExactOnBilinearFieldsAwayFromTheBoundary) {
    const auto coarse_grid = square_grid(2.0, 0.25);
    const auto fine_grid = square_grid(2.0, 0.125);
    ScalarField coarse(coarse_grid);
    for (std::int64_t i = 0; i < coarse_grid.node_count(); ++i) {
        const auto x = coarse_grid.point_of(i);
        coarse[i] = 1.0 + x[0] + 2.0 * x[1] + 0.5 * x[0] * x[1];
    }
    const auto fine = prolongate(coarse, fine_grid);
    for (auto flat : fine_grid.interior_nodes()) {
        const auto x = fine_grid.point_of(flat);
        if (fine_grid.domain().boundary_gap(x) < 0.5) continue;
        EXPECT_NEAR(fine[flat], 1.0 + x[0] + 2.0 * x[1] + 0.5 * x[0] * x[1], 1e-12);
    }
}

TEST(ProlongateTest, CarriesACoarseEigenfieldToTheFineGrid) {
    const auto pair = cube_eigenpair(2, kPi / 2.0);
    const auto coarse_grid = square_grid(kPi, kPi / 8.0);
    const auto fine_grid = square_grid(kPi, kPi / 16.0);
    ScalarField coarse(coarse_grid);
    coarse.assign_interior([&](std::span<const double> x) { return pair.value(x); });
    const auto fine = prolongate(coarse, fine_grid);
    // the square-root boundary profile caps the accuracy of linear transfer
    // near the wall, which is fine for a warm start; the bulk is much better
    EXPECT_LT(sup_error(fine, [&](std::span<const double> x) { return pair.value(x); }), 0.2);
    double bulk = 0.0;
    for (auto flat : fine_grid.interior_nodes()) {
        const auto x = fine_grid.point_of(flat);
        if (fine_grid.domain().boundary_gap(x) < 0.5) continue;
        bulk = std::max(bulk, std::abs(fine[flat] - pair.value(x)));
    }
    EXPECT_LT(bulk, 0.04);
}

TEST(ThreadingTest, SweepAndEigenResultsAreBitIdenticalAcrossThreadCounts) {
    const auto grid = disc_grid(1.0, kPi / 48.0);
    const WideStencil st(grid, DirectionSet::make(2, 3));
    ScalarField f(grid);
    f.assign_interior([](std::span<const double> x) { return -1.0 - x[0] + 0.5 * x[1]; });

    std::vector<ScalarField> sols;
    std::vector<double> mus;
    for (int threads : {1, 2, 8}) {
        SolveConfig cfg;
        cfg.threads = threads;
        cfg.tolerance = 1e-11;
        sols.push_back(st.solve_dirichlet(f, cfg).u);
        EigenConfig ec;
        ec.threads = threads;
        mus.push_back(eigen_inverse_power(st, ec).mu_h);
    }
    for (std::size_t k = 1; k < sols.size(); ++k) {
        EXPECT_EQ(mus[k], mus[0]);
        EXPECT_EQ(std::memcmp(sols[k].values().data(), sols[0].values().data(),
                              sizeof(double) * std::size_t(grid.node_count())),
                  0);
    }
}

TEST(ThreadingTest, EnvironmentFallbackParsesPositiveCounts) {
    EXPECT_EQ(resolve_threads(3), 3);
    setenv("TRUNCLAP_THREADS", "5", 1);
    EXPECT_EQ(resolve_threads(0), 5);
    setenv("TRUNCLAP_THREADS", "bogus", 1);
    EXPECT_EQ(resolve_threads(0), 1);
    unsetenv("TRUNCLAP_THREADS");
    EXPECT_EQ(resolve_threads(0), 1);
}
