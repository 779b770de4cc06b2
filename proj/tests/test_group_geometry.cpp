#include <cmath>
#include <random>

#include "coorbit/group_geometry.hpp"
#include "coorbit/spaces.hpp"
#include "doctest.h"

using namespace coorbit;

namespace {

// Smooth bump in (x, log2 s), supported in |x| < 2, 1/4 < s < 4.
double bump(double x, double s) {
    const double r2 = 0.25 * x * x + 0.25 * std::pow(std::log2(s), 2);
    return r2 < 1 ? std::exp(-1.0 / (1.0 - r2)) * (1.0 + 0.3 * x) : 0.0;
}

// Haar quadrature of f on the default affine grid.
template <class F>
double affine_integral(F f) {
    GroupGridFn grid(GroupSpec::affine(), GridAxis::uniform(-8.0, 1.0 / 64, 1024), GridAxis::scales(1.0 / 32, 32, 16));
    double total = 0;
    for (std::size_t iy = 0; iy < grid.ny(); ++iy)
        for (std::size_t ix = 0; ix < grid.nx(); ++ix) total += f(grid.x[ix], grid.y[iy]) * grid.haar_weight(ix, iy);
    return total;
}

}  // namespace

TEST_SUITE("group_geometry") {
    TEST_CASE("affine and phase-plane products") {
        const auto aff = GroupSpec::affine();
        CHECK(group_mul(aff, {1, 2}, {3, 4}) == GroupPoint(7, 8));
        CHECK(group_mul(GroupSpec::heisenberg(), {1, 2}, {3, 4}) == GroupPoint(4, 6));
        CHECK(group_inv(aff, {2, 4}) == GroupPoint(-0.5, 0.25));
        CHECK(group_inv(GroupSpec::heisenberg(), {1, -3}) == GroupPoint(-1, 3));
        CHECK(group_inv(aff, {0, 1}) == GroupPoint(0, 1));
        CHECK_THROWS_AS(group_mul(aff, {0, -1}, {0, 1}), CoorbitError);
        CHECK_THROWS_AS(group_inv(aff, {0, 0}), CoorbitError);
    }

    TEST_CASE("associativity, inverses and modular homomorphism") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> ux(-3, 3), us(0.2, 5);
        for (auto spec : {GroupSpec::heisenberg(), GroupSpec::affine()}) {
            for (int t = 0; t < 100; ++t) {
                GroupPoint p(ux(rng), us(rng)), q(ux(rng), us(rng)), r(ux(rng), us(rng));
                auto lhs = group_mul(spec, group_mul(spec, p, q), r);
                auto rhs = group_mul(spec, p, group_mul(spec, q, r));
                for (int k = 0; k < 2; ++k) CHECK(lhs.coords[k] == doctest::Approx(rhs.coords[k]).epsilon(1e-12));
                auto e = group_mul(spec, p, group_inv(spec, p));
                auto id = identity(spec);
                for (int k = 0; k < 2; ++k) CHECK(std::abs(e.coords[k] - id.coords[k]) < 1e-12);
                CHECK(modular_fn(spec, group_mul(spec, p, q)) ==
                      doctest::Approx(modular_fn(spec, p) * modular_fn(spec, q)).epsilon(1e-12));
                CHECK(modular_fn(spec, p) * modular_fn(spec, group_inv(spec, p)) == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("haar density values") {
        CHECK(haar_density(GroupSpec::affine(), {0, 2}) == 0.25);
        CHECK(haar_density(GroupSpec::affine(), {5, 1}) == 1.0);
        CHECK(haar_density(GroupSpec::heisenberg(), {3, -2}) == 1.0);
        CHECK(haar_density(GroupSpec::affine(2), GroupPoint(std::vector<double>{0, 0, 2})) == 0.125);
    }

    TEST_CASE("left invariance of the affine Haar quadrature") {
        const auto spec = GroupSpec::affine();
        const double base = affine_integral(bump);
        REQUIRE(base > 0);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ux(-1, 1), ul(-1, 1);
        for (int t = 0; t < 10; ++t) {
            const GroupPoint p(ux(rng), std::exp2(ul(rng)));
            const double moved = affine_integral([&](double x, double s) {
                auto q = group_mul(spec, p, {x, s});
                return bump(q.x(), q.y());
            });
            CHECK(std::abs(moved - base) <= 1e-6 * base);
        }
    }

    TEST_CASE("modular function matches the right-translation identity") {
        const auto spec = GroupSpec::affine();
        const double base = affine_integral(bump);
        for (GroupPoint p : {GroupPoint(0, 2), GroupPoint(0.5, 0.5), GroupPoint(-1, std::exp2(0.75))}) {
            const double moved = affine_integral([&](double x, double s) {
                auto q = group_mul(spec, {x, s}, p);
                return bump(q.x(), q.y());
            });
            CHECK(moved == doctest::Approx(base / modular_fn(spec, p)).epsilon(1e-6));
        }
        CHECK(modular_fn(spec, {0, 2}) == 0.5);
    }

    TEST_CASE("point family enumeration") {
        auto g = make_point_family(GaborLattice{1, 1, 0, 1, 0, 1});
        REQUIRE(g.size() == 4);
        CHECK(g.points[0] == GroupPoint(0, 0));
        CHECK(g.points[1] == GroupPoint(0, 1));
        CHECK(g.points[2] == GroupPoint(1, 0));
        CHECK(g.points[3] == GroupPoint(1, 1));
        CHECK(g.labels[2] == std::array<int, 2>{1, 0});

        auto d = make_point_family(DyadicSet{0, 0, -1, 1});
        REQUIRE(d.size() == 3);
        CHECK(d.points[0] == GroupPoint(-1, 1));
        CHECK(d.points[2] == GroupPoint(1, 1));
        auto d2 = make_point_family(DyadicSet{1, 1, 2, 2});
        CHECK(d2.points[0] == GroupPoint(1, 0.5));

        DyadicSet cover{-1, 1, 0, 0, 0.25, std::make_pair(-8.0, 8.0)};
        auto dc = make_point_family(cover);
        CHECK(dc.size() == 32 + 64 + 128);
        CHECK(dc.points.front() == GroupPoint(-8, 2));

        CHECK_THROWS_AS(make_point_family(GaborLattice{1, 1, 1, 0, 0, 0}), CoorbitError);
        CHECK_THROWS_AS(make_point_family(DyadicSet{2, 1, 0, 0}), CoorbitError);
    }

    TEST_CASE("well-spread checks") {
        auto fam = make_point_family(GaborLattice{1, 1, 0, 4, 0, 4});
        auto U = Neighborhood::heisenberg_cube(0.6);
        DomainBox box{{0, 0}, {4, 4}, 41};
        auto rep = check_well_spread(fam, U, box);
        CHECK(rep.u_dense_on_box);
        CHECK(rep.max_overlap == 9);

        // Brute-force pairwise count on the same family as an independent route.
        int brute = 0;
        for (auto& p : fam.points) {
            int c = 0;
            for (auto& q : fam.points)
                if (std::abs(p.x() - q.x()) <= 1.2 && std::abs(p.y() - q.y()) <= 1.2) ++c;
            brute = std::max(brute, c);
        }
        CHECK(brute == rep.max_overlap);

        auto single = make_point_family(GaborLattice{1, 1, 0, 0, 0, 0});
        CHECK_FALSE(check_well_spread(single, U, DomainBox{{-5, -5}, {5, 5}, 11}).u_dense_on_box);

        auto dy = make_point_family(DyadicSet{-1, 1, 0, 0, 0.25, std::make_pair(-4.0, 4.0)});
        auto rep2 = check_well_spread(dy, Neighborhood::affine(0.125, std::sqrt(2.0)), DomainBox{{-3, 0.8}, {3, 1.2}, 25});
        CHECK(rep2.u_dense_on_box);
        CHECK(rep2.max_overlap >= 3);
    }
}
