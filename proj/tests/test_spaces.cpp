#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "coorbit/spaces.hpp"
#include "doctest.h"

using namespace coorbit;

namespace {

GroupGridFn affine_default() {
    return GroupGridFn(GroupSpec::affine(), GridAxis::uniform(-8.0, 1.0 / 64, 1024), GridAxis::scales(1.0 / 32, 32, 16));
}

GroupGridFn phase_default() {
    return GroupGridFn(GroupSpec::heisenberg(), GridAxis::uniform(-8, 0.125, 128), GridAxis::uniform(-8, 0.125, 128));
}

double power_profile(double x, double s, double a, double b, double g) {
    return std::pow(s, a) * std::pow(1 + s, -b) * std::pow(1 + std::abs(x), -g);
}

template <class F>
double adaptive(F f, double lo, double hi) {
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 10, 1e-7);
}

// Right local max of the power profile over the continuum set U^{-1} z^{-1},
// restricted to the sampled domain [x_lo, x_hi] x [s_lo, s_hi].
double continuum_right_max(double x, double s, double a, double b, double al, double be, double ga, double x_lo,
                           double x_hi, double s_lo, double s_hi) {
    const double v_lo = std::max(1.0 / (s * b), s_lo), v_hi = std::min(b / s, s_hi);
    if (v_lo > v_hi) return 0.0;
    double best = 0.0;
    auto value = [&](double v) {
        double u_lo = std::max(-v * (x + s * a), x_lo), u_hi = std::min(-v * (x - s * a), x_hi);
        if (u_lo > u_hi) return 0.0;
        const double dist = (u_lo <= 0 && u_hi >= 0) ? 0.0 : std::min(std::abs(u_lo), std::abs(u_hi));
        return power_profile(dist, v, al, be, ga);
    };
    const int n = 48;
    double arg = v_lo;
    for (int i = 0; i <= n; ++i) {
        const double v = v_lo * std::pow(v_hi / v_lo, static_cast<double>(i) / n);
        const double val = value(v);
        if (val > best) best = val, arg = v;
    }
    // Golden-section refinement around the best sample in log scale.
    double lo = std::max(std::log(v_lo), std::log(arg) - std::log(v_hi / v_lo) / n);
    double hi = std::min(std::log(v_hi), std::log(arg) + std::log(v_hi / v_lo) / n);
    for (int it = 0; it < 60; ++it) {
        const double m1 = hi - 0.618 * (hi - lo), m2 = lo + 0.618 * (hi - lo);
        if (value(std::exp(m1)) < value(std::exp(m2)))
            lo = m1;
        else
            hi = m2;
    }
    return std::max(best, value(std::exp(0.5 * (lo + hi))));
}

}  // namespace

TEST_SUITE("spaces") {
    TEST_CASE("weights and symmetrization") {
        CHECK(eval_weight(WeightSpec::polynomial(2), {3, 4}) == doctest::Approx(36));
        CHECK(eval_weight(WeightSpec::power_scale(1), {0.7, 2}) == doctest::Approx(0.5));
        CHECK(eval_weight(WeightSpec::constant(1), {1, 1}) == 1.0);

        auto sym_poly = symmetrize_weight(WeightSpec::polynomial(1.5), GroupSpec::heisenberg());
        auto sym_aff = symmetrize_weight(WeightSpec::power_scale(0), GroupSpec::affine());
        auto sym_sig = symmetrize_weight(WeightSpec::power_scale(0.7), GroupSpec::affine());
        auto G = affine_default();
        for (std::size_t iy = 0; iy < G.ny(); iy += 7)
            for (std::size_t ix = 0; ix < G.nx(); ix += 97) {
                const GroupPoint p = G.point(ix, iy);
                CHECK(eval_weight(sym_aff, p) == doctest::Approx(std::max(1.0, p.y())));
                const auto inv = group_inv(GroupSpec::affine(), p);
                const double direct = eval_weight(WeightSpec::power_scale(0.7), p);
                const double mirrored =
                    eval_weight(WeightSpec::power_scale(0.7), inv) * modular_fn(GroupSpec::affine(), inv);
                CHECK(eval_weight(sym_sig, p) >= direct * (1 - 1e-12));
                CHECK(eval_weight(sym_sig, p) >= mirrored * (1 - 1e-12));
            }
        for (GroupPoint z : {GroupPoint(1, 2), GroupPoint(-3, 0.5)})
            CHECK(eval_weight(sym_poly, z) == doctest::Approx(eval_weight(WeightSpec::polynomial(1.5), z)));
    }

    TEST_CASE("polynomial weight is submultiplicative up to 2^s") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-20, 20);
        const auto w = WeightSpec::polynomial(2.5);
        for (int t = 0; t < 200; ++t) {
            GroupPoint a(u(rng), u(rng)), b(u(rng), u(rng));
            const auto ab = group_mul(GroupSpec::heisenberg(), a, b);
            CHECK(eval_weight(w, ab) <= std::pow(2.0, 2.5) * eval_weight(w, a) * eval_weight(w, b));
            CHECK(eval_weight(w, ab) <= eval_weight(w, a) * eval_weight(w, b) * (1 + 1e-12));
        }
    }

    TEST_CASE("mixed norm of a single cell and Fubini") {
        auto F = phase_default();
        F.at(70, 40) = 1.0;
        const double V = F.haar_weight(70, 40);
        for (double p : {1.0, 2.0, 3.5}) CHECK(mixed_norm(F, {p, p, WeightSpec::constant()}) == doctest::Approx(std::pow(V, 1 / p)));
        CHECK(mixed_norm(F, {kInf, kInf, WeightSpec::constant()}) == 1.0);

        std::mt19937_64 rng(5);
        std::normal_distribution<double> n01;
        double direct = 0;
        for (std::size_t iy = 0; iy < F.ny(); ++iy)
            for (std::size_t ix = 0; ix < F.nx(); ++ix) {
                F.at(ix, iy) = Complex(n01(rng), n01(rng)) * std::exp(-0.05 * (F.x[ix] * F.x[ix] + F.y[iy] * F.y[iy]));
                direct += std::norm(F.at(ix, iy)) * F.haar_weight(ix, iy);
            }
        CHECK(mixed_norm(F, {2, 2, WeightSpec::constant()}) == doctest::Approx(std::sqrt(direct)).epsilon(1e-12));

        SUBCASE("homogeneity and solidity") {
            auto G = F;
            std::uniform_real_distribution<double> u01(0, 1);
            for (auto& v : G.values) v *= u01(rng);
            for (auto [p, q] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {1.0, kInf}, {kInf, 2.0}, {3.0, 1.5}}) {
                MixedNormParams mp{p, q, WeightSpec::polynomial(1)};
                auto scaled = F;
                for (auto& v : scaled.values) v *= Complex(-1.7, 0.4);
                CHECK(mixed_norm(scaled, mp) ==
                      doctest::Approx(std::abs(Complex(-1.7, 0.4)) * mixed_norm(F, mp)).epsilon(1e-12));
                CHECK(mixed_norm(G, mp) <= mixed_norm(F, mp));
            }
        }
        F.values[3] = std::nan("");
        CHECK_THROWS_AS(mixed_norm(F, {1, 1, WeightSpec::constant()}), CoorbitError);
    }

    TEST_CASE("affine power profile against adaptive quadrature") {
        auto F = affine_default();
        for (std::size_t iy = 0; iy < F.ny(); ++iy)
            for (std::size_t ix = 0; ix < F.nx(); ++ix) F.at(ix, iy) = power_profile(F.x[ix], F.y[iy], 2, 4, 2);
        const double h = F.x.step, r = std::exp2(0.5 / 16);
        const double ix = adaptive([](double x) { return std::pow(1 + std::abs(x), -2.0); }, -8 - h / 2, 0) +
                          adaptive([](double x) { return std::pow(1 + std::abs(x), -2.0); }, 0, 8 - h / 2);
        const double is = adaptive([](double s) { return std::pow(s, 2.0) * std::pow(1 + s, -4.0) / (s * s); },
                                   F.y.first() / r, F.y.last() * r);
        CHECK(mixed_norm(F, {1, 1, WeightSpec::power_scale(0)}) == doctest::Approx(ix * is).epsilon(1e-3));
    }

    TEST_CASE("sequence norms") {
        auto one = make_point_family(DyadicSet{0, 0, 0, 0});
        auto U = Neighborhood::affine(0.25, 2.0);
        const double V = 0.5 * (2.0 - 0.5);  // |B(0,a)| * int_{1/2}^{2} ds/s^2
        CHECK(sequence_norm({one, {1.0}}, {1, 1, WeightSpec::power_scale(0)}, U) == doctest::Approx(V));

        auto gab = make_point_family(GaborLattice{1, 1, -2, 2, -2, 2});
        std::vector<Complex> c(gab.size());
        double l2 = 0;
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = Complex(std::sin(1.0 + i), 0.3 * i), l2 += std::norm(c[i]);
        auto Ucell = Neighborhood::heisenberg_cube(0.5);
        CHECK(sequence_norm({gab, c}, {2, 2, WeightSpec::constant()}, Ucell) == doctest::Approx(std::sqrt(l2)));

        SUBCASE("dyadic closed form matches rasterization") {
            auto dy = make_point_family(DyadicSet{0, 1, -3, 3});
            std::vector<Complex> cd(dy.size());
            for (std::size_t i = 0; i < cd.size(); ++i) cd[i] = Complex(1.0 + 0.1 * i, -0.05 * i);
            auto Ud = Neighborhood::affine(0.5, std::sqrt(2.0));
            SequenceData sd{dy, cd};
            for (auto [p, q] : {std::pair{1.0, 1.0}, {2.0, 2.0}, {2.0, 1.0}, {1.0, 3.0}}) {
                MixedNormParams mp{p, q, WeightSpec::power_scale(1)};
                const double closed = sequence_norm(sd, mp, Ud);
                const double raster = sequence_norm_rasterized(sd, mp, Ud, raster_grid_for(sd, Ud, 64));
                CHECK(closed == doctest::Approx(raster).epsilon(1e-3));
            }
            // Effective weight doubles per octave: a single coefficient at j = 1 costs twice one at j = 0.
            std::vector<Complex> e0(dy.size(), 0.0), e1(dy.size(), 0.0);
            e0[3] = 1.0;
            e1[7 + 3] = 1.0;
            MixedNormParams p1{1, 1, WeightSpec::power_scale(1)};
            const double r = sequence_norm({dy, e1}, p1, Ud) / sequence_norm({dy, e0}, p1, Ud);
            CHECK(r == doctest::Approx(2.0 * 2.0 / 2.0 * 1.0).epsilon(1e-12));
        }

        SUBCASE("gabor closed form with polynomial weight matches rasterization") {
            SequenceData sg{gab, c};
            for (auto [p, q] : {std::pair{1.0, 1.0}, {2.0, 2.0}, {2.0, 1.0}}) {
                MixedNormParams mp{p, q, WeightSpec::polynomial(1)};
                CHECK(sequence_norm(sg, mp, Ucell) ==
                      doctest::Approx(sequence_norm_rasterized(sg, mp, Ucell, raster_grid_for(sg, Ucell, 64))).epsilon(1e-3));
            }
        }
    }

    TEST_CASE("local maximum function") {
        auto F = phase_default();
        for (auto& v : F.values) v = 1.0;
        for (auto side : {Side::Left, Side::Right}) {
            auto G = local_max(F, Neighborhood::heisenberg_cube(0.5), side);
            for (auto v : G.values) CHECK(v.real() == 1.0);
        }

        SUBCASE("spike at the identity gives the indicator of U^-1") {
            auto S = F.zeros_like();
            S.at(64, 64) = 1.0;
            auto U = Neighborhood::heisenberg_box(0.5, 0.25);
            auto G = local_max(S, U, Side::Left);
            for (std::size_t iy = 0; iy < G.ny(); ++iy)
                for (std::size_t ix = 0; ix < G.nx(); ++ix) {
                    const bool inside = std::abs(G.x[ix]) <= 0.5 + 1e-12 && std::abs(G.y[iy]) <= 0.25 + 1e-12;
                    CHECK(G.at(ix, iy).real() == (inside ? 1.0 : 0.0));
                }
        }

        SUBCASE("local max dominates and grows with U") {
            auto A = affine_default();
            std::mt19937_64 rng(9);
            std::uniform_real_distribution<double> u01(0, 1);
            for (auto& v : A.values) v = u01(rng);
            auto small = local_max(A, Neighborhood::affine(0.1, std::exp2(0.25)), Side::Right);
            auto big = local_max(A, Neighborhood::affine(0.3, std::exp2(0.5)), Side::Right);
            auto left = local_max(A, Neighborhood::affine(0.1, std::exp2(0.25)), Side::Left);
            for (std::size_t i = 0; i < A.size(); i += 13) {
                CHECK(left.values[i].real() >= std::abs(A.values[i]) - 1e-15);
                CHECK(big.values[i].real() >= small.values[i].real() - 1e-15);
            }
        }
    }

    TEST_CASE("affine right local max of the power profile") {
        const double al = 2, be = 4, ga = 2, a = 0.5, b = std::sqrt(2.0);
        auto F = affine_default();
        for (std::size_t iy = 0; iy < F.ny(); ++iy)
            for (std::size_t ix = 0; ix < F.nx(); ++ix) F.at(ix, iy) = power_profile(F.x[ix], F.y[iy], al, be, ga);
        auto U = Neighborhood::affine(a, b);
        auto G = local_max(F, U, Side::Right);

        // Pointwise shape bound C s^{beta-alpha} (1+s)^{-beta} (1+|x/s|)^{-gamma}.
        double cmax = 0;
        double worst_rel = 0;
        for (std::size_t iy = 0; iy < F.ny(); iy += 3)
            for (std::size_t ix = 0; ix < F.nx(); ix += 5) {
                const double x = F.x[ix], s = F.y[iy];
                const double shape = std::pow(s, be - al) * std::pow(1 + s, -be) * std::pow(1 + std::abs(x / s), -ga);
                cmax = std::max(cmax, G.at(ix, iy).real() / shape);
                const double cont =
                    continuum_right_max(x, s, a, b, al, be, ga, F.x.first(), F.x.last(), F.y.first(), F.y.last());
                if (cont > 1e-6) worst_rel = std::max(worst_rel, std::abs(G.at(ix, iy).real() - cont) / cont);
            }
        CHECK(std::isfinite(cmax));
        CHECK(cmax < 50);
        CHECK(worst_rel < 1e-3);
    }

    TEST_CASE("amalgam norms") {
        auto Z = phase_default();
        CHECK(amalgam_norm(Z, Neighborhood::heisenberg_cube(0.5), WeightSpec::constant(), Side::Right) == 0.0);

        auto S = Z;
        S.at(50, 80) = 1.0;
        const double a = 0.375;
        // F# is 1 on the samples within a of the spike in both coordinates: 7 x 7 cells.
        CHECK(amalgam_norm(S, Neighborhood::heisenberg_cube(a), WeightSpec::constant(), Side::Left) ==
              doctest::Approx(49 * S.haar_weight(0, 0)));

        SUBCASE("affine power profile against continuum quadrature") {
            const double al = 2, be = 4, ga = 2, ua = 0.5, ub = std::sqrt(2.0);
            auto F = affine_default();
            for (std::size_t iy = 0; iy < F.ny(); ++iy)
                for (std::size_t ix = 0; ix < F.nx(); ++ix) F.at(ix, iy) = power_profile(F.x[ix], F.y[iy], al, be, ga);
            auto rep = amalgam_report(F, Neighborhood::affine(ua, ub), WeightSpec::power_scale(0), Side::Right);
            const double h = F.x.step, r = std::exp2(0.5 / 16);
            auto inner = [&](double s) {
                auto fx = [&](double x) {
                    return continuum_right_max(x, s, ua, ub, al, be, ga, F.x.first(), F.x.last(), F.y.first(),
                                               F.y.last());
                };
                // Kinks at x = 0 and |x| = s a.
                const double k = std::min(s * ua, 7.0);
                return (adaptive(fx, -8 - h / 2, -k) + adaptive(fx, -k, 0) + adaptive(fx, 0, k) +
                        adaptive(fx, k, 8 - h / 2)) /
                       (s * s);
            };
            const double oracle = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                [&](double u) { return inner(std::exp(u)) * std::exp(u); }, std::log(F.y.first() / r),
                std::log(F.y.last() * r), 6, 1e-6);
            CHECK(rep.norm == doctest::Approx(oracle).epsilon(1e-3));
            CHECK(rep.finite);
        }
    }

    TEST_CASE("convolution bound check") {
        auto H = phase_default();
        for (std::size_t iy = 0; iy < H.ny(); ++iy)
            for (std::size_t ix = 0; ix < H.nx(); ++ix)
                H.at(ix, iy) = std::exp(-M_PI * 0.5 * (H.x[ix] * H.x[ix] + H.y[iy] * H.y[iy]));
        auto fam = make_point_family(GaborLattice{1, 1, -2, 2, -2, 2});
        auto U = Neighborhood::heisenberg_cube(0.5);
        MixedNormParams mp{2, 2, WeightSpec::constant()};

        std::vector<Complex> zero(fam.size(), 0.0);
        CHECK(convolution_bound_check({fam, zero}, H, mp, U).lhs == 0.0);

        std::vector<Complex> single(fam.size(), 0.0);
        single[12] = 1.0;  // label (0,0)
        auto one = convolution_bound_check({fam, single}, H, mp, U);
        CHECK(one.lhs == doctest::Approx(mixed_norm(H, mp)));
        CHECK(one.ratio <= 1.0);

        std::mt19937_64 rng(21);
        std::normal_distribution<double> n01;
        double worst = 0;
        for (int t = 0; t < 50; ++t) {
            std::vector<Complex> c(fam.size());
            for (auto& v : c) v = Complex(n01(rng), n01(rng));
            auto r1 = convolution_bound_check({fam, c}, H, mp, U);
            for (auto& v : c) v *= 2.0;
            auto r2 = convolution_bound_check({fam, c}, H, mp, U);
            CHECK(r2.lhs == doctest::Approx(2 * r1.lhs).epsilon(1e-12));
            CHECK(r2.ratio == doctest::Approx(r1.ratio).epsilon(1e-12));
            worst = std::max(worst, r1.ratio);
        }
        CHECK(std::isfinite(worst));
        CHECK(worst > 0);
    }
}
