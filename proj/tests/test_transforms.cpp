#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "coorbit/transforms.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace coorbit;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

SignalGrid gaussian_mix(const SignalGrid& grid, std::uint64_t seed, int terms = 4) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-3, 3), uw(-2, 2);
    std::normal_distribution<double> n01;
    SignalGrid f = grid.zeros_like();
    for (int k = 0; k < terms; ++k) f = f + Complex(n01(rng), n01(rng)) * tf_atom(WindowSpec::gaussian(), grid, ux(rng), uw(rng));
    return f;
}

double max_abs_diff(const GroupGridFn& a, const GroupGridFn& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

double max_abs(const GroupGridFn& a) {
    double m = 0;
    for (auto v : a.values) m = std::max(m, std::abs(v));
    return m;
}

// Plateau cutoff: 1 on [-5, 5], 0 outside (-7.5, 7.5).
double plateau(double x) {
    const double ax = std::abs(x);
    return 1.0 - smooth_step((ax - 5.0) / 2.5);
}

}  // namespace

TEST_SUITE("transforms") {
    TEST_CASE("meyer window normalization and support") {
        const auto g = WindowSpec::meyer();
        for (double w : {0.0, 0.3, 0.5, 2.0, 3.0}) CHECK(std::abs(window_spectrum(g, w)) == 0.0);
        CHECK(std::abs(window_spectrum(g, 1.0)) > 0);
        CHECK(window_spectrum(g, -0.8) == window_spectrum(g, 0.8));
        for (double u = -1; u <= 0; u += 0.01)
            CHECK(std::pow(meyer_profile(u), 2) + std::pow(meyer_profile(u + 1), 2) == doctest::Approx(1.0).epsilon(1e-14));
        auto grid = SignalGrid::standard();
        // Frequency sampling at 1/16 resolves the Meyer bump only to ~1e-5; a longer grid is exact.
        CHECK(tf_atom(g, grid, 0, 0).norm() == doctest::Approx(1.0).epsilon(1e-4));
        SignalGrid wide(-32, 1.0 / 64, 4096);
        CHECK(tf_atom(g, wide, 0, 0).norm() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(wavelet_atom(g, wide, 1.5, 0.5).norm() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(tf_atom(WindowSpec::gaussian(), grid, 0, 0).norm() == doctest::Approx(1.0).epsilon(1e-12));
        // Spectral sampling agrees with direct evaluation of the inverse Fourier integral.
        auto samples = tf_atom(g, wide, 0, 0);
        for (std::size_t n : {2048u, 2066u, 2136u, 2236u}) CHECK(std::abs(samples.values[n] - window_value(g, wide.t(n))) < 1e-7);
    }

    TEST_CASE("stft of the Gaussian window") {
        auto grid = SignalGrid::standard();
        const auto g = WindowSpec::gaussian();
        auto f = tf_atom(g, grid, 0, 0);
        auto V = stft(f, g);
        auto at = [&](double x, double w) { return *V.lookup(x, w); };
        CHECK(std::abs(at(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
        // Quadrature oracle for V(1, 0) and V(0.5, -0.75).
        for (auto [x, w] : {std::pair{1.0, 0.0}, {0.5, -0.75}}) {
            auto re = [&](double t) {
                return (window_value(g, t) * window_value(g, t - x)).real() * std::cos(2 * M_PI * w * t);
            };
            auto im = [&](double t) {
                return -(window_value(g, t) * window_value(g, t - x)).real() * std::sin(2 * M_PI * w * t);
            };
            const Complex oracle(GK::integrate(re, -10, 10, 12, 1e-14), GK::integrate(im, -10, 10, 12, 1e-14));
            CHECK(std::abs(at(x, w) - oracle) < 1e-10);
            CHECK(std::abs(at(x, w)) == doctest::Approx(std::exp(-M_PI * (x * x + w * w) / 2)).epsilon(1e-10));
        }
        auto zero = stft(grid.zeros_like(), g);
        CHECK(max_abs(zero) == 0.0);
    }

    TEST_CASE("window wider than the grid is reported") {
        Warnings w;
        stft(SignalGrid::standard(), WindowSpec::gaussian(8.0), {}, &w);
        CHECK(!w.empty());
        Warnings none;
        stft(SignalGrid::standard(), WindowSpec::gaussian(), {}, &none);
        CHECK(none.empty());
    }

    TEST_CASE("istft round trip, linearity and Moyal") {
        auto grid = SignalGrid::standard();
        const auto g = WindowSpec::gaussian();
        auto f = gaussian_mix(grid, 1);
        auto V = stft(f, g);
        CHECK(relative_error(istft(V, g, grid), f) <= 1e-6);
        CHECK(mixed_norm(V, {2, 2, WeightSpec::constant()}) == doctest::Approx(f.norm()).epsilon(1e-5));
        auto f2 = gaussian_mix(grid, 2);
        auto V2 = stft(f2, g);
        auto sum = V;
        for (std::size_t i = 0; i < sum.size(); ++i) sum.values[i] += V2.values[i];
        CHECK(relative_error(istft(sum, g, grid), istft(V, g, grid) + istft(V2, g, grid)) <= 1e-12);
        CHECK(istft(V.zeros_like(), g, grid).norm() == 0.0);
        CHECK_THROWS_AS(istft(stft(f, g, {0.25, 0.125, 8}), g, SignalGrid(-4, 1.0 / 64, 512)), CoorbitError);
    }

    TEST_CASE("covariance of the STFT") {
        auto grid = SignalGrid::standard();
        const auto g = WindowSpec::gaussian();
        auto f = gaussian_mix(grid, 3);
        const double x = 1.25, w = 0.5;
        auto moved = grid.zeros_like();
        const long shift = std::lround(x / grid.spacing), N = static_cast<long>(grid.size());
        for (long n = 0; n < N; ++n)
            moved.values[n] = std::polar(1.0, 2 * M_PI * w * grid.t(n)) * f.values[((n - shift) % N + N) % N];
        auto V = stft(f, g), Vm = stft(moved, g);
        double worst = 0;
        for (std::size_t j = 0; j < V.ny(); ++j)
            for (std::size_t m = 0; m < V.nx(); ++m) {
                auto src = V.lookup(V.x[m] - x, V.y[j] - w);
                if (!src) continue;
                worst = std::max(worst, std::abs(std::abs(Vm.at(m, j)) - std::abs(*src)));
            }
        CHECK(worst <= 1e-6 * max_abs(V));
    }

    TEST_CASE("cwt basics and covariance") {
        auto grid = SignalGrid::standard();
        const auto g = WindowSpec::meyer();
        auto self = tf_atom(g, grid, 0, 0);
        auto W = cwt(self, g);
        CHECK(std::abs(*W.lookup(0, 1)) == doctest::Approx(self.norm() * self.norm()).epsilon(1e-12));
        CHECK(std::abs(*W.lookup(0, 1)) == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(max_abs(cwt(grid.zeros_like(), g)) == 0.0);

        // |W_g g(0, s)| decays and is non-increasing beyond s = 2.
        double prev = kInf;
        for (std::size_t iy = 0; iy < W.ny(); ++iy) {
            if (W.y[iy] < 2.0) continue;
            const double v = std::abs(*W.lookup(0, W.y[iy]));
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
        CHECK(prev < 1e-12);

        // Covariance under (b, a) = (1, 2), checked with a Gaussian window so wrap-around is negligible.
        const auto gg = WindowSpec::gaussian();
        auto f = wavelet_atom(gg, grid, 0.3, 0.7) + Complex(0.5, -0.2) * wavelet_atom(gg, grid, -1.0, 0.4);
        auto pf = wavelet_atom(gg, grid, 1 + 2 * 0.3, 2 * 0.7) + Complex(0.5, -0.2) * wavelet_atom(gg, grid, 1 - 2.0, 2 * 0.4);
        ScaleGridSpec sg{1.0 / 8, 2.0, 16};
        auto Wf = cwt(f, gg, sg), Wp = cwt(pf, gg, sg);
        double worst = 0;
        for (std::size_t iy = 0; iy < Wp.ny(); ++iy)
            for (std::size_t ix = 0; ix < Wp.nx(); ++ix) {
                const double u = (Wp.x[ix] - 1.0) / 2.0;
                if (std::abs(Wf.x.position(u) - std::round(Wf.x.position(u))) > 1e-9) continue;
                auto src = Wf.lookup(u, Wp.y[iy] / 2.0);
                if (!src) continue;
                worst = std::max(worst, std::abs(Wp.at(ix, iy) - *src));
            }
        CHECK(worst <= 1e-6 * max_abs(Wf));

        Warnings warn;
        cwt(f, g, {}, &warn);
        CHECK(!warn.empty());
    }

    TEST_CASE("inverse wavelet transform") {
        auto grid = SignalGrid::standard();
        const auto g = WindowSpec::meyer();
        auto f = wavelet_atom(g, grid, 0.5, 0.5) + Complex(0.3, 1) * wavelet_atom(g, grid, -2, 2);
        CHECK(relative_error(icwt(cwt(f, g), g, grid), f) < 1e-8);
    }

    TEST_CASE("reproducing formula") {
        auto grid = SignalGrid::standard();
        const auto gh = WindowSpec::gaussian();
        auto fh = tf_atom(gh, grid, 0, 0);
        const double rh = reproducing_check(fh, gh, GroupSpec::heisenberg()).residual;
        CHECK(rh <= 1e-4);
        CHECK(reproducing_check(10.0 * fh, gh, GroupSpec::heisenberg()).residual == doctest::Approx(rh).epsilon(1e-12));
        auto fm = gaussian_mix(grid, 8);
        CHECK(reproducing_check(fm, gh, GroupSpec::heisenberg()).residual <= 1e-4);

        const auto gm = WindowSpec::meyer();
        auto fa = wavelet_atom(gm, grid, 0, 1);
        const double ra = reproducing_check(fa, gm, GroupSpec::affine()).residual;
        CHECK(ra <= 1e-3);
        CHECK(reproducing_check(10.0 * fa, gm, GroupSpec::affine()).residual == doctest::Approx(ra).epsilon(1e-12));
        CHECK_THROWS_AS(reproducing_check(grid.zeros_like(), gm, GroupSpec::affine()), CoorbitError);
    }

    TEST_CASE("hilbert transform") {
        auto grid = SignalGrid::standard();
        // Positive-frequency signal.
        std::vector<Complex> S(grid.size(), 0.0);
        for (std::size_t k = 0; k < S.size(); ++k) {
            const double w = grid_frequency(grid, k);
            if (w > 0) S[k] = std::exp(-std::pow(w - 2, 2));
        }
        auto pos = signal_from_spectrum(grid, S);
        auto Hp = hilbert(pos);
        CHECK(relative_error(Hp, Complex(0, -1) * pos) < 1e-12);

        auto bump = [](double t) { return std::exp(-t * t / 4); };
        auto f = SignalGrid::from_function(-8, 1.0 / 64, 1024, [&](double t) { return std::cos(2 * M_PI * t) * bump(t); });
        auto Hf = hilbert(f);
        double worst = 0, worst_pv = 0, peak = 0;
        for (std::size_t n = 0; n < f.size(); ++n) {
            const double t = f.t(n);
            if (std::abs(t) > 4) continue;
            const double expect = std::sin(2 * M_PI * t) * bump(t);
            peak = std::max(peak, std::abs(expect));
            worst = std::max(worst, std::abs(Hf.values[n] - expect));
            if (n % 16 == 0) {
                auto fr = [&](double u) { return std::cos(2 * M_PI * u) * bump(u); };
                auto integrand = [&](double s) { return s == 0 ? 0.0 : (fr(t - s) - fr(t + s)) / s; };
                double pv = 0;
                for (int k = 0; k < 40; ++k) pv += GK::integrate(integrand, k, k + 1, 10, 1e-12);
                worst_pv = std::max(worst_pv, std::abs(Hf.values[n] - pv / M_PI));
            }
        }
        CHECK(worst <= 1e-3 * peak);
        CHECK(worst_pv <= 1e-3 * peak);
        auto f0 = f;
        Complex mean = 0;
        for (auto v : f.values) mean += v;
        mean /= static_cast<double>(f.size());
        for (auto& v : f0.values) v -= mean;
        CHECK(relative_error(hilbert(hilbert(f0)), -1.0 * f0) <= 1e-10);
        CHECK(Hf.norm() == doctest::Approx(f.norm()).epsilon(1e-10));
        SignalGrid f2 = f;
        f2.d = 2;
        CHECK_THROWS_AS(hilbert(f2), CoorbitError);
    }

    TEST_CASE("weyl quantization") {
        auto grid = SignalGrid::standard();
        auto f = gaussian_mix(grid, 4);

        auto one = symbol_grid(grid);
        for (auto& v : one.values) v = 1.0;
        CHECK(relative_error(weyl_apply(one, f), f) <= 1e-6);
        CHECK(weyl_apply(one, grid.zeros_like()).norm() == 0.0);

        // Multiplication by t, with the symbol cut off smoothly near the period edge.
        auto xs = symbol_grid(grid, 1.0 / 32);
        for (std::size_t j = 0; j < xs.ny(); ++j)
            for (std::size_t i = 0; i < xs.nx(); ++i) xs.at(i, j) = xs.x[i] * plateau(xs.x[i]);
        auto tf = weyl_apply(xs, f);
        double err = 0, ref = 0;
        for (std::size_t n = 0; n < f.size(); ++n) {
            const double t = f.t(n);
            if (std::abs(t) > 4.5) continue;
            err += std::norm(tf.values[n] - t * f.values[n]);
            ref += std::norm(t * f.values[n]);
        }
        CHECK(std::sqrt(err / ref) <= 1e-6);

        // Kernel-integral oracle on Gaussian-mixture symbols.
        std::mt19937_64 rng(17);
        auto probe = tf_atom(WindowSpec::gaussian(), grid, 0.4, 0.3) + Complex(0.5, 0.5) * tf_atom(WindowSpec::gaussian(), grid, -1, -0.5);
        for (int trial = 0; trial < 10; ++trial) {
            const auto bumps = fixtures::random_bumps(rng, 3);
            Warnings w;
            auto out = weyl_apply(fixtures::bump_symbol(grid, bumps), probe, &w);
            CHECK(w.empty());
            CHECK(fixtures::weyl_kernel_error(bumps, probe, out, 4) <= 1e-5);
        }

        // Plane wave at the edge of the resolvable band.
        auto wave = symbol_grid(grid);
        for (std::size_t j = 0; j < wave.ny(); ++j)
            for (std::size_t i = 0; i < wave.nx(); ++i) wave.at(i, j) = std::polar(1.0, 2 * M_PI * 3.75 * wave.x[i]);
        Warnings alias;
        weyl_apply(wave, f, &alias);
        CHECK(!alias.empty());
    }
}
