#include "coorbit/transforms.hpp"

#include <cmath>
#include <sstream>

#include "coorbit/fft.hpp"
#include "coorbit/parallel.hpp"

namespace coorbit {
namespace {

long integer_ratio(double a, double b, const char* what) {
    const double r = a / b;
    const long n = std::lround(r);
    if (n <= 0 || std::abs(r - n) > 1e-6) fail(ErrorCode::InvalidInput, std::string(what) + " is not a whole multiple");
    return n;
}

std::size_t wrap(long i, std::size_t n) {
    const long m = static_cast<long>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

// Layout shared by stft and istft.
struct PhaseLayout {
    std::size_t N, M, J, P;
    long r, R;
    bool folded;
    GridAxis xa, wa;

    PhaseLayout(const SignalGrid& f, const PhaseGridSpec& g) {
        N = f.size();
        const double L = f.period();
        r = integer_ratio(g.dx, f.spacing, "phase-grid x step over signal spacing");
        R = integer_ratio(g.domega * L, 1.0, "phase-grid frequency step times period");
        M = static_cast<std::size_t>(integer_ratio(L, g.dx, "signal period over x step"));
        J = static_cast<std::size_t>(integer_ratio(2 * g.omega_max, g.domega, "frequency range over step"));
        folded = N % R == 0;
        P = folded ? N / R : N;
        xa = GridAxis::uniform(f.offset, g.dx, M, L);
        wa = GridAxis::uniform(-g.omega_max, g.domega, J);
    }

    long signed_freq(std::size_t j) const { return std::lround(wa[j] / wa.step); }
    std::size_t bin(std::size_t j) const {
        const long s = signed_freq(j);
        return folded ? wrap(s, P) : wrap(s * R, N);
    }
};

}  // namespace

GroupGridFn stft(const SignalGrid& f, const WindowSpec& g, const PhaseGridSpec& grid, Warnings* warnings) {
    const PhaseLayout lay(f, grid);
    const auto wv = centered_window_samples(g, f);
    if (warnings) {
        double peak = 0, edge = 0;
        for (std::size_t n = 0; n < lay.N; ++n) {
            peak = std::max(peak, std::abs(wv[n]));
            if (std::abs(fft::signed_bin(n, lay.N)) >= static_cast<long>(lay.N / 2 - lay.N / 16))
                edge = std::max(edge, std::abs(wv[n]));
        }
        if (edge > 1e-8 * peak) {
            std::ostringstream os;
            os << "window wider than signal grid; truncation estimate " << edge / peak;
            warnings->push_back(os.str());
        }
        if (grid.omega_max > 0.5 / f.spacing) warnings->push_back("frequency range exceeds the Nyquist frequency");
    }
    GroupGridFn V(GroupSpec::heisenberg(), lay.xa, lay.wa);
    std::vector<Complex> phase(lay.J);
    for (std::size_t j = 0; j < lay.J; ++j) phase[j] = std::polar(f.spacing, -2 * M_PI * lay.wa[j] * f.offset);

    parallel_for(lay.M, [&](std::size_t m) {
        std::vector<Complex> z(lay.P, 0.0);
        const long shift = static_cast<long>(m) * lay.r;
        for (std::size_t n = 0; n < lay.N; ++n) {
            const Complex y = f.values[n] * std::conj(wv[wrap(static_cast<long>(n) - shift, lay.N)]);
            z[lay.folded ? n % lay.P : n] += y;
        }
        fft::forward(z);
        for (std::size_t j = 0; j < lay.J; ++j) V.at(m, j) = phase[j] * z[lay.bin(j)];
    });
    return V;
}

SignalGrid istft(const GroupGridFn& V, const WindowSpec& g, const SignalGrid& grid) {
    if (V.spec.kind != GroupKind::Heisenberg) fail(ErrorCode::InvalidInput, "istft needs a phase-plane function");
    PhaseGridSpec pg{V.x.step, V.y.step, -V.y.first()};
    const PhaseLayout lay(grid, pg);
    if (!(lay.xa == V.x) || lay.J != V.ny() || std::abs(lay.wa.start - V.y.start) > 1e-12)
        fail(ErrorCode::InvalidInput, "transform grid does not match the signal grid");
    const auto wv = centered_window_samples(g, grid);
    double gnorm2 = 0;
    for (auto v : wv) gnorm2 += std::norm(v);
    gnorm2 *= grid.spacing;

    std::vector<std::vector<Complex>> Z(lay.M);
    parallel_for(lay.M, [&](std::size_t m) {
        std::vector<Complex> c(lay.P, 0.0);
        for (std::size_t j = 0; j < lay.J; ++j)
            c[lay.bin(j)] += V.at(m, j) * std::polar(1.0, 2 * M_PI * lay.wa[j] * grid.offset);
        fft::backward(c);
        Z[m] = std::move(c);
    });
    SignalGrid out = grid.zeros_like();
    const double w = V.x.step * V.y.step / gnorm2;
    parallel_for(lay.N, [&](std::size_t n) {
        Complex acc = 0;
        for (std::size_t m = 0; m < lay.M; ++m)
            acc += Z[m][lay.folded ? n % lay.P : n] * wv[wrap(static_cast<long>(n) - static_cast<long>(m) * lay.r, lay.N)];
        out.values[n] = acc * w;
    });
    return out;
}

GroupGridFn cwt(const SignalGrid& f, const WindowSpec& g, const ScaleGridSpec& grid, Warnings* warnings) {
    if (!has_analytic_spectrum(g)) fail(ErrorCode::Unsupported, "wavelet transforms need a window with analytic spectrum");
    const std::size_t N = f.size();
    GridAxis sa = GridAxis::scales(grid.s_min, grid.s_max, grid.voices);
    GroupGridFn W(GroupSpec::affine(), GridAxis::uniform(f.offset, f.spacing, N, f.period()), sa);
    if (warnings) {
        if (g.kind == WindowSpec::Kind::Gaussian) warnings->push_back("window is not admissible (nonzero mean)");
        const auto [lo, hi] = spectral_band(g);
        const double nyq = 0.5 / f.spacing, fmin = 1.0 / f.period();
        if (hi / sa.first() > nyq) {
            std::ostringstream os;
            os << "scales below " << hi / nyq << " are not resolved by the signal grid";
            warnings->push_back(os.str());
        }
        if (hi / sa.last() < fmin) {
            std::ostringstream os;
            os << "scales above " << hi / fmin << " exceed the grid period";
            warnings->push_back(os.str());
        }
        (void)lo;
    }
    std::vector<Complex> F = f.values;
    fft::forward(F);
    std::vector<double> freq(N);
    for (std::size_t k = 0; k < N; ++k) freq[k] = grid_frequency(f, k);

    parallel_for(sa.n, [&](std::size_t iy) {
        const double s = sa[iy];
        std::vector<Complex> row(N);
        bool any = false;
        for (std::size_t k = 0; k < N; ++k) {
            const Complex m = std::sqrt(s) * std::conj(window_spectrum(g, s * freq[k]));
            row[k] = F[k] * m;
            any = any || row[k] != 0.0;
        }
        if (!any) return;
        fft::backward(row);
        for (std::size_t n = 0; n < N; ++n) W.at(n, iy) = row[n] / static_cast<double>(N);
    });
    return W;
}

SignalGrid icwt(const GroupGridFn& W, const WindowSpec& g, const SignalGrid& grid) {
    const double Cg = calderon_constant(g);
    if (!(Cg > 0)) fail(ErrorCode::Unsupported, "window is not admissible; no Calderon constant");
    const std::size_t N = grid.size();
    if (W.nx() != N) fail(ErrorCode::InvalidInput, "transform grid does not match the signal grid");
    std::vector<Complex> acc(N, 0.0);
    for (std::size_t iy = 0; iy < W.ny(); ++iy) {
        const double s = W.y[iy];
        std::vector<Complex> row(N);
        for (std::size_t n = 0; n < N; ++n) row[n] = W.at(n, iy);
        fft::forward(row);
        const double w = W.y.cell(iy) / (s * s);
        for (std::size_t k = 0; k < N; ++k) acc[k] += w * row[k] * std::sqrt(s) * window_spectrum(g, s * grid_frequency(grid, k));
    }
    fft::backward(acc);
    SignalGrid out = grid.zeros_like();
    for (std::size_t n = 0; n < N; ++n) out.values[n] = acc[n] / (static_cast<double>(N) * Cg);
    return out;
}

SignalGrid hilbert(const SignalGrid& f) {
    if (f.d != 1) fail(ErrorCode::UnsupportedDimension, "the Hilbert transform is implemented for d = 1");
    const std::size_t N = f.size();
    std::vector<Complex> F = f.values;
    fft::forward(F);
    for (std::size_t k = 0; k < N; ++k) {
        const long b = fft::signed_bin(k, N);
        const bool nyquist = N % 2 == 0 && k == N / 2;
        if (b == 0 || nyquist)
            F[k] = 0.0;
        else
            F[k] *= Complex(0.0, b > 0 ? -1.0 : 1.0);
    }
    fft::backward(F);
    SignalGrid out = f.zeros_like();
    for (std::size_t n = 0; n < N; ++n) out.values[n] = F[n] / static_cast<double>(N);
    return out;
}

}  // namespace coorbit
