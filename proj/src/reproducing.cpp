#include <cmath>

#include "coorbit/fft.hpp"
#include "coorbit/parallel.hpp"
#include "coorbit/transforms.hpp"

namespace coorbit {

GroupGridFn heisenberg_convolution(const GroupGridFn& F, const GroupGridFn& G) {
    if (F.spec.kind != GroupKind::Heisenberg || G.spec.kind != GroupKind::Heisenberg)
        fail(ErrorCode::InvalidInput, "twisted convolution needs phase-plane functions");
    if (!(F.x == G.x) || !(F.y == G.y)) fail(ErrorCode::InvalidInput, "convolution factors need identical grids");
    const long M = static_cast<long>(F.nx()), J = static_cast<long>(F.ny());
    const double dx = F.x.step, dw = F.y.step;

    struct Tap {
        long a, b;
        Complex value;
    };
    double peak = 0;
    for (auto v : G.values) peak = std::max(peak, std::abs(v));
    std::vector<Tap> taps;
    for (long b = -J; b <= J; ++b) {
        auto iy = G.y.nearest(b * dw);
        if (!iy || std::abs(G.y[*iy] - b * dw) > 1e-9 * dw) continue;
        for (long a = -M / 2; a < M - M / 2; ++a) {
            auto ix = G.x.nearest(a * dx);
            if (!ix) continue;
            const Complex v = G.at(*ix, *iy);
            if (std::abs(v) > 1e-14 * peak) taps.push_back({a, b, v * dx * dw});
        }
    }
    // Phase e^{-2 pi i (b dw) y} for every tap frequency offset and source x sample.
    const long b_min = -J, span = 2 * J + 1;
    std::vector<std::vector<Complex>> phase(span);
    for (const auto& t : taps) {
        auto& row = phase[t.b - b_min];
        if (!row.empty()) continue;
        row.resize(M);
        for (long m = 0; m < M; ++m) row[m] = std::polar(1.0, -2 * M_PI * t.b * dw * F.x[m]);
    }

    GroupGridFn out = F.zeros_like();
    parallel_for(static_cast<std::size_t>(J), [&](std::size_t jj) {
        const long j = static_cast<long>(jj);
        for (const auto& t : taps) {
            const long src_j = j - t.b;
            if (src_j < 0 || src_j >= J) continue;
            const auto& ph = phase[t.b - b_min];
            for (long m = 0; m < M; ++m) {
                const long src_m = ((m - t.a) % M + M) % M;
                out.at(m, j) += F.at(src_m, src_j) * t.value * ph[src_m];
            }
        }
    });
    return out;
}

GroupGridFn affine_convolution_with_transform(const GroupGridFn& F, const WindowSpec& g, const WindowSpec& h,
                                              double factor) {
    if (F.spec.kind != GroupKind::Affine) fail(ErrorCode::InvalidInput, "affine convolution needs an affine grid");
    const std::size_t N = F.nx(), S = F.ny();
    const double L = F.x.period > 0 ? F.x.period : F.x.step * static_cast<double>(N);
    std::vector<double> freq(N);
    for (std::size_t k = 0; k < N; ++k) freq[k] = static_cast<double>(fft::signed_bin(k, N)) / L;

    // Spectra of g and h dilated to every grid scale, and row spectra of F.
    std::vector<std::vector<Complex>> gs(S, std::vector<Complex>(N)), hs(S, std::vector<Complex>(N)), Fh(S);
    std::vector<char> active(S, 0);
    parallel_for(S, [&](std::size_t i) {
        const double s = F.y[i];
        for (std::size_t k = 0; k < N; ++k) {
            gs[i][k] = window_spectrum(g, s * freq[k]);
            hs[i][k] = window_spectrum(h, s * freq[k]);
        }
        std::vector<Complex> row(N);
        bool any = false;
        for (std::size_t n = 0; n < N; ++n) row[n] = F.at(n, i), any = any || row[n] != 0.0;
        if (any) fft::forward(row);
        Fh[i] = std::move(row);
        active[i] = any;
    });

    GroupGridFn out = F.zeros_like();
    parallel_for(S, [&](std::size_t is) {
        const double s = F.y[is];
        std::vector<Complex> acc(N, 0.0);
        bool any = false;
        for (std::size_t ir = 0; ir < S; ++ir) {
            if (!active[ir]) continue;
            const double r = F.y[ir];
            const double w = F.y.cell(ir) / (r * r) * factor * r * std::sqrt(s / r);
            for (std::size_t k = 0; k < N; ++k) {
                const Complex kern = hs[ir][k] * std::conj(gs[is][k]);
                if (kern == 0.0) continue;
                acc[k] += w * Fh[ir][k] * kern;
                any = true;
            }
        }
        if (!any) return;
        fft::backward(acc);
        for (std::size_t n = 0; n < N; ++n) out.at(n, is) = acc[n] / static_cast<double>(N);
    });
    return out;
}

ReproducingResult reproducing_check(const SignalGrid& f, const WindowSpec& g, const GroupSpec& spec,
                                    const PhaseGridSpec& phase, const ScaleGridSpec& scales) {
    GroupGridFn V, R;
    if (spec.kind == GroupKind::Heisenberg) {
        V = stft(f, g, phase);
        const GroupGridFn K = stft(tf_atom(g, f, 0.0, 0.0), g, phase);
        R = heisenberg_convolution(V, K);
    } else {
        const double Cg = calderon_constant(g);
        if (!(Cg > 0)) fail(ErrorCode::Unsupported, "window is not admissible for the affine group");
        V = cwt(f, g, scales);
        R = affine_convolution_with_transform(V, g, g, 1.0 / Cg);
    }
    const MixedNormParams l2{2, 2, WeightSpec::constant()};
    const double base = mixed_norm(V, l2);
    if (!(base > 0)) fail(ErrorCode::InvalidInput, "transform vanishes; residual ratio undefined");
    GroupGridFn diff = V;
    for (std::size_t i = 0; i < diff.size(); ++i) diff.values[i] -= R.values[i];
    return {mixed_norm(diff, l2) / base};
}

}  // namespace coorbit
