#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "coorbit/fft.hpp"
#include "coorbit/signal.hpp"

namespace coorbit {

SignalGrid::SignalGrid(double offset_, double spacing_, std::size_t n)
    : d(1), spacing(spacing_), offset(offset_), values(n, Complex(0.0)) {
    if (!(spacing_ > 0) || n < 2) fail(ErrorCode::InvalidInput, "signal grid needs spacing > 0 and N >= 2");
}

SignalGrid SignalGrid::from_function(double offset, double spacing, std::size_t n,
                                     const std::function<Complex(double)>& f) {
    SignalGrid g(offset, spacing, n);
    for (std::size_t i = 0; i < n; ++i) g.values[i] = f(g.t(i));
    return g;
}

SignalGrid SignalGrid::zeros_like() const { return SignalGrid(offset, spacing, values.size()); }

bool SignalGrid::same_grid(const SignalGrid& o) const {
    return o.values.size() == values.size() && std::abs(o.spacing - spacing) <= 1e-12 * spacing &&
           std::abs(o.offset - offset) <= 1e-9 * spacing;
}

void SignalGrid::require_same_grid(const SignalGrid& o) const {
    if (!same_grid(o)) fail(ErrorCode::InvalidInput, "signals live on different grids");
}

double SignalGrid::norm() const {
    double s = 0;
    for (auto v : values) s += std::norm(v);
    return std::sqrt(s * spacing);
}

Complex inner(const SignalGrid& f, const SignalGrid& g) {
    f.require_same_grid(g);
    Complex s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.values[i] * std::conj(g.values[i]);
    return s * f.spacing;
}

double relative_error(const SignalGrid& approx, const SignalGrid& exact) {
    const double ref = exact.norm();
    const double err = (approx - exact).norm();
    return ref > 0 ? err / ref : err;
}

SignalGrid operator+(const SignalGrid& a, const SignalGrid& b) {
    a.require_same_grid(b);
    SignalGrid r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r.values[i] += b.values[i];
    return r;
}

SignalGrid operator-(const SignalGrid& a, const SignalGrid& b) {
    a.require_same_grid(b);
    SignalGrid r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r.values[i] -= b.values[i];
    return r;
}

SignalGrid operator*(Complex c, const SignalGrid& a) {
    SignalGrid r = a;
    for (auto& v : r.values) v *= c;
    return r;
}

std::string WindowSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Gaussian: os << "gaussian"; break;
        case Kind::MeyerBandlimited: os << "meyer"; break;
        case Kind::CustomGrid: os << "custom"; break;
    }
    if (scale != 1.0) os << "(scale=" << scale << ")";
    return os.str();
}

WindowSpec parse_window(const std::string& name) {
    if (name == "gaussian") return WindowSpec::gaussian();
    if (name == "meyer") return WindowSpec::meyer();
    fail(ErrorCode::InvalidInput, "unknown window '" + name + "'");
}

double smooth_step(double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

double meyer_profile(double u) {
    const double au = std::abs(u);
    if (au >= 1) return 0.0;
    return std::cos(0.5 * M_PI * smooth_step(au));
}

namespace {

// Constant making the Meyer window unit-norm: 2 c^2 ln2 int theta(u)^2 2^u du = 1.
double meyer_constant() {
    static const double c = [] {
        auto f = [](double u) { return std::pow(meyer_profile(u), 2) * std::exp2(u); };
        using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
        const double I = GK::integrate(f, -1.0, 0.0, 15, 1e-15) + GK::integrate(f, 0.0, 1.0, 15, 1e-15);
        return 1.0 / std::sqrt(2.0 * std::log(2.0) * I);
    }();
    return c;
}

double base_spectrum(WindowSpec::Kind kind, double w) {
    if (kind == WindowSpec::Kind::Gaussian) return std::pow(2.0, 0.25) * std::exp(-M_PI * w * w);
    const double aw = std::abs(w);
    if (aw <= 0.5 || aw >= 2.0) return 0.0;
    return meyer_constant() * meyer_profile(std::log2(aw));
}

}  // namespace

bool has_analytic_spectrum(const WindowSpec& w) { return w.kind != WindowSpec::Kind::CustomGrid; }

Complex window_spectrum(const WindowSpec& w, double omega) {
    if (!has_analytic_spectrum(w)) fail(ErrorCode::Unsupported, "custom windows have no analytic spectrum");
    return std::sqrt(w.scale) * base_spectrum(w.kind, w.scale * omega);
}

Complex window_value(const WindowSpec& w, double t) {
    const double a = w.scale;
    if (w.kind == WindowSpec::Kind::Gaussian)
        return std::pow(2.0, 0.25) / std::sqrt(a) * std::exp(-M_PI * t * t / (a * a));
    if (w.kind == WindowSpec::Kind::MeyerBandlimited) {
        // Real even spectrum: g(t) = 2 int_{1/2}^{2} g^(w) cos(2 pi w t) dw, then dilate.
        const double tt = t / a;
        auto f = [&](double om) { return base_spectrum(w.kind, om) * std::cos(2 * M_PI * om * tt); };
        using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
        const double v = 2.0 * (GK::integrate(f, 0.5, 1.0, 12, 1e-14) + GK::integrate(f, 1.0, 2.0, 12, 1e-14));
        return v / std::sqrt(a);
    }
    fail(ErrorCode::Unsupported, "custom windows are sampled, not evaluated");
}

std::pair<double, double> spectral_band(const WindowSpec& w) {
    if (w.kind == WindowSpec::Kind::Gaussian) return {0.0, 3.45 / w.scale};
    if (w.kind == WindowSpec::Kind::MeyerBandlimited) return {0.5 / w.scale, 2.0 / w.scale};
    fail(ErrorCode::Unsupported, "custom windows have no analytic band");
}

double calderon_constant(const WindowSpec& w) {
    if (w.kind == WindowSpec::Kind::MeyerBandlimited) return std::pow(meyer_constant(), 2) * std::log(2.0);
    return 0.0;
}

double grid_frequency(const SignalGrid& grid, std::size_t k) {
    return static_cast<double>(fft::signed_bin(k, grid.size())) / grid.period();
}

std::vector<Complex> signal_spectrum(const SignalGrid& f) {
    std::vector<Complex> S = f.values;
    fft::forward(S);
    for (std::size_t k = 0; k < S.size(); ++k)
        S[k] *= f.spacing * std::polar(1.0, -2 * M_PI * grid_frequency(f, k) * f.offset);
    return S;
}

SignalGrid signal_from_spectrum(const SignalGrid& grid, std::vector<Complex> S) {
    if (S.size() != grid.size()) fail(ErrorCode::InvalidInput, "spectrum length mismatch");
    const double L = grid.period();
    for (std::size_t k = 0; k < S.size(); ++k) S[k] *= std::polar(1.0 / L, 2 * M_PI * grid_frequency(grid, k) * grid.offset);
    fft::backward(S);
    SignalGrid out = grid.zeros_like();
    out.values = std::move(S);
    return out;
}

namespace {

// Sum of g(t + m L) over enough images to cover the window's effective support.
Complex periodized_gaussian(const WindowSpec& w, double t, double L) {
    const int images = 1 + static_cast<int>(std::ceil(7.0 * w.scale / L));
    Complex s = 0;
    for (int m = -images; m <= images; ++m) s += window_value(w, t + m * L);
    return s;
}

long custom_index(const WindowSpec& w, const SignalGrid& grid, double t) {
    const SignalGrid& g = w.samples;
    if (!g.same_grid(grid)) fail(ErrorCode::InvalidInput, "custom window must be sampled on the signal grid");
    const double pos = (t - g.offset) / g.spacing;
    const double r = std::round(pos);
    if (std::abs(pos - r) > 1e-6) fail(ErrorCode::InvalidInput, "custom windows only shift by whole samples");
    const long n = static_cast<long>(g.size());
    return ((static_cast<long>(r) % n) + n) % n;
}

}  // namespace

std::vector<Complex> centered_window_samples(const WindowSpec& w, const SignalGrid& grid) {
    const std::size_t N = grid.size();
    const double h = grid.spacing, L = grid.period();
    std::vector<Complex> out(N);
    if (w.kind == WindowSpec::Kind::Gaussian) {
        for (std::size_t n = 0; n < N; ++n) out[n] = periodized_gaussian(w, fft::signed_bin(n, N) * h, L);
    } else if (w.kind == WindowSpec::Kind::MeyerBandlimited) {
        for (std::size_t k = 0; k < N; ++k) out[k] = window_spectrum(w, grid_frequency(grid, k)) / L;
        fft::backward(out);
    } else {
        for (std::size_t n = 0; n < N; ++n)
            out[n] = w.samples.values[custom_index(w, grid, fft::signed_bin(n, N) * h)];
    }
    return out;
}

SignalGrid tf_atom(const WindowSpec& w, const SignalGrid& grid, double x, double omega) {
    SignalGrid out = grid.zeros_like();
    const double L = grid.period();
    if (w.kind == WindowSpec::Kind::Gaussian) {
        for (std::size_t n = 0; n < grid.size(); ++n) {
            const double t = grid.t(n);
            out.values[n] = std::polar(1.0, 2 * M_PI * omega * t) * periodized_gaussian(w, t - x, L);
        }
    } else if (w.kind == WindowSpec::Kind::MeyerBandlimited) {
        std::vector<Complex> S(grid.size());
        for (std::size_t k = 0; k < S.size(); ++k) {
            const double xi = grid_frequency(grid, k);
            S[k] = window_spectrum(w, xi - omega) * std::polar(1.0, -2 * M_PI * (xi - omega) * x);
        }
        out = signal_from_spectrum(grid, std::move(S));
    } else {
        for (std::size_t n = 0; n < grid.size(); ++n) {
            const double t = grid.t(n);
            out.values[n] = std::polar(1.0, 2 * M_PI * omega * t) * w.samples.values[custom_index(w, grid, t - x)];
        }
    }
    return out;
}

SignalGrid wavelet_atom(const WindowSpec& w, const SignalGrid& grid, double x, double s) {
    if (!(s > 0)) fail(ErrorCode::InvalidPoint, "scale must be positive");
    if (w.kind == WindowSpec::Kind::CustomGrid) {
        if (s != 1.0) fail(ErrorCode::Unsupported, "custom windows cannot be dilated");
        return tf_atom(w, grid, x, 0.0);
    }
    WindowSpec ws = w;
    ws.scale = w.scale * s;
    if (w.kind == WindowSpec::Kind::Gaussian) return tf_atom(ws, grid, x, 0.0);
    std::vector<Complex> S(grid.size());
    for (std::size_t k = 0; k < S.size(); ++k) {
        const double xi = grid_frequency(grid, k);
        S[k] = window_spectrum(ws, xi) * std::polar(1.0, -2 * M_PI * xi * x);
    }
    return signal_from_spectrum(grid, std::move(S));
}

}  // namespace coorbit
