#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "coorbit/molecules.hpp"
#include "coorbit/parallel.hpp"

namespace coorbit {
namespace {

constexpr int kMaxOrder = 8;

using Poly = std::vector<double>;

// phi^(n)(t) = P_n(t) exp(-pi t^2) with P_{n+1} = P_n' - 2 pi t P_n.
std::vector<Poly> gaussian_derivative_polys(int count) {
    std::vector<Poly> P{{1.0}};
    for (int n = 1; n < count; ++n) {
        const Poly& prev = P.back();
        Poly next(prev.size() + 1, 0.0);
        for (std::size_t i = 1; i < prev.size(); ++i) next[i - 1] += static_cast<double>(i) * prev[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i + 1] -= 2 * M_PI * prev[i];
        P.push_back(std::move(next));
    }
    return P;
}

double horner(const Poly& p, double t) {
    double v = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * t + *it;
    return v;
}

struct Profile {
    int order = 0;  // derivative order of the bump giving m_00
    double c = 1.0;
    std::vector<Poly> polys;

    double eval(double u, int alpha) const { return c * horner(polys[order + alpha], u) * std::exp(-M_PI * u * u); }
};

Profile make_profile(int M, int N) {
    if (M < -1 || N < -1 || M > kMaxOrder || N > kMaxOrder) {
        std::ostringstream os;
        os << "cannot construct an (" << M << ", " << N << ")-molecule: orders must lie in -1.." << kMaxOrder;
        fail(ErrorCode::Unsupported, os.str());
    }
    Profile pr;
    pr.order = N + 1;
    const int top = std::max(M, 0);
    pr.polys = gaussian_derivative_polys(pr.order + top + 1);
    // Largest normalized decay quotient over all constrained derivatives.
    double worst = 0;
    for (int a = 0; a <= top; ++a)
        for (int i = -12000; i <= 12000; ++i) {
            const double t = i * 1e-3;
            const double v = std::abs(horner(pr.polys[pr.order + a], t)) * std::exp(-M_PI * t * t) *
                             std::pow(1 + std::abs(t), std::max(M, 0));
            worst = std::max(worst, v);
        }
    if (!(worst > 0) || !std::isfinite(worst)) fail(ErrorCode::Unsupported, "molecule normalization is not attainable");
    pr.c = 1.0 / worst;
    return pr;
}

const Profile& cached_profile(int M, int N) {
    static std::mutex lock;
    static std::map<std::pair<int, int>, Profile> cache;
    std::lock_guard<std::mutex> guard(lock);
    auto it = cache.find({M, N});
    if (it == cache.end()) it = cache.emplace(std::make_pair(M, N), make_profile(M, N)).first;
    return it->second;
}

double minimal_image(double d, double period) { return period > 0 ? d - period * std::round(d / period) : d; }

// Fornberg weights for the derivative of the given order on integer nodes -r..r.
std::vector<double> fd_weights(int order, int r) {
    const int n = 2 * r + 1;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = i - r;
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0, c4 = x[0];
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i];
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][order];
    return w;
}

// Order-4 accurate centred derivative of a periodic sampled function.
std::vector<double> periodic_derivative(const std::vector<double>& f, int order, double h) {
    if (order == 0) return f;
    const int r = (order + 1) / 2 + 1;
    const auto w = fd_weights(order, r);
    const long N = static_cast<long>(f.size());
    const double scale = std::pow(h, -order);
    std::vector<double> out(f.size());
    for (long n = 0; n < N; ++n) {
        double acc = 0;
        for (int i = -r; i <= r; ++i) acc += w[i + r] * f[(n + N + i) % N];
        out[n] = acc * scale;
    }
    return out;
}

// Precomputed logs of the samples of an affine grid function above the noise floor.
struct LogSamples {
    std::vector<double> logF, logS, log1S, log1X;
    std::vector<std::size_t> index;
    std::vector<char> boundary;
};

LogSamples log_samples(const GroupGridFn& F) {
    if (F.spec.kind != GroupKind::Affine) fail(ErrorCode::InvalidInput, "decay exponents are fitted on the affine group");
    LogSamples L;
    double peak = 0;
    for (const auto& v : F.values) peak = std::max(peak, std::abs(v));
    if (peak == 0) return L;
    const double floor = 1e-13 * peak;
    const double half = F.x.period > 0 ? 0.5 * F.x.period : std::max(std::abs(F.x.first()), std::abs(F.x.last()));
    const auto band = static_cast<std::size_t>(F.y.kind == GridAxis::Kind::Geometric ? std::lround(1.0 / F.y.step) : 1);
    for (std::size_t iy = 0; iy < F.ny(); ++iy) {
        const double s = F.y[iy];
        const bool edge_scale = iy < band || iy + band >= F.ny();
        for (std::size_t ix = 0; ix < F.nx(); ++ix) {
            const double a = std::abs(F.at(ix, iy));
            if (a <= floor) continue;
            const double x = std::abs(minimal_image(F.x[ix], F.x.period));
            L.logF.push_back(std::log(a));
            L.logS.push_back(std::log(s));
            L.log1S.push_back(std::log1p(s));
            L.log1X.push_back(std::log1p(x));
            L.index.push_back(iy * F.nx() + ix);
            L.boundary.push_back(edge_scale || x > 0.875 * half);
        }
    }
    return L;
}

struct ScanResult {
    double log_max = -kInf;
    std::size_t at = 0;
    bool boundary = false;
};

ScanResult scan(const LogSamples& L, const DecayExponents& e) {
    ScanResult r;
    for (std::size_t k = 0; k < L.logF.size(); ++k) {
        const double v = L.logF[k] - e.alpha * L.logS[k] + e.beta * L.log1S[k] + e.gamma * L.log1X[k];
        if (v > r.log_max) r = {v, k, L.boundary[k] != 0};
    }
    return r;
}

DecayCheck to_check(const GroupGridFn& F, const LogSamples& L, const ScanResult& r) {
    DecayCheck c;
    if (L.logF.empty()) return c;
    c.C_fit = std::exp(r.log_max);
    c.ok = std::isfinite(c.C_fit) && !r.boundary;
    const std::size_t idx = L.index[r.at];
    c.argmax = F.point(idx % F.nx(), idx / F.nx());
    return c;
}

std::string exponent_text(const DecayExponents& e) {
    std::ostringstream os;
    os << "(" << e.alpha << ", " << e.beta << ", " << e.gamma << ")";
    return os.str();
}

}  // namespace

double classical_molecule_value(const ClassicalMoleculeParams& params, double t, int derivative) {
    const Profile& pr = cached_profile(params.M, params.N);
    if (derivative < 0 || derivative > std::max(params.M, 0)) fail(ErrorCode::InvalidInput, "derivative order out of range");
    const double dil = std::ldexp(1.0, params.j);
    return std::pow(dil, 0.5 + derivative) * pr.eval(dil * t - params.k, derivative);
}

SignalGrid classical_molecule_make(const ClassicalMoleculeParams& params, const SignalGrid& grid) {
    if (grid.d != 1) fail(ErrorCode::UnsupportedDimension, "classical molecules are built for d = 1");
    const Profile& pr = cached_profile(params.M, params.N);
    const double dil = std::ldexp(1.0, params.j);
    const double P = grid.period();
    SignalGrid m = grid.zeros_like();
    for (std::size_t n = 0; n < m.size(); ++n) {
        double acc = 0;
        for (int r = -3; r <= 3; ++r) {
            const double u = dil * (grid.t(n) + r * P) - params.k;
            if (std::abs(u) < 14) acc += pr.eval(u, 0);
        }
        m.values[n] = std::sqrt(dil) * acc;
    }
    return m;
}

ClassicalCheck classical_molecule_check(const SignalGrid& m, const ClassicalMoleculeParams& params) {
    if (m.d != 1) fail(ErrorCode::UnsupportedDimension, "classical molecules are checked for d = 1");
    if (params.M < -1 || params.N < -1) fail(ErrorCode::InvalidInput, "orders must be at least -1");
    const double side = std::ldexp(1.0, -params.j);
    const double corner = side * params.k;
    const double h = m.spacing;
    const int top = std::max(params.M, 0);
    if (params.M >= 1 && side / h < 8.0 * params.M) {
        std::ostringstream os;
        os << "grid spacing " << h << " is too coarse for M = " << params.M << " on a cube of side " << side;
        fail(ErrorCode::Resolution, os.str());
    }
    ClassicalCheck out;
    std::ostringstream details;
    const std::size_t N = m.size();
    std::vector<double> re(N), dist(N);
    double l1 = 0;
    for (std::size_t n = 0; n < N; ++n) {
        re[n] = m.values[n].real();
        dist[n] = minimal_image(m.t(n) - corner, m.period());
        l1 += std::abs(m.values[n]) * h;
    }
    for (int a = 0; a <= top; ++a) {
        const auto Dm = periodic_derivative(re, a, h);
        std::vector<double> Dm_im;
        bool has_imag = false;
        for (const auto& v : m.values) has_imag = has_imag || v.imag() != 0.0;
        if (has_imag) {
            std::vector<double> im(N);
            for (std::size_t n = 0; n < N; ++n) im[n] = m.values[n].imag();
            Dm_im = periodic_derivative(im, a, h);
        }
        const double level = std::pow(side, -0.5 - a);
        double worst = 0;
        for (std::size_t n = 0; n < N; ++n) {
            const double val = has_imag ? std::hypot(Dm[n], Dm_im[n]) : std::abs(Dm[n]);
            const double bound = level * std::pow(1 + std::abs(dist[n]) / side, -top);
            worst = std::max(worst, val / bound);
        }
        out.worst_decay_ratio = std::max(out.worst_decay_ratio, worst);
        if (worst > 1.05) details << "derivative " << a << " exceeds the decay bound by " << worst << "; ";
    }
    out.decay_ok = out.worst_decay_ratio <= 1.05;
    for (int b = 0; b <= params.N; ++b) {
        Complex mom = 0;
        for (std::size_t n = 0; n < N; ++n) mom += std::pow(dist[n], b) * m.values[n] * h;
        const double scale = l1 * std::pow(side, b);
        const double ratio = scale > 0 ? std::abs(mom) / scale : 0.0;
        out.worst_moment_ratio = std::max(out.worst_moment_ratio, ratio);
        if (ratio > 1e-6) details << "moment " << b << " is " << std::abs(mom) << "; ";
    }
    out.moments_ok = out.worst_moment_ratio <= 1e-6;
    out.details = details.str();
    return out;
}

DecayCheck decay_ratio_check(const GroupGridFn& F, const DecayExponents& e) {
    const auto L = log_samples(F);
    return to_check(F, L, scan(L, e));
}

DecayCheck wavelet_decay_check(const SignalGrid& m, const WindowSpec& g, const DecayExponents& e, const ScaleGridSpec& scales) {
    return decay_ratio_check(cwt(m, g, scales), e);
}

GroupGridFn power_envelope(const DecayExponents& e, const GroupGridFn& like) {
    GroupGridFn H = like.zeros_like();
    for (std::size_t iy = 0; iy < H.ny(); ++iy) {
        const double s = H.y[iy];
        const double level = std::pow(s, e.alpha) * std::pow(1 + s, -e.beta);
        for (std::size_t ix = 0; ix < H.nx(); ++ix) {
            const double x = std::abs(minimal_image(H.x[ix], H.x.period));
            H.at(ix, iy) = level * std::pow(1 + x, -e.gamma);
        }
    }
    return H;
}

bool power_envelope_admissible(const DecayExponents& e, double sigma, int d) {
    return e.gamma > d && e.beta > e.alpha + sigma && e.alpha + sigma > 0;
}

AmalgamProbe power_envelope_probe(const DecayExponents& e, double sigma, const Neighborhood& U) {
    if (U.spec.kind != GroupKind::Affine) fail(ErrorCode::InvalidInput, "the probe integrates over the affine group");
    const double a = U.a, b = U.b;
    const double lb = std::log(b);
    // sup over v in [1/(s b), b/s] of v^alpha (1+v)^-beta (1 + c v)^-gamma; log-concave in log v.
    auto local_sup = [&](double c, double s) {
        auto slope = [&](double t) {
            const double v = std::exp(t);
            return e.alpha - e.beta * v / (1 + v) - e.gamma * c * v / (1 + c * v);
        };
        const double t1 = -std::log(s) - lb, t2 = -std::log(s) + lb;
        double t;
        if (slope(t1) <= 0)
            t = t1;
        else if (slope(t2) >= 0)
            t = t2;
        else {
            double lo = t1, hi = t2;
            for (int it = 0; it < 30; ++it) {
                const double mid = 0.5 * (lo + hi);
                (slope(mid) > 0 ? lo : hi) = mid;
            }
            t = 0.5 * (lo + hi);
        }
        const double v = std::exp(t);
        return std::exp(e.alpha * t - e.beta * std::log1p(v) - e.gamma * std::log1p(c * v));
    };

    constexpr int kShells = 5, kShellLog2 = 4;
    const double R = std::ldexp(1.0, kShells * kShellLog2);
    using Gauss8 = boost::math::quadrature::gauss<double, 8>;
    using Gauss6 = boost::math::quadrature::gauss<double, 6>;
    auto nodes = [](auto rule, double lo, double hi, std::vector<std::array<double, 2>>& out) {
        const auto& x = rule.abscissa();
        const auto& w = rule.weights();
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < x.size(); ++i) {
            out.push_back({mid + half * x[i], half * w[i]});
            if (x[i] != 0) out.push_back({mid - half * x[i], half * w[i]});
        }
    };
    std::vector<std::array<double, 2>> tnodes;
    const double tmax = std::log(R);
    const int tpanels = static_cast<int>(std::ceil(2 * tmax / 0.5));
    for (int p = 0; p < tpanels; ++p) {
        const double lo = -tmax + p * (2 * tmax / tpanels), hi = lo + 2 * tmax / tpanels;
        nodes(Gauss8{}, lo, hi, tnodes);
    }
    auto shell_of = [&](double x, double s) {
        const double level = std::max(std::abs(std::log2(s)), std::log2(std::max(x, 1.0)));
        return std::clamp(static_cast<int>(std::ceil(level / kShellLog2 - 1e-12)), 1, kShells) - 1;
    };
    std::vector<std::array<double, kShells>> partial(tnodes.size());
    parallel_for(tnodes.size(), [&](std::size_t it) {
        auto& acc = partial[it];
        acc.fill(0.0);
        const double t = tnodes[it][0], wt = tnodes[it][1];
        const double s = std::exp(t);
        // Haar measure dx ds / s^2 with ds = s dt, weight s^-sigma, and the symmetric x half-line doubled.
        const double scale = 2 * wt * std::exp(-t) * std::pow(s, -sigma);
        std::vector<std::array<double, 2>> xnodes;
        const double flat = std::min(s * a, R);
        nodes(Gauss6{}, 0.0, flat, xnodes);
        for (double lo = flat; lo < R; lo *= 4) nodes(Gauss6{}, lo, std::min(4 * lo, R), xnodes);
        for (const auto& [x, wx] : xnodes) {
            const double c = std::max(0.0, x - s * a);
            acc[shell_of(x, s)] += scale * wx * local_sup(c, s);
        }
    });
    AmalgamProbe probe;
    probe.shell_mass.assign(kShells, 0.0);
    for (const auto& acc : partial)
        for (int k = 0; k < kShells; ++k) probe.shell_mass[k] += acc[k];
    for (double m : probe.shell_mass) probe.total += m;
    const double last = probe.shell_mass[kShells - 1], prev = probe.shell_mass[kShells - 2];
    probe.growth = prev > 0 ? last / prev : (last > 0 ? kInf : 0.0);
    probe.finite = std::isfinite(last) && probe.growth < 0.5;
    return probe;
}

MoleculeFamily classical_family(int M, int N, const DyadicSet& cubes, const SignalGrid& grid) {
    if (cubes.step != 1.0) fail(ErrorCode::InvalidInput, "classical molecules sit on dyadic cubes with unit translation step");
    PointFamily points = make_point_family(cubes);
    std::vector<SignalGrid> members(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        members[i] = classical_molecule_make({M, N, points.labels[i][0], points.labels[i][1]}, grid);
    });
    return make_molecule_family(std::move(members), std::move(points));
}

CoorbitEnvelope classical_to_coorbit(const MoleculeFamily& fam, const WindowSpec& g, double sigma, const Neighborhood& U,
                                     std::optional<DecayExponents> fixed) {
    if (fam.size() == 0) fail(ErrorCode::EmptyFamily, "molecule family is empty");
    if (fam.group.kind != GroupKind::Affine) fail(ErrorCode::InvalidInput, "classical molecules live on the affine group");
    const int d = fam.group.d;
    if (fixed && !power_envelope_admissible(*fixed, sigma, d)) {
        std::ostringstream os;
        os << "exponents " << exponent_text(*fixed) << " give an infinite envelope under s^-" << sigma
           << ": convergence needs gamma > d and beta > alpha + sigma > 0";
        fail(ErrorCode::InfiniteEnvelope, os.str());
    }
    const WeightSpec weight = WeightSpec::power_scale(sigma);
    const Envelope E = envelope_extract(fam, g, U, weight);
    const auto L = log_samples(E.H);

    CoorbitEnvelope out;
    std::optional<std::pair<DecayExponents, ScanResult>> pick;
    if (fixed) {
        pick.emplace(*fixed, scan(L, *fixed));
    } else {
        // Smallest alpha, then largest beta, then largest gamma among passing admissible triples.
        for (int al = 0; al <= kMaxOrder && !pick; ++al)
            for (int be = kMaxOrder; be >= 0 && !pick; --be)
                for (int ga = kMaxOrder; ga >= 0 && !pick; --ga) {
                    const DecayExponents e{al, be, ga};
                    if (!power_envelope_admissible(e, sigma, d)) continue;
                    const auto r = scan(L, e);
                    if (!r.boundary) pick.emplace(e, r);
                }
        if (!pick)
            fail(ErrorCode::InfiniteEnvelope,
                 "no integer exponents in 0..8 both bound the family and satisfy gamma > d and beta > alpha + sigma > 0");
    }
    out.exponents = pick->first;
    out.constant = L.logF.empty() ? 0.0 : std::exp(pick->second.log_max);
    GroupGridFn H = power_envelope(out.exponents, E.H);
    for (auto& v : H.values) v *= out.constant;
    out.envelope = make_envelope(std::move(H), U, weight);
    const auto probe = power_envelope_probe(out.exponents, sigma, U);
    out.probe_finite = probe.finite;
    out.envelope.finite = probe.finite;
    out.envelope.tail_ratio = probe.growth;
    out.envelope.amalgam = out.constant * probe.total;
    const double last = out.constant * probe.shell_mass.back();
    out.envelope.truncation_estimate = probe.growth < 1 ? last * probe.growth / (1 - probe.growth) : kInf;
    out.verdict = verify_molecule(fam, g, out.envelope, 1.1);
    return out;
}

}  // namespace coorbit
