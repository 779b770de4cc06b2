#include "coorbit/coorbit_operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "coorbit/parallel.hpp"

namespace coorbit {
namespace {

bool same_weight(const WeightSpec& a, const WeightSpec& b) {
    return a.kind == b.kind && a.param == b.param && a.symmetrized == b.symmetrized;
}

double lp_norm(const SignalGrid& u, double p) {
    double acc = 0;
    for (const auto& v : u.values) acc = std::isinf(p) ? std::max(acc, std::abs(v)) : acc + std::pow(std::abs(v), p);
    return std::isinf(p) ? acc : std::pow(acc * u.spacing, 1.0 / p);
}

SignalGrid combine(const MoleculeFamily& images, const std::vector<Complex>& c) {
    const std::size_t N = images.members.front().size();
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), images.size()));
    std::vector<std::vector<Complex>> partial(chunks, std::vector<Complex>(N, 0.0));
    parallel_for(chunks, [&](std::size_t t) {
        for (std::size_t i = t; i < images.size(); i += chunks) {
            if (c[i] == 0.0) continue;
            const auto& m = images.members[i].values;
            for (std::size_t n = 0; n < N; ++n) partial[t][n] += c[i] * m[n];
        }
    });
    SignalGrid out = images.members.front().zeros_like();
    for (const auto& p : partial)
        for (std::size_t n = 0; n < N; ++n) out.values[n] += p[n];
    return out;
}

void require_images(const FrameSystem& sys, const MoleculeFamily& images) {
    if (images.size() != sys.family.size()) fail(ErrorCode::InvalidInput, "images are not indexed by the frame family");
    if (images.size() == 0) fail(ErrorCode::EmptyFamily, "image family is empty");
    for (std::size_t i = 0; i < images.size(); ++i)
        if (!(images.locations.points[i] == sys.family.points[i]))
            fail(ErrorCode::InvalidInput, "image locations differ from the frame points");
    sys.grid.require_same_grid(images.members.front());
}

std::string describe_params(const CoorbitParams& p) {
    std::ostringstream os;
    os << "p=" << p.mixed.p << " q=" << p.mixed.q;
    if (p.besov_exponent) os << " sigma=" << *p.besov_exponent;
    return os.str();
}

}  // namespace

double besov_weight_exponent(double sigma, double q, int d) {
    return sigma + 0.5 * d - (std::isinf(q) ? 0.0 : d / q);
}

CoorbitParams CoorbitParams::modulation(double p, double q, const WeightSpec& m, const WindowSpec& g) {
    CoorbitParams c;
    c.group = GroupSpec::heisenberg();
    c.window = g;
    c.mixed = {p, q, m};
    return c;
}

CoorbitParams CoorbitParams::besov(double p, double q, double sigma, const WindowSpec& g, int d) {
    CoorbitParams c;
    c.group = GroupSpec::affine(d);
    c.window = g;
    c.mixed = {p, q, WeightSpec::power_scale(besov_weight_exponent(sigma, q, d))};
    c.besov_exponent = sigma;
    return c;
}

double coorbit_norm_of_transform(const GroupGridFn& F, const CoorbitParams& params) {
    if (params.besov_exponent) {
        const WeightSpec expect = WeightSpec::power_scale(besov_weight_exponent(*params.besov_exponent, params.mixed.q, params.group.d));
        if (params.group.kind != GroupKind::Affine || !same_weight(params.mixed.weight, expect))
            fail(ErrorCode::InvalidInput, "Besov parameters need the affine weight s^-(sigma + d/2 - d/q)");
    }
    return mixed_norm(F, params.mixed);
}

double coorbit_norm(const SignalGrid& f, const CoorbitParams& params) {
    return coorbit_norm_of_transform(group_transform(f, params.window, params.group, params.grids), params);
}

double modulation_norm(const SignalGrid& f, const CoorbitParams& params) {
    if (params.group.kind != GroupKind::Heisenberg) fail(ErrorCode::InvalidInput, "modulation norms live on the phase plane");
    return coorbit_norm(f, params);
}

double lp_cutoff(double y) { return 1.0 - smooth_step(std::abs(y) - 1.0); }

double lp_piece(int j, double xi) { return lp_cutoff(std::ldexp(xi, -j)) - lp_cutoff(std::ldexp(xi, 1 - j)); }

LittlewoodPaleyRange lp_range(const SignalGrid& grid) {
    const double lowest = 1.0 / grid.period(), nyquist = 0.5 / grid.spacing;
    return {static_cast<int>(std::floor(std::log2(lowest) + 1e-12)), static_cast<int>(std::ceil(std::log2(nyquist) - 1e-12))};
}

std::vector<double> lp_piece_norms(const SignalGrid& f, double p) {
    const auto range = lp_range(f);
    const auto S = signal_spectrum(f);
    std::vector<double> out;
    for (int j = range.j_lo; j <= range.j_hi; ++j) {
        std::vector<Complex> piece(S.size());
        for (std::size_t k = 0; k < S.size(); ++k) piece[k] = S[k] * lp_piece(j, grid_frequency(f, k));
        out.push_back(lp_norm(signal_from_spectrum(f, std::move(piece)), p));
    }
    return out;
}

double besov_norm_lp(const SignalGrid& f, double p, double q, double sigma, Warnings* warnings) {
    if (!(p >= 1) || !(q >= 1)) fail(ErrorCode::InvalidInput, "Besov exponents need p, q >= 1");
    if (warnings) {
        const auto S = signal_spectrum(f);
        double total = 0;
        for (const auto& v : S) total += std::norm(v);
        if (total > 0 && std::norm(S[0]) > 1e-12 * total)
            warnings->push_back("the mean of the signal is not covered by any dyadic band and is ignored");
    }
    const auto range = lp_range(f);
    const auto pieces = lp_piece_norms(f, p);
    double acc = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const double v = std::exp2(sigma * (range.j_lo + static_cast<int>(i))) * pieces[i];
        acc = std::isinf(q) ? std::max(acc, v) : acc + std::pow(v, q);
    }
    return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

double besov_norm_cwt(const SignalGrid& f, double p, double q, double sigma, const WindowSpec& g, const ScaleGridSpec& scales) {
    CoorbitParams params = CoorbitParams::besov(p, q, sigma, g, f.d);
    params.grids.scales = scales;
    return coorbit_norm(f, params);
}

WindowEquivalence window_equivalence(const std::vector<SignalGrid>& suite, const CoorbitParams& params, const WindowSpec& g1,
                                     const WindowSpec& g2) {
    if (suite.empty()) fail(ErrorCode::InvalidInput, "empty test suite");
    CoorbitParams a = params, b = params;
    a.window = g1;
    b.window = g2;
    std::vector<double> ratios(suite.size(), -1.0);
    parallel_for(suite.size(), [&](std::size_t i) {
        const double n1 = coorbit_norm(suite[i], a), n2 = coorbit_norm(suite[i], b);
        if (n1 > 0 || n2 > 0) ratios[i] = n2 > 0 ? n1 / n2 : kInf;
    });
    WindowEquivalence out{kInf, 0.0};
    for (double r : ratios) {
        if (r < 0) continue;
        out.ratio_min = std::min(out.ratio_min, r);
        out.ratio_max = std::max(out.ratio_max, r);
    }
    if (out.ratio_max == 0.0 && std::isinf(out.ratio_min)) fail(ErrorCode::InvalidInput, "every test signal is zero");
    return out;
}

MoleculeFamily operator_images(const FrameSystem& sys, const std::function<SignalGrid(const SignalGrid&)>& T) {
    MoleculeFamily fam = atom_family(sys.window, sys.family, sys.grid);
    parallel_for(fam.size(), [&](std::size_t i) {
        fam.members[i] = T(fam.members[i]);
        sys.grid.require_same_grid(fam.members[i]);
    });
    return fam;
}

SignalGrid operator_extend(const FrameSystem& sys, const MoleculeFamily& images, const SignalGrid& f) {
    if (!sys.has_duals()) fail(ErrorCode::MissingDual, "operator extension needs the dual window; compute it first");
    require_images(sys, images);
    return combine(images, dual_analysis(sys, f).coeffs);
}

std::vector<SignalGrid> certificate_signals(const FrameSystem& sys, std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(count, 0)));
    for (auto& s : seeds) s = rng();
    std::vector<SignalGrid> out(seeds.size());
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        std::mt19937_64 local(seeds[k]);
        std::normal_distribution<double> n01;
        std::vector<Complex> c(sys.family.size());
        for (auto& v : c) v = Complex(n01(local), n01(local));
        out[k] = synthesis(sys, c);
    }
    return out;
}

Envelope certificate_envelope(const FrameSystem& sys, const MoleculeFamily& images, const WeightSpec& weight,
                              const TransformGrids& grids) {
    require_images(sys, images);
    EnvelopeOptions opt;
    opt.grids = grids;
    return envelope_extract(images, sys.window, default_neighborhood(sys.spec), weight, opt);
}

Certificate boundedness_certificate(const FrameSystem& sys, const MoleculeFamily& images, const std::vector<CoorbitParams>& params,
                                    std::uint64_t seed, int signals) {
    if (params.empty()) fail(ErrorCode::InvalidInput, "no coorbit parameters to certify");
    const Envelope env = certificate_envelope(sys, images, params.front().mixed.weight, params.front().grids);
    return boundedness_certificate(sys, images, env, params, seed, signals);
}

Certificate boundedness_certificate(const FrameSystem& sys, const MoleculeFamily& images, const Envelope& env,
                                    const std::vector<CoorbitParams>& params, std::uint64_t seed, int signals) {
    if (params.empty()) fail(ErrorCode::InvalidInput, "no coorbit parameters to certify");
    if (signals < 1) fail(ErrorCode::InvalidInput, "at least one test signal is needed");
    if (!sys.has_duals()) fail(ErrorCode::MissingDual, "certificates need the dual window; compute it first");
    require_images(sys, images);
    for (const auto& p : params) {
        if (!(p.group == sys.spec)) fail(ErrorCode::InvalidInput, "coorbit parameters live on a different group");
        if (!same_weight(p.mixed.weight, env.weight))
            fail(ErrorCode::InvalidInput, "all parameters of one certificate must share the envelope's weight");
    }
    Certificate cert;
    cert.weight = env.weight;
    cert.seed = seed;
    cert.signals = signals;
    const Neighborhood U = default_neighborhood(sys.spec);
    cert.envelope_norm = env.amalgam;
    cert.envelope_tail_ratio = env.tail_ratio;
    if (!env.finite) {
        std::ostringstream os;
        os << "images are not molecules: envelope tail ratio " << env.tail_ratio << " shows a divergent amalgam norm";
        cert.reason = os.str();
        return cert;
    }

    const auto suite = certificate_signals(sys, seed, signals);
    const std::size_t P = params.size();
    std::vector<double> ratios(suite.size() * P), expansion(suite.size() * P);
    for (std::size_t k = 0; k < suite.size(); ++k) {
        const auto c = dual_analysis(sys, suite[k]);
        const SignalGrid Tf = combine(images, c.coeffs);
        for (std::size_t i = 0; i < P; ++i) {
            const double nf = coorbit_norm(suite[k], params[i]);
            ratios[k * P + i] = nf > 0 ? coorbit_norm(Tf, params[i]) / nf : 0.0;
            expansion[k * P + i] = nf > 0 ? sequence_norm(c, params[i].mixed, U) / nf : 0.0;
        }
    }
    cert.granted = true;
    for (std::size_t i = 0; i < P; ++i) {
        CertificateEntry e;
        e.params = params[i];
        for (std::size_t k = 0; k < suite.size(); ++k) {
            e.max_ratio = std::max(e.max_ratio, ratios[k * P + i]);
            e.frame_constant = std::max(e.frame_constant, expansion[k * P + i]);
        }
        e.bound = cert.slack * e.frame_constant * cert.envelope_norm;
        e.bound_holds = std::isfinite(e.max_ratio) && e.max_ratio <= e.bound;
        if (!e.bound_holds) {
            cert.granted = false;
            cert.reason += "bound fails at " + describe_params(e.params) + "; ";
        }
        cert.results.push_back(std::move(e));
    }
    return cert;
}

WeylMoleculeCheck weyl_tf_molecule_check(const GroupGridFn& symbol, const FrameSystem& sys, const WeightSpec& weight) {
    if (sys.spec.kind != GroupKind::Heisenberg) fail(ErrorCode::InvalidInput, "Weyl molecules are checked on a Gabor system");
    WeylMoleculeCheck out;
    const WeylOperator op(symbol, sys.grid);
    out.warnings = op.warnings();
    if (!out.warnings.empty()) {
        out.declined = true;
        out.reason = "symbol is not resolved on this grid: " + out.warnings.front();
        return out;
    }
    out.images = operator_images(sys, [&](const SignalGrid& f) { return op.apply(f); });
    out.envelope = envelope_extract(out.images, sys.window, default_neighborhood(sys.spec), weight);
    out.is_molecule_map = out.envelope.finite && verify_molecule(out.images, sys.window, out.envelope, 1 + 1e-9).ok;
    if (!out.envelope.finite) out.reason = "envelope of the images has a divergent amalgam norm";
    return out;
}

}  // namespace coorbit
