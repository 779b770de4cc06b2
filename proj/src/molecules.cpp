#include "coorbit/molecules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coorbit/parallel.hpp"

namespace coorbit {
namespace {

constexpr std::size_t kOff = static_cast<std::size_t>(-1);

double minimal_image(double d, double period) { return period > 0 ? d - period * std::round(d / period) : d; }

// Sample maps for z -> p^-1 z. Both groups act separably on the grid axes.
struct Pullback {
    std::vector<std::size_t> ix, iy;
};

Pullback pullback_maps(const GroupGridFn& F, const GroupPoint& p) {
    Pullback pb;
    pb.ix.resize(F.nx(), kOff);
    pb.iy.resize(F.ny(), kOff);
    const double P = F.x.period;
    const double half = P > 0 ? 0.5 * P : kInf;
    const bool heis = F.spec.kind == GroupKind::Heisenberg;
    const double a = heis ? 1.0 : p.y();
    for (std::size_t i = 0; i < F.nx(); ++i) {
        const double u = minimal_image(F.x[i] - p.x(), P) / a;
        if (u < -half - 1e-12 || u >= half - 1e-12) continue;
        if (auto n = F.x.nearest(u)) pb.ix[i] = *n;
    }
    for (std::size_t j = 0; j < F.ny(); ++j) {
        const double v = heis ? F.y[j] - p.y() : F.y[j] / p.y();
        if (auto n = F.y.nearest(v)) pb.iy[j] = *n;
    }
    return pb;
}

// Bilinear value of |F| at a continuous position; negative when outside.
double bilinear_abs(const GroupGridFn& F, double xv, double yv) {
    double px = F.x.position(xv);
    const double py = F.y.position(yv);
    const double nx = static_cast<double>(F.nx()), ny = static_cast<double>(F.ny());
    if (F.x.period > 0)
        px = std::fmod(std::fmod(px, nx) + nx, nx);
    else if (px < 0 || px > nx - 1)
        return -1;
    if (py < 0 || py > ny - 1) return -1;
    const auto x0 = static_cast<std::size_t>(std::floor(px)), y0 = static_cast<std::size_t>(std::floor(py));
    const std::size_t x1 = F.x.period > 0 ? (x0 + 1) % F.nx() : std::min(x0 + 1, F.nx() - 1);
    const std::size_t y1 = std::min(y0 + 1, F.ny() - 1);
    const double fx = px - std::floor(px), fy = py - std::floor(py);
    return (1 - fy) * ((1 - fx) * std::abs(F.at(x0, y0)) + fx * std::abs(F.at(x1, y0))) +
           fy * ((1 - fx) * std::abs(F.at(x0, y1)) + fx * std::abs(F.at(x1, y1)));
}

void require_family(const MoleculeFamily& fam) {
    if (fam.size() == 0) fail(ErrorCode::EmptyFamily, "molecule family is empty");
}

double coorbit_norm_of(const SignalGrid& f, const WindowSpec& g, const GroupSpec& spec, const MixedNormParams& params,
                       const TransformGrids& grids) {
    return mixed_norm(group_transform(f, g, spec, grids), params);
}

double safe_ratio(double lhs, double rhs) {
    if (rhs > 0) return lhs / rhs;
    return lhs > 0 ? kInf : 0.0;
}

}  // namespace

MoleculeFamily make_molecule_family(std::vector<SignalGrid> members, PointFamily locations) {
    if (members.size() != locations.size()) fail(ErrorCode::InvalidInput, "member and location counts differ");
    for (const auto& p : locations.points) validate_point(locations.spec, p);
    for (std::size_t i = 1; i < members.size(); ++i) members[0].require_same_grid(members[i]);
    MoleculeFamily fam;
    fam.group = locations.spec;
    fam.members = std::move(members);
    fam.locations = std::move(locations);
    return fam;
}

MoleculeFamily atom_family(const WindowSpec& g, const PointFamily& points, const SignalGrid& grid) {
    std::vector<SignalGrid> members(points.size());
    const bool heis = points.spec.kind == GroupKind::Heisenberg;
    parallel_for(points.size(), [&](std::size_t i) {
        const auto& p = points.points[i];
        members[i] = heis ? tf_atom(g, grid, p.x(), p.y()) : wavelet_atom(g, grid, p.x(), p.y());
    });
    return make_molecule_family(std::move(members), points);
}

GroupGridFn group_transform(const SignalGrid& f, const WindowSpec& g, const GroupSpec& spec, const TransformGrids& grids) {
    if (spec.d != 1) fail(ErrorCode::UnsupportedDimension, "transforms are implemented for d = 1");
    return spec.kind == GroupKind::Heisenberg ? stft(f, g, grids.phase) : cwt(f, g, grids.scales);
}

Neighborhood default_neighborhood(const GroupSpec& spec) {
    return spec.kind == GroupKind::Heisenberg ? Neighborhood::heisenberg_cube(0.5, spec.d) : Neighborhood::affine(0.5, 2.0, spec.d);
}

Envelope make_envelope(GroupGridFn H, const Neighborhood& U, const WeightSpec& weight) {
    Envelope e;
    const auto rep = amalgam_report(H, U, weight, Side::Right);
    e.H = std::move(H);
    e.U = U;
    e.weight = weight;
    e.amalgam = rep.norm;
    e.truncation_estimate = rep.truncation_estimate;
    e.tail_ratio = rep.tail_ratio;
    e.finite = rep.finite;
    return e;
}

Envelope envelope_extract(const MoleculeFamily& fam, const WindowSpec& g, const Neighborhood& U, const WeightSpec& weight,
                          const EnvelopeOptions& opt) {
    require_family(fam);
    GroupGridFn H = group_transform(fam.members.front().zeros_like(), g, fam.group, opt.grids);
    const std::size_t nx = H.nx(), ny = H.ny();
    std::vector<double> best(H.size(), 0.0);
    if (!opt.bilinear) {
        // Members are transformed one at a time; each thread keeps its own running max.
        const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), fam.size()));
        std::vector<std::vector<double>> partial(chunks, std::vector<double>(H.size(), 0.0));
        parallel_for(chunks, [&](std::size_t t) {
            auto& acc = partial[t];
            for (std::size_t i = t; i < fam.size(); i += chunks) {
                const GroupGridFn F = group_transform(fam.members[i], g, fam.group, opt.grids);
                const auto pb = pullback_maps(F, fam.locations.points[i]);
                for (std::size_t iy = 0; iy < ny; ++iy) {
                    if (pb.iy[iy] == kOff) continue;
                    const std::size_t row = pb.iy[iy] * nx;
                    for (std::size_t ix = 0; ix < nx; ++ix) {
                        if (pb.ix[ix] == kOff) continue;
                        double& b = acc[row + pb.ix[ix]];
                        b = std::max(b, std::abs(F.at(ix, iy)));
                    }
                }
            }
        });
        for (const auto& acc : partial)
            for (std::size_t k = 0; k < best.size(); ++k) best[k] = std::max(best[k], acc[k]);
    } else {
        for (std::size_t i = 0; i < fam.size(); ++i) {
            const GroupGridFn F = group_transform(fam.members[i], g, fam.group, opt.grids);
            const auto& p = fam.locations.points[i];
            parallel_for(ny, [&](std::size_t iy) {
                for (std::size_t ix = 0; ix < nx; ++ix) {
                    const auto q = group_mul(fam.group, p, H.point(ix, iy));
                    double& b = best[iy * nx + ix];
                    b = std::max(b, bilinear_abs(F, q.x(), q.y()));
                }
            });
        }
    }
    for (std::size_t k = 0; k < H.size(); ++k) H.values[k] = best[k];
    return make_envelope(std::move(H), U, weight);
}

MoleculeVerdict verify_molecule(const MoleculeFamily& fam, const WindowSpec& g, const Envelope& H, double slack,
                                const TransformGrids& grids) {
    MoleculeVerdict v;
    if (fam.size() == 0) return v;
    if (!(slack >= 1.0)) fail(ErrorCode::InvalidInput, "slack must be at least 1");
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const GroupGridFn F = group_transform(fam.members[i], g, fam.group, grids);
        if (!(F.x == H.H.x) || !(F.y == H.H.y)) fail(ErrorCode::InvalidInput, "envelope is not on the transform grid");
        const auto pb = pullback_maps(F, fam.locations.points[i]);
        for (std::size_t iy = 0; iy < F.ny(); ++iy) {
            if (pb.iy[iy] == kOff) continue;
            for (std::size_t ix = 0; ix < F.nx(); ++ix) {
                if (pb.ix[ix] == kOff) continue;
                const double a = std::abs(F.at(ix, iy));
                if (a == 0.0) continue;
                const double r = safe_ratio(a, std::abs(H.H.at(pb.ix[ix], pb.iy[iy])));
                if (r > v.worst_ratio) {
                    v.worst_ratio = r;
                    v.worst_point = F.point(ix, iy);
                    v.worst_member = i;
                }
            }
        }
    }
    v.ok = v.worst_ratio <= slack;
    return v;
}

BoundReport molecule_synthesis_bound(const MoleculeFamily& fam, const WindowSpec& g, const Envelope& H,
                                     const SequenceData& c, const MixedNormParams& params, const TransformGrids& grids) {
    require_family(fam);
    if (c.coeffs.size() != fam.size()) fail(ErrorCode::InvalidInput, "coefficients are indexed by a different family");
    SignalGrid f = fam.members.front().zeros_like();
    for (std::size_t i = 0; i < fam.size(); ++i)
        if (c.coeffs[i] != 0.0)
            for (std::size_t n = 0; n < f.size(); ++n) f.values[n] += c.coeffs[i] * fam.members[i].values[n];
    BoundReport r;
    r.lhs = coorbit_norm_of(f, g, fam.group, params, grids);
    SequenceData located{fam.locations, c.coeffs};
    r.rhs = sequence_norm(located, params, H.U) * H.amalgam;
    r.ratio = safe_ratio(r.lhs, r.rhs);
    return r;
}

BoundReport molecule_analysis_bound(const MoleculeFamily& fam, const WindowSpec& g, const Envelope& H,
                                    const SignalGrid& f, const MixedNormParams& params, const TransformGrids& grids) {
    require_family(fam);
    const auto left = amalgam_report(H.H, H.U, H.weight, Side::Left);
    if (!left.finite || !H.finite) {
        std::ostringstream os;
        os << "envelope needs finite left and right amalgam norms (left tail ratio " << left.tail_ratio << ", right "
           << H.tail_ratio << ")";
        fail(ErrorCode::HypothesisViolation, os.str());
    }
    SequenceData c{fam.locations, std::vector<Complex>(fam.size())};
    for (std::size_t i = 0; i < fam.size(); ++i) c.coeffs[i] = inner(f, fam.members[i]);
    BoundReport r;
    r.lhs = sequence_norm(c, params, H.U);
    r.rhs = coorbit_norm_of(f, g, fam.group, params, grids);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    return r;
}

}  // namespace coorbit
