#include "coorbit/group_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace coorbit {

std::string group_name(GroupKind kind) { return kind == GroupKind::Heisenberg ? "heisenberg" : "affine"; }

GroupKind parse_group_kind(const std::string& name) {
    if (name == "heisenberg") return GroupKind::Heisenberg;
    if (name == "affine") return GroupKind::Affine;
    fail(ErrorCode::InvalidInput, "unknown group '" + name + "'");
}

void validate_point(const GroupSpec& spec, const GroupPoint& p) {
    if (spec.d < 1) fail(ErrorCode::UnsupportedDimension, "dimension must be positive");
    if (p.coords.size() != spec.coord_count())
        fail(ErrorCode::InvalidPoint, "point has " + std::to_string(p.coords.size()) + " coordinates, expected " +
                                          std::to_string(spec.coord_count()));
    for (double c : p.coords)
        if (!std::isfinite(c)) fail(ErrorCode::InvalidPoint, "non-finite coordinate");
    if (spec.kind == GroupKind::Affine && !(p.coords.back() > 0.0))
        fail(ErrorCode::InvalidPoint, "affine scale must be positive");
}

GroupPoint identity(const GroupSpec& spec) {
    GroupPoint e(std::vector<double>(spec.coord_count(), 0.0));
    if (spec.kind == GroupKind::Affine) e.coords.back() = 1.0;
    return e;
}

GroupPoint group_mul(const GroupSpec& spec, const GroupPoint& p, const GroupPoint& q) {
    validate_point(spec, p);
    validate_point(spec, q);
    GroupPoint r(std::vector<double>(spec.coord_count()));
    if (spec.kind == GroupKind::Heisenberg) {
        for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] = p.coords[i] + q.coords[i];
    } else {
        const double s = p.coords.back();
        for (int i = 0; i < spec.d; ++i) r.coords[i] = p.coords[i] + s * q.coords[i];
        r.coords.back() = s * q.coords.back();
    }
    return r;
}

GroupPoint group_inv(const GroupSpec& spec, const GroupPoint& p) {
    validate_point(spec, p);
    GroupPoint r(std::vector<double>(spec.coord_count()));
    if (spec.kind == GroupKind::Heisenberg) {
        for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] = -p.coords[i];
    } else {
        const double s = p.coords.back();
        for (int i = 0; i < spec.d; ++i) r.coords[i] = -p.coords[i] / s;
        r.coords.back() = 1.0 / s;
    }
    return r;
}

double haar_density(const GroupSpec& spec, const GroupPoint& p) {
    validate_point(spec, p);
    if (spec.kind == GroupKind::Heisenberg) return 1.0;
    return std::pow(p.coords.back(), -(spec.d + 1));
}

double modular_fn(const GroupSpec& spec, const GroupPoint& p) {
    validate_point(spec, p);
    if (spec.kind == GroupKind::Heisenberg) return 1.0;
    return std::pow(p.coords.back(), -spec.d);
}

Neighborhood Neighborhood::heisenberg_box(double a, double a_freq, int d) {
    if (!(a > 0 && a_freq > 0)) fail(ErrorCode::InvalidInput, "neighborhood half-widths must be positive");
    return {GroupSpec::heisenberg(d), a, a_freq, 2.0};
}

Neighborhood Neighborhood::affine(double a, double b, int d) {
    if (!(a > 0 && b > 1)) fail(ErrorCode::InvalidInput, "affine neighborhood needs a > 0 and b > 1");
    return {GroupSpec::affine(d), a, a, b};
}

bool Neighborhood::contains(const GroupPoint& p) const {
    const int d = spec.d;
    if (spec.kind == GroupKind::Heisenberg) {
        for (int i = 0; i < d; ++i)
            if (std::abs(p.coords[i]) > a || std::abs(p.coords[d + i]) > a_freq) return false;
        return true;
    }
    double r2 = 0;
    for (int i = 0; i < d; ++i) r2 += p.coords[i] * p.coords[i];
    const double s = p.coords.back();
    return r2 <= a * a && s >= 1.0 / b && s <= b;
}

namespace {

void check_range(int lo, int hi, const char* what) {
    if (hi < lo) fail(ErrorCode::EmptyFamily, std::string("empty ") + what + " range");
}

}  // namespace

PointFamily make_point_family(const Generator& generator) {
    PointFamily fam;
    fam.generator = generator;
    if (const auto* g = std::get_if<GaborLattice>(&generator)) {
        if (!(g->alpha > 0 && g->beta > 0)) fail(ErrorCode::InvalidInput, "lattice constants must be positive");
        check_range(g->m_lo, g->m_hi, "m");
        check_range(g->n_lo, g->n_hi, "n");
        fam.spec = GroupSpec::heisenberg();
        for (int m = g->m_lo; m <= g->m_hi; ++m)
            for (int n = g->n_lo; n <= g->n_hi; ++n) {
                fam.points.emplace_back(g->alpha * m, g->beta * n);
                fam.labels.push_back({m, n});
            }
    } else {
        const auto& dy = std::get<DyadicSet>(generator);
        if (!(dy.step > 0)) fail(ErrorCode::InvalidInput, "dyadic step must be positive");
        check_range(dy.j_lo, dy.j_hi, "j");
        if (!dy.cover) check_range(dy.k_lo, dy.k_hi, "k");
        fam.spec = GroupSpec::affine();
        for (int j = dy.j_lo; j <= dy.j_hi; ++j) {
            const double s = std::ldexp(1.0, -j);
            int k_lo = dy.k_lo, k_hi = dy.k_hi;
            if (dy.cover) {
                const double unit = s * dy.step;
                k_lo = static_cast<int>(std::ceil(dy.cover->first / unit - 1e-9));
                k_hi = static_cast<int>(std::ceil(dy.cover->second / unit - 1e-9)) - 1;
            }
            for (int k = k_lo; k <= k_hi; ++k) {
                fam.points.emplace_back(s * k * dy.step, s);
                fam.labels.push_back({j, k});
            }
        }
    }
    if (fam.points.empty()) fail(ErrorCode::EmptyFamily, "generator produced no points");
    return fam;
}

Rect translated_cell(const Neighborhood& U, const GroupPoint& p) {
    if (U.spec.kind == GroupKind::Heisenberg)
        return {p.x() - U.a, p.x() + U.a, p.y() - U.a_freq, p.y() + U.a_freq};
    const double s = p.y();
    return {p.x() - s * U.a, p.x() + s * U.a, s / U.b, s * U.b};
}

namespace {

// x_i K and x_j K intersect. Heisenberg cells are boxes; affine cells are
// balls of radius s a around x times the scale interval [s/b, s b].
bool cells_meet(const Neighborhood& U, const GroupPoint& p, const GroupPoint& q) {
    const int d = U.spec.d;
    if (U.spec.kind == GroupKind::Heisenberg) {
        for (int i = 0; i < d; ++i) {
            if (std::abs(p.coords[i] - q.coords[i]) > 2 * U.a) return false;
            if (std::abs(p.coords[d + i] - q.coords[d + i]) > 2 * U.a_freq) return false;
        }
        return true;
    }
    const double sp = p.coords.back(), sq = q.coords.back();
    if (sp * U.b < sq / U.b || sq * U.b < sp / U.b) return false;
    double r2 = 0;
    for (int i = 0; i < d; ++i) r2 += (p.coords[i] - q.coords[i]) * (p.coords[i] - q.coords[i]);
    const double reach = (sp + sq) * U.a;
    return r2 <= reach * reach;
}

}  // namespace

WellSpreadReport check_well_spread(const PointFamily& family, const Neighborhood& U, const DomainBox& box) {
    if (family.points.empty()) fail(ErrorCode::EmptyFamily, "family has no points");
    const auto& spec = family.spec;
    const std::size_t dim = spec.coord_count();
    if (box.lo.size() != dim || box.hi.size() != dim || box.samples_per_axis < 1)
        fail(ErrorCode::InvalidInput, "domain box does not match the group dimension");

    WellSpreadReport rep;
    const std::size_t n = family.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        int count = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (cells_meet(U, family.points[i], family.points[j])) ++count;
        rep.max_overlap = std::max(rep.max_overlap, count);
    }

    const int m = box.samples_per_axis;
    auto coord = [&](std::size_t axis, int idx) {
        const double t = m == 1 ? 0.5 : static_cast<double>(idx) / (m - 1);
        if (spec.kind == GroupKind::Affine && axis == dim - 1)
            return box.lo[axis] * std::pow(box.hi[axis] / box.lo[axis], t);
        return box.lo[axis] + t * (box.hi[axis] - box.lo[axis]);
    };
    std::vector<int> idx(dim, 0);
    GroupPoint z{std::vector<double>(dim)};
    rep.u_dense_on_box = true;
    while (true) {
        for (std::size_t a = 0; a < dim; ++a) z.coords[a] = coord(a, idx[a]);
        bool covered = false;
        for (const auto& p : family.points) {
            if (U.contains(group_mul(spec, group_inv(spec, p), z))) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            rep.u_dense_on_box = false;
            break;
        }
        std::size_t a = 0;
        while (a < dim && ++idx[a] == m) idx[a++] = 0;
        if (a == dim) break;
    }
    return rep;
}

}  // namespace coorbit
