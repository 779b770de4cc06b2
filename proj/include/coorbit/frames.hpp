#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "coorbit/group_geometry.hpp"
#include "coorbit/signal.hpp"
#include "coorbit/spaces.hpp"

namespace coorbit {

class AtomEngine;

// Atoms pi(x_i) g on a fixed signal grid, together with whatever dual atoms
// have been computed.
struct FrameSystem {
    GroupSpec spec;
    WindowSpec window;
    PointFamily family;
    SignalGrid grid;
    std::optional<SignalGrid> dual_window;
    // Per-point duals for families whose frame operator does not commute with
    // the time-frequency shifts of the family.
    std::vector<SignalGrid> point_duals;

    std::shared_ptr<const AtomEngine> engine;
    std::shared_ptr<const AtomEngine> dual_engine;

    bool has_duals() const { return static_cast<bool>(dual_engine); }
};

FrameSystem make_frame_system(const WindowSpec& window, const PointFamily& family, const SignalGrid& grid);

// Gabor lattice whose points tile one period in x and the full sampled frequency
// band [-1/(2h), 1/(2h)); alpha must be a multiple of h and beta of 1/L.
GaborLattice grid_compatible_lattice(const SignalGrid& grid, double alpha, double beta);
// Dyadic family with scales 2^-j for j in [j_lo, j_hi], translates covering one period.
DyadicSet covering_dyadic_set(const SignalGrid& grid, int j_lo, int j_hi, double step);

SequenceData analysis(const FrameSystem& sys, const SignalGrid& f);
SignalGrid synthesis(const FrameSystem& sys, const SequenceData& c);
SignalGrid synthesis(const FrameSystem& sys, const std::vector<Complex>& c);
SignalGrid frame_operator_apply(const FrameSystem& sys, const SignalGrid& f);

// Orthogonal projection onto the frequency region the family covers completely
// (identity for Gabor families).
SignalGrid covered_projection(const FrameSystem& sys, const SignalGrid& f);

struct FrameBounds {
    double A_est = 0.0;
    double B_est = 0.0;
    bool is_frame = false;
    double cg_residual = 0.0;
    int cg_iterations = 0;
};

struct CgOptions {
    double tol = 1e-12;
    int max_iter = 500;
};

struct CgResult {
    SignalGrid x;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Conjugate gradients for S x = b, restricted to the covered region when requested.
CgResult frame_solve(const FrameSystem& sys, const SignalGrid& b, const CgOptions& opt = {}, bool restrict = false);

// Extreme eigenvalues of the frame operator on the covered region (Lanczos with
// full reorthogonalization), plus an invertibility verdict from a CG solve.
FrameBounds frame_bounds(const FrameSystem& sys, int n_iter = 80);

// Canonical dual window S^-1 g for Gabor systems; for affine families the
// per-point duals are stored and S^-1 applied to the atom at the identity is
// returned. Fills the dual fields of sys.
SignalGrid dual_window(FrameSystem& sys, const CgOptions& opt = {});

// Installs previously computed duals: the dual window for Gabor systems, one dual
// atom per point otherwise.
void attach_duals(FrameSystem& sys, const std::optional<SignalGrid>& dual_window, const std::vector<SignalGrid>& point_duals);
// Coefficients <f, e_i> against the dual atoms, and synthesis with the dual atoms.
SequenceData dual_analysis(const FrameSystem& sys, const SignalGrid& f);
SignalGrid dual_synthesis(const FrameSystem& sys, const std::vector<Complex>& c);
// sum_i <f, e_i> pi(x_i) g
SignalGrid reconstruct(const FrameSystem& sys, const SignalGrid& f);

}  // namespace coorbit
