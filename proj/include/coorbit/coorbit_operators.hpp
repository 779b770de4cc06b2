#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coorbit/frames.hpp"
#include "coorbit/molecules.hpp"

namespace coorbit {

struct CoorbitParams {
    GroupSpec group;
    WindowSpec window;
    MixedNormParams mixed;
    // Besov smoothness; when set the affine weight is s^-(sigma + d/2 - d/q).
    std::optional<double> besov_exponent;
    TransformGrids grids;

    static CoorbitParams modulation(double p, double q, const WeightSpec& m = WeightSpec::constant(),
                                    const WindowSpec& g = WindowSpec::gaussian());
    static CoorbitParams besov(double p, double q, double sigma, const WindowSpec& g = WindowSpec::meyer(), int d = 1);
};

double besov_weight_exponent(double sigma, double q, int d = 1);

double coorbit_norm(const SignalGrid& f, const CoorbitParams& params);
// Coorbit norm of a precomputed transform.
double coorbit_norm_of_transform(const GroupGridFn& F, const CoorbitParams& params);
double modulation_norm(const SignalGrid& f, const CoorbitParams& params);

// Littlewood-Paley cutoff: 1 on [-1, 1], 0 outside (-2, 2), smooth in between.
double lp_cutoff(double y);
// phi(2^-j xi) - phi(2^-j+1 xi).
double lp_piece(int j, double xi);

struct LittlewoodPaleyRange {
    int j_lo = 0, j_hi = 0;
};
// Range of j whose pieces sum to one on every nonzero grid frequency.
LittlewoodPaleyRange lp_range(const SignalGrid& grid);
// ||F^-1(phi_j f^)|L^p|| for j in lp_range(grid).
std::vector<double> lp_piece_norms(const SignalGrid& f, double p);
double besov_norm_lp(const SignalGrid& f, double p, double q, double sigma, Warnings* warnings = nullptr);
double besov_norm_cwt(const SignalGrid& f, double p, double q, double sigma, const WindowSpec& g = WindowSpec::meyer(),
                      const ScaleGridSpec& scales = {});

struct WindowEquivalence {
    double ratio_min = 0.0;
    double ratio_max = 0.0;
};
WindowEquivalence window_equivalence(const std::vector<SignalGrid>& suite, const CoorbitParams& params, const WindowSpec& g1,
                                     const WindowSpec& g2);

// Images T(pi(x_i) g) of the frame atoms, located at the frame points.
MoleculeFamily operator_images(const FrameSystem& sys, const std::function<SignalGrid(const SignalGrid&)>& T);
// sum_i <f, pi(x_i) gamma> m_i with the canonical dual.
SignalGrid operator_extend(const FrameSystem& sys, const MoleculeFamily& images, const SignalGrid& f);

struct CertificateEntry {
    CoorbitParams params;
    double max_ratio = 0.0;
    double frame_constant = 0.0;  // max ||(<f, e_i>)|Y_d|| / ||f|CoY|| over the test signals
    double bound = 0.0;           // slack * frame_constant * envelope_norm
    bool bound_holds = false;
};

struct Certificate {
    bool granted = false;
    std::string reason;
    double envelope_norm = 0.0;
    double envelope_tail_ratio = 0.0;
    WeightSpec weight;
    double slack = 1.1;
    std::uint64_t seed = 0;
    int signals = 30;
    std::vector<CertificateEntry> results;
};

// Envelope of the images under the shared weight, on the transform grid of the window.
Envelope certificate_envelope(const FrameSystem& sys, const MoleculeFamily& images, const WeightSpec& weight,
                              const TransformGrids& grids = {});
// Every params entry must use the same weight; one envelope is extracted and shared.
Certificate boundedness_certificate(const FrameSystem& sys, const MoleculeFamily& images, const std::vector<CoorbitParams>& params,
                                    std::uint64_t seed, int signals = 30);
Certificate boundedness_certificate(const FrameSystem& sys, const MoleculeFamily& images, const Envelope& envelope,
                                    const std::vector<CoorbitParams>& params, std::uint64_t seed, int signals = 30);
// Seeded random expansions in the frame atoms.
std::vector<SignalGrid> certificate_signals(const FrameSystem& sys, std::uint64_t seed, int count);

struct WeylMoleculeCheck {
    bool is_molecule_map = false;
    bool declined = false;
    std::string reason;
    Warnings warnings;
    Envelope envelope;
    MoleculeFamily images;
};

WeylMoleculeCheck weyl_tf_molecule_check(const GroupGridFn& symbol, const FrameSystem& sys,
                                         const WeightSpec& weight = WeightSpec::constant());

}  // namespace coorbit
