#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coorbit/group_geometry.hpp"
#include "coorbit/signal.hpp"
#include "coorbit/spaces.hpp"
#include "coorbit/transforms.hpp"

namespace coorbit {

struct MoleculeFamily {
    std::vector<SignalGrid> members;
    PointFamily locations;
    GroupSpec group;

    std::size_t size() const { return members.size(); }
};

MoleculeFamily make_molecule_family(std::vector<SignalGrid> members, PointFamily locations);
// pi(x_i) g for every point of the family.
MoleculeFamily atom_family(const WindowSpec& g, const PointFamily& points, const SignalGrid& grid);

// Group grid on which molecule transforms are sampled.
struct TransformGrids {
    PhaseGridSpec phase;
    ScaleGridSpec scales;
};

GroupGridFn group_transform(const SignalGrid& f, const WindowSpec& g, const GroupSpec& spec, const TransformGrids& grids = {});

struct Envelope {
    GroupGridFn H;
    Neighborhood U;
    WeightSpec weight;
    double amalgam = 0.0;
    double truncation_estimate = 0.0;
    double tail_ratio = 0.0;
    bool finite = true;
};

Neighborhood default_neighborhood(const GroupSpec& spec);
// Wraps H with its right amalgam norm under the weight.
Envelope make_envelope(GroupGridFn H, const Neighborhood& U, const WeightSpec& weight);

struct EnvelopeOptions {
    TransformGrids grids;
    // Gather with bilinear interpolation instead of nearest-sample scatter. Smoother,
    // but the result is no longer guaranteed to dominate every sample.
    bool bilinear = false;
};

// H(z) = max_i |V_g m_i(x_i z)| on the transform grid.
Envelope envelope_extract(const MoleculeFamily& fam, const WindowSpec& g, const Neighborhood& U, const WeightSpec& weight,
                          const EnvelopeOptions& opt = {});

struct MoleculeVerdict {
    bool ok = true;
    double worst_ratio = 0.0;
    GroupPoint worst_point;
    std::size_t worst_member = 0;
};

// |V_g m_i(z)| <= slack * H(x_i^-1 z) at every grid sample whose pull-back lies on the grid.
MoleculeVerdict verify_molecule(const MoleculeFamily& fam, const WindowSpec& g, const Envelope& H, double slack,
                                const TransformGrids& grids = {});

// Classical (M, N)-molecules on dyadic cubes Q_jk = 2^-j (k + [0, 1]).
struct ClassicalMoleculeParams {
    int M = 4;
    int N = 2;
    int j = 0;
    int k = 0;
};

// Exact value of the constructed molecule (or its derivative) at t.
double classical_molecule_value(const ClassicalMoleculeParams& params, double t, int derivative = 0);
SignalGrid classical_molecule_make(const ClassicalMoleculeParams& params, const SignalGrid& grid);

struct ClassicalCheck {
    bool decay_ok = true;
    bool moments_ok = true;
    double worst_decay_ratio = 0.0;
    double worst_moment_ratio = 0.0;
    std::string details;
};

ClassicalCheck classical_molecule_check(const SignalGrid& m, const ClassicalMoleculeParams& params);

struct DecayExponents {
    int alpha = 0;
    int beta = 0;
    int gamma = 0;
    bool operator==(const DecayExponents&) const = default;
};

struct DecayCheck {
    double C_fit = 0.0;
    bool ok = true;
    GroupPoint argmax;
};

// Ratio |F(x, s)| / (s^a (1 + s)^-b (1 + |x|)^-c) over an affine grid function centred at the identity.
DecayCheck decay_ratio_check(const GroupGridFn& F, const DecayExponents& e);
DecayCheck wavelet_decay_check(const SignalGrid& m, const WindowSpec& g, const DecayExponents& e,
                               const ScaleGridSpec& scales = {});

// s^a (1 + s)^-b (1 + |x|)^-c sampled on the axes of like.
GroupGridFn power_envelope(const DecayExponents& e, const GroupGridFn& like);

// Convergence condition for the right amalgam norm of the power envelope under s^-sigma.
bool power_envelope_admissible(const DecayExponents& e, double sigma, int d = 1);

// Direct evaluation of the right amalgam integral of the power envelope on nested
// domains [-R, R] x [1/R, R]; finite when the shell increments shrink.
struct AmalgamProbe {
    std::vector<double> shell_mass;
    double total = 0.0;
    double growth = 0.0;  // ratio of the last two shell increments
    bool finite = true;
};
AmalgamProbe power_envelope_probe(const DecayExponents& e, double sigma, const Neighborhood& U);

struct CoorbitEnvelope {
    Envelope envelope;
    DecayExponents exponents;
    double constant = 0.0;
    bool probe_finite = true;
    MoleculeVerdict verdict;
};

// Fits the power envelope to a family of classical molecules and validates it. With
// fixed exponents only the constant is fitted. The cached amalgam norm and its
// finiteness come from the whole-group probe rather than the truncated grid.
CoorbitEnvelope classical_to_coorbit(const MoleculeFamily& fam, const WindowSpec& g, double sigma,
                                     const Neighborhood& U = Neighborhood::affine(0.5, 2.0),
                                     std::optional<DecayExponents> fixed = std::nullopt);

MoleculeFamily classical_family(int M, int N, const DyadicSet& cubes, const SignalGrid& grid);

struct BoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

BoundReport molecule_synthesis_bound(const MoleculeFamily& fam, const WindowSpec& g, const Envelope& H,
                                     const SequenceData& c, const MixedNormParams& params,
                                     const TransformGrids& grids = {});
BoundReport molecule_analysis_bound(const MoleculeFamily& fam, const WindowSpec& g, const Envelope& H,
                                    const SignalGrid& f, const MixedNormParams& params, const TransformGrids& grids = {});

}  // namespace coorbit
