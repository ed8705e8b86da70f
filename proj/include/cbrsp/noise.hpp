#pragma once

#include "cbrsp/qmath.hpp"

#include <string>
#include <vector>

// Damping noise on the travel qubits. The grouped application shares one
// Kraus index across all qubits of a group (correlated noise); sharing is a
// first-class parameter so one group per qubit recovers the uncorrelated
// (trace-preserving) channel.

namespace cbrsp::noise {

using qmath::ComplexMatrix;
using qmath::DensityMatrix;

enum class NoiseModel { AmplitudeDamping, PhaseDamping };

std::string to_string(NoiseModel model);
NoiseModel noise_model_from_string(const std::string& token);

struct KrausSet {
    NoiseModel model;
    double eta = 0.0; // decoherence rate in [0, 1]
    std::vector<ComplexMatrix> operators;
};

/// E0 = [[1,0],[0,sqrt(1-eta)]], E1 = [[0,sqrt(eta)],[0,0]].
KrausSet kraus_ad(double eta);

/// E0 = sqrt(1-eta) I, E1 = sqrt(eta) diag(1,0), E2 = sqrt(eta) diag(0,1).
KrausSet kraus_pd(double eta);

KrausSet make_kraus(NoiseModel model, double eta);

struct NoiseGroup {
    std::string label; // shared Kraus index name, e.g. "i"
    std::vector<std::size_t> qubits;
};

struct NoiseGrouping {
    std::vector<NoiseGroup> groups;
    std::vector<std::size_t> untouched;

    /// {i: {S1, R2}, j: {R1, S2}}, untouched {C1}, for the 5-qubit layout.
    static NoiseGrouping travel_default();
    /// One group per qubit: the uncorrelated, trace-preserving variant.
    static NoiseGrouping per_qubit(std::size_t numQubits);

    /// Throws unless groups + untouched partition {0, ..., numQubits-1}.
    void validate(std::size_t numQubits) const;
};

/// rho_out = sum over one Kraus index per group of K rho K^dagger, where K
/// applies the group's shared operator to every qubit of the group and the
/// identity to untouched qubits. The correlated form is not trace-preserving;
/// the result is flagged unnormalized whenever its trace drops below 1.
DensityMatrix apply_grouped_noise(const DensityMatrix& rho, const KrausSet& kraus,
                                  const NoiseGrouping& grouping);

struct CompletenessReport {
    double max_deviation = 0.0; // || sum E_i^dag E_i - I ||_max
};

CompletenessReport completeness_check(const KrausSet& kraus);

} // namespace cbrsp::noise
