#include "cbrsp/noise.hpp"

#include "cbrsp/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace cbrsp::noise {

using qmath::cplx;

std::string to_string(NoiseModel model) {
    return model == NoiseModel::AmplitudeDamping ? "ad" : "pd";
}

NoiseModel noise_model_from_string(const std::string& token) {
    if (token == "ad")
        return NoiseModel::AmplitudeDamping;
    if (token == "pd")
        return NoiseModel::PhaseDamping;
    throw std::invalid_argument("bad noise model token '" + token + "' (want ad|pd)");
}

namespace {

void check_eta(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("decoherence rate must lie in [0, 1]");
}

} // namespace

KrausSet kraus_ad(double eta) {
    check_eta(eta);
    ComplexMatrix e0(2, 2), e1(2, 2);
    e0.at(0, 0) = 1.0;
    e0.at(1, 1) = std::sqrt(1.0 - eta);
    e1.at(0, 1) = std::sqrt(eta);
    return KrausSet{NoiseModel::AmplitudeDamping, eta, {std::move(e0), std::move(e1)}};
}

KrausSet kraus_pd(double eta) {
    check_eta(eta);
    ComplexMatrix e0(2, 2), e1(2, 2), e2(2, 2);
    e0.at(0, 0) = e0.at(1, 1) = std::sqrt(1.0 - eta);
    e1.at(0, 0) = std::sqrt(eta);
    e2.at(1, 1) = std::sqrt(eta);
    return KrausSet{NoiseModel::PhaseDamping, eta, {std::move(e0), std::move(e1), std::move(e2)}};
}

KrausSet make_kraus(NoiseModel model, double eta) {
    return model == NoiseModel::AmplitudeDamping ? kraus_ad(eta) : kraus_pd(eta);
}

NoiseGrouping NoiseGrouping::travel_default() {
    return NoiseGrouping{{{"i", {0, 3}}, {"j", {1, 2}}}, {4}};
}

NoiseGrouping NoiseGrouping::per_qubit(std::size_t numQubits) {
    NoiseGrouping g;
    for (std::size_t q = 0; q < numQubits; ++q)
        g.groups.push_back(NoiseGroup{"q" + std::to_string(q), {q}});
    return g;
}

void NoiseGrouping::validate(std::size_t numQubits) const {
    std::vector<int> seen(numQubits, 0);
    for (const auto& g : groups)
        for (std::size_t q : g.qubits) {
            if (q >= numQubits)
                throw std::invalid_argument("noise group qubit out of range");
            ++seen[q];
        }
    for (std::size_t q : untouched) {
        if (q >= numQubits)
            throw std::invalid_argument("untouched qubit out of range");
        ++seen[q];
    }
    for (std::size_t q = 0; q < numQubits; ++q)
        if (seen[q] != 1)
            throw std::invalid_argument("noise grouping must partition the qubits");
}

DensityMatrix apply_grouped_noise(const DensityMatrix& rho, const KrausSet& kraus,
                                  const NoiseGrouping& grouping) {
    grouping.validate(rho.num_qubits());
    const std::size_t numOps = kraus.operators.size();
    const std::size_t numGroups = grouping.groups.size();

    std::size_t comboCount = 1;
    for (std::size_t g = 0; g < numGroups; ++g)
        comboCount *= numOps;

    const std::size_t elems = rho.dim() * rho.dim();
    ComplexMatrix acc(rho.dim(), rho.dim());
    ComplexMatrix term(rho.dim(), rho.dim());
    std::vector<std::size_t> pick(numGroups, 0);
    // Terms accumulate in a fixed combination order for reproducibility.
    for (std::size_t combo = 0; combo < comboCount; ++combo) {
        std::size_t rest = combo;
        for (std::size_t g = 0; g < numGroups; ++g) {
            pick[g] = rest % numOps;
            rest /= numOps;
        }
        kernels::copy_buffer(term.data(), rho.matrix().data(), elems);
        for (std::size_t g = 0; g < numGroups; ++g) {
            const ComplexMatrix& op = kraus.operators[pick[g]];
            const cplx e[4] = {op.data()[0], op.data()[1], op.data()[2], op.data()[3]};
            for (std::size_t q : grouping.groups[g].qubits)
                kernels::single_qubit_sandwich(term.data(), rho.num_qubits(), q, e);
        }
        kernels::add_inplace(acc.data(), term.data(), elems);
    }
    return DensityMatrix::from_matrix(rho.num_qubits(), std::move(acc));
}

CompletenessReport completeness_check(const KrausSet& kraus) {
    ComplexMatrix sum(2, 2);
    for (const auto& e : kraus.operators)
        sum += e.adjoint() * e;
    return CompletenessReport{sum.max_abs_diff(ComplexMatrix::identity(2))};
}

} // namespace cbrsp::noise
