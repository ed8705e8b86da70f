#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cbrsp/channels.hpp"
#include "cbrsp/noise.hpp"
#include "cbrsp/qmath.hpp"

#include <cmath>
#include <random>

using namespace cbrsp;
using namespace cbrsp::noise;
using qmath::cplx;
using qmath::DensityMatrix;

namespace {

constexpr double kTol = qmath::tol::kAlgebra;

DensityMatrix random_density(std::mt19937_64& rng, std::size_t numQubits) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> amps(std::size_t{1} << numQubits);
    for (auto& a : amps)
        a = cplx{u(rng), u(rng)};
    return DensityMatrix::pure(qmath::StateVector::normalized(numQubits, std::move(amps)));
}

} // namespace

TEST_CASE("amplitude damping operators") {
    const auto zero = kraus_ad(0.0);
    CHECK(zero.operators[0].max_abs_diff(qmath::ops::identity2()) < kTol);
    CHECK(zero.operators[1].max_abs() < kTol);

    const auto full = kraus_ad(1.0);
    CHECK(std::abs(full.operators[1].at(0, 1) - 1.0) < kTol); // |0><1|
    CHECK(std::abs(full.operators[0].at(1, 1)) < kTol);

    CHECK(completeness_check(kraus_ad(0.37)).max_deviation < kTol);
    CHECK_THROWS_AS(kraus_ad(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(kraus_ad(1.1), std::invalid_argument);
}

TEST_CASE("phase damping operators") {
    const auto zero = kraus_pd(0.0);
    CHECK(zero.operators[0].max_abs_diff(qmath::ops::identity2()) < kTol);
    CHECK(zero.operators[1].max_abs() < kTol);
    CHECK(zero.operators[2].max_abs() < kTol);

    const auto full = kraus_pd(1.0);
    CHECK(full.operators[0].max_abs() < kTol);
    CHECK(std::abs(full.operators[1].at(0, 0) - 1.0) < kTol);
    CHECK(std::abs(full.operators[2].at(1, 1) - 1.0) < kTol);

    // Full dephasing sends |+><+| to the maximally mixed state.
    const auto plus = DensityMatrix::pure(
        qmath::StateVector::from_amplitudes(1, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}));
    const auto out = apply_grouped_noise(plus, full, NoiseGrouping::per_qubit(1));
    CHECK(out.matrix().max_abs_diff(qmath::ComplexMatrix::identity(2) * cplx{0.5, 0}) < kTol);

    CHECK(completeness_check(kraus_pd(0.9)).max_deviation < kTol);
}

TEST_CASE("completeness flags a tampered set") {
    for (double eta : {0.2, 0.6}) {
        KrausSet tampered = kraus_ad(eta);
        tampered.operators.pop_back();
        CHECK(completeness_check(tampered).max_deviation == doctest::Approx(eta).epsilon(1e-12));
    }
}

TEST_CASE("grouped noise at eta zero is the identity channel") {
    std::mt19937_64 rng(13);
    const auto rho = random_density(rng, 5);
    for (auto model : {NoiseModel::AmplitudeDamping, NoiseModel::PhaseDamping}) {
        const auto out =
            apply_grouped_noise(rho, make_kraus(model, 0.0), NoiseGrouping::travel_default());
        CHECK(out.matrix().max_abs_diff(rho.matrix()) < kTol);
    }
}

TEST_CASE("correlated amplitude damping at eta one collapses the travel qubits") {
    const auto rho = DensityMatrix::pure(
        channels::make_five_qubit_channel(channels::noise_study_preset()));
    const auto out =
        apply_grouped_noise(rho, kraus_ad(1.0), NoiseGrouping::travel_default());
    CHECK_FALSE(out.normalized());
    CHECK(out.trace_real() == doctest::Approx(0.5).epsilon(1e-12));
    // Support is |00000> and |00001> only, a quarter of the weight each.
    for (std::size_t r = 0; r < 32; ++r)
        for (std::size_t c = 0; c < 32; ++c) {
            const double expected = (r == c && r < 2) ? 0.25 : 0.0;
            CHECK(std::abs(out.matrix().at(r, c) - expected) < kTol);
        }
}

TEST_CASE("per-qubit grouping preserves the trace for all rates") {
    std::mt19937_64 rng(29);
    const auto rho = random_density(rng, 4);
    for (auto model : {NoiseModel::AmplitudeDamping, NoiseModel::PhaseDamping})
        for (int i = 0; i <= 10; ++i) {
            const auto out = apply_grouped_noise(rho, make_kraus(model, i * 0.1),
                                                 NoiseGrouping::per_qubit(4));
            CHECK(std::abs(out.trace_real() - 1.0) < kTol);
        }
}

TEST_CASE("grouped noise preserves hermiticity and positivity") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 4; ++rep) {
        const auto rho = random_density(rng, 3);
        NoiseGrouping grouping{{{"i", {0, 2}}, {"j", {1}}}, {}};
        for (auto model : {NoiseModel::AmplitudeDamping, NoiseModel::PhaseDamping}) {
            const auto out = apply_grouped_noise(rho, make_kraus(model, 0.3 + 0.1 * rep), grouping);
            CHECK(out.matrix().is_hermitian(kTol));
            CHECK(out.min_eigenvalue() >= qmath::tol::kPsdFloor);
            CHECK(out.trace_real() <= 1.0 + kTol);
        }
    }
}

TEST_CASE("default grouping acts as the identity on the untouched qubit") {
    std::mt19937_64 rng(53);
    const auto travel = random_density(rng, 4);
    const auto controller = random_density(rng, 1);
    const auto joint = tensor_product(travel, controller);
    for (double eta : {0.3, 0.8})
        for (auto model : {NoiseModel::AmplitudeDamping, NoiseModel::PhaseDamping}) {
            const auto kraus = make_kraus(model, eta);
            const auto noisyJoint =
                apply_grouped_noise(joint, kraus, NoiseGrouping::travel_default());
            NoiseGrouping travelOnly{{{"i", {0, 3}}, {"j", {1, 2}}}, {}};
            const auto noisyTravel = apply_grouped_noise(travel, kraus, travelOnly);
            CHECK(noisyJoint.matrix().max_abs_diff(
                      tensor_product(noisyTravel.matrix(), controller.matrix())) < kTol);
        }
}

TEST_CASE("grouping validation") {
    std::mt19937_64 rng(3);
    const auto rho = random_density(rng, 3);
    NoiseGrouping overlapping{{{"i", {0, 1}}, {"j", {1, 2}}}, {}};
    CHECK_THROWS_AS(apply_grouped_noise(rho, kraus_ad(0.5), overlapping), std::invalid_argument);
    NoiseGrouping missing{{{"i", {0}}}, {2}};
    CHECK_THROWS_AS(apply_grouped_noise(rho, kraus_ad(0.5), missing), std::invalid_argument);
    NoiseGrouping outOfRange{{{"i", {0, 5}}}, {1, 2}};
    CHECK_THROWS_AS(apply_grouped_noise(rho, kraus_ad(0.5), outOfRange), std::invalid_argument);
}
