// mastereq.hpp: coefficients of the time-local master equation
//
//   drho/dt = -i[H(t), rho] + i Xi [q^2, rho] + i Upsilon [q, {p, rho}]
//             + Gamma [q,[q,rho]] + Theta [q,[p,rho]] + gamma [p,[p,rho]]
//
// with H(t) = H_S + H_p2 p^2 + H_qp {q,p}, the Kossakowski matrix and the witness.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qbm/greens.hpp"
#include "qbm/moments.hpp"

namespace qbm {

// exact: the unique generator reproducing the propagated moments.
// printed: the published closed forms, kept as a diagnostic.
enum class CoefficientForm { exact, printed };

struct MasterEqCoefficients {
    TimeGrid grid;
    CoefficientForm form{CoefficientForm::exact};
    double mass{1.0};
    double omega_s{1.0};
    double mu{0.0};

    std::vector<double> Xi, Upsilon, Gamma, Theta, gamma_small;
    std::vector<double> H_p2, H_qp;  // corrections on top of H_S
    std::vector<std::uint8_t> masked;
    double masked_fraction{0.0};

    // Drift matrix of (q, p) means implied by the coefficients at grid index n.
    std::array<double, 4> drift(std::size_t n) const;
    // Diffusion matrix entries (qq, pp, qp) of the covariance equation.
    std::array<double, 3> diffusion(std::size_t n) const;
};

MasterEqCoefficients compute_coefficients(const GreensFunctions& g, const NoiseIntegrals& noise,
                                          CoefficientForm form = CoefficientForm::exact);

struct KossakowskiMatrix {
    double a11{0.0};
    double a22{0.0};
    std::complex<double> a12{};

    std::complex<double> a21() const { return std::conj(a12); }
    double trace() const { return a11 + a22; }
    double determinant() const { return a11 * a22 - std::norm(a12); }
    // Closed 2x2 formula, ascending.
    std::array<double, 2> eigenvalues() const;
};

// Throws SingularityError at masked grid times.
KossakowskiMatrix kossakowski(const MasterEqCoefficients& c, std::size_t n);

struct WitnessSeries {
    TimeGrid grid;
    std::vector<double> det;           // 4 Gamma gamma - Theta^2 - Upsilon^2
    std::vector<double> det_identity;  // -[(Theta + mu Gamma)^2 + Upsilon^2]
    std::vector<double> discrepancy;   // det - det_identity
    std::vector<std::uint8_t> masked;
    double min_det{0.0};
    double max_det{0.0};
    double max_abs_det{0.0};
    bool non_markovian{false};
};

// Non-Markovian iff det < -tolerance at some unmasked time.
WitnessSeries nonmarkov_witness(const MasterEqCoefficients& c, double tolerance = 1e-8);

struct LindbladLimit {
    double rate{0.0};      // 2C
    double L_q{1.0};       // L = L_q q + L_p p
    double L_p{0.0};
    double Gamma{0.0};     // -C
    double Theta{0.0};     // 2 mu C
    double gamma_small{0.0};  // -mu^2 C
    // Hamiltonian shift: coefficients of q^2, p^2 and {q,p}
    double H_q2{0.0};
    double H_p2{0.0};
    double H_qp{0.0};

    KossakowskiMatrix kossakowski() const;
};

// Delta-correlated bath D(t - s) = C delta(t - s). mu in units of 1/(m w_S).
LindbladLimit markov_limit(double C, double mu);

// C = 2 m gamma / beta, the high-temperature Ohmic weight of the delta kernel.
double markov_weight(const SpectralDensityParams& p);

struct QuadraticForm {
    double q2{0.0};
    double p2{0.0};
    double qp{0.0};  // coefficient of {q,p}
};

// H~ = H(t) - Xi q^2 - (Upsilon/2) {q,p}. Throws SingularityError at masked times.
QuadraticForm reference_hamiltonian(const MasterEqCoefficients& c, std::size_t n);

// Integrates the moment equations implied by the coefficients from state0 with RK4 on
// the grid; half-step coefficients come from four-point interpolation. Throws
// SingularityError if a masked time is hit.
Trajectory integrate_generator(const MasterEqCoefficients& c, const GaussianState& state0);

// t,Xi,Upsilon,Gamma,Theta,gamma,H_p2,H_qp,mask
void write_coefficients_csv(std::ostream& out, const MasterEqCoefficients& c);

}  // namespace qbm
