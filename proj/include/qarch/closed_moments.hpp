#pragma once

#include <cstddef>

#include "qarch/model.hpp"

namespace qarch::closed_moments {

// Asymmetric ARCH(1): r_t = zeta_t (c^2 + (a + b r_{t-1})^2)^{1/2}.
// Moment formulas require mu_3 = 0; fourth moments require mu_4 b^4 < 1.
struct Arch1Params {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;  // >= 0
  double mu3 = 0.0;
  double mu4 = 3.0;
};

struct Arch1Moments {
  double m2 = 0.0;    // E r^2
  double m3 = 0.0;    // E r_t^2 r_0
  double m4 = 0.0;    // E r_t^2 r_0^2
  double rho4 = 0.0;  // Cov(r_t^2, r_0^2)
};

Arch1Moments arch1_moments(const Arch1Params& p, std::size_t t);

// Leverage function of the asymmetric ARCH(1): h_j = 2 m_2 a b^{2j-1}.
double arch1_leverage(const Arch1Params& p, std::size_t j);

// Random-coefficient AR(1): r~_t = kappa eps_t + b eta_t r~_{t-1} with
// standardized pair (eps, eta), cross moments nu_{i,j} = E[eps^i eta^j].
struct RcAr1Params {
  double kappa = 0.0;
  double b = 0.0;
  double rho = 0.0;  // nu_{1,1}
  double nu30 = 0.0, nu21 = 0.0, nu12 = 0.0, nu03 = 0.0;
  double nu40 = 3.0, nu31 = 0.0, nu22 = 1.0, nu13 = 0.0, nu04 = 3.0;

  // Jointly Gaussian pair with correlation rho (Isserlis moments).
  static RcAr1Params gaussian_pair(double kappa, double b, double rho);
  // eps = rho * eta + sqrt(1-rho^2) * xi with eta, xi independent draws from
  // the given families; nu table computed exactly from the family moments.
  static RcAr1Params from_mixing(double kappa, double b, double rho,
                                 const model::InnovationSpec& eta,
                                 const model::InnovationSpec& xi);
};

struct RcAr1Moments {
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  double rho4 = 0.0;
};

RcAr1Moments rcar1_moments(const RcAr1Params& p, std::size_t t);

struct MatchedParams {
  double kappa = 0.0;
  double rho = 0.0;
};

// Volatility-form matching: kappa rho = a, kappa^2 = a^2 + c^2.
MatchedParams match_params(double a, double b, double c);

}  // namespace qarch::closed_moments
