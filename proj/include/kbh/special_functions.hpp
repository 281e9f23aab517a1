#pragma once

#include "kbh/types.hpp"

namespace kbh {

// Regularized incomplete beta I_x(a, b), evaluated with a modified Lentz
// continued fraction on whichever side of the mean converges fastest.
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| > |t|) for T ~ t_dof, or for T ~ N(0, 1) when dof is infinite.
// Throws ParameterError for dof < 1.
double two_sided_p(double t, Dof dof);

// Upper tail of the standard normal, P(Z > z).
double normal_sf(double z);

}  // namespace kbh
