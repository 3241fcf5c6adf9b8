#pragma once

namespace riskcal::dist {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
// (modified Lentz), relative accuracy ~1e-14.
double incomplete_beta(double a, double b, double x);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double upper_incomplete_gamma(double a, double x);

// P(|T| >= |t|) for Student t with df degrees of freedom.
double student_t_two_sided(double t, double df);

// P(F >= f) for an F(d1, d2) variate.
double f_upper_tail(double f, double d1, double d2);

// P(X >= x) for chi-square with df degrees of freedom.
double chi_square_upper_tail(double x, double df);

}  // namespace riskcal::dist
