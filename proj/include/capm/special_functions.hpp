#pragma once

namespace capm::special {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and 0 <= x <= 1.
///
/// Evaluated with the continued fraction for I_x(a, b) (modified Lentz), using
/// the reflection I_x(a, b) = 1 - I_{1-x}(b, a) on whichever side converges
/// faster. Throws capm::DomainError outside the domain.
[[nodiscard]] double incomplete_beta(double a, double b, double x);

/// Upper tail P(T >= t) of Student's t with `df` degrees of freedom.
/// Throws capm::DomainError for df < 1.
[[nodiscard]] double student_t_sf(double t, double df);

/// Two-sided tail P(|T| >= |t|).
[[nodiscard]] double student_t_two_sided(double t, double df);

/// The t with P(T <= t) = p, for 0 < p < 1.
[[nodiscard]] double student_t_quantile(double p, double df);

}  // namespace capm::special
