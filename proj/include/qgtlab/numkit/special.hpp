#pragma once

namespace qgtlab {

/// Bessel function of the first kind, order one. Valid for |x| <= 50;
/// outside that range throws DomainError.
double bessel_j1(double x);

}  // namespace qgtlab
