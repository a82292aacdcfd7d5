#include "qgtlab/numkit/special.hpp"

#include "qgtlab/errors.hpp"

#include <cmath>
#include <string>

namespace qgtlab {

double bessel_j1(double x) {
    if (!std::isfinite(x) || std::abs(x) > 50.0) {
        throw DomainError("bessel_j1 argument out of range: " + std::to_string(x));
    }
    // libstdc++ only accepts x >= 0; J1 is odd.
    const double v = std::cyl_bessel_j(1.0, std::abs(x));
    return x < 0.0 ? -v : v;
}

}  // namespace qgtlab
