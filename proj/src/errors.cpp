#include "dcesim/errors.hpp"

#include <sstream>

namespace dcesim {

namespace {

std::string root_message(double lo, double hi, double residual, int iterations) {
  std::ostringstream os;
  os.precision(17);
  os << "root solve did not converge after " << iterations << " iterations: bracket [" << lo
     << ", " << hi << "], relative residual " << residual;
  return os.str();
}

}  // namespace

RootNotConverged::RootNotConverged(double lo, double hi, double res, int iters)
    : NumericalError(root_message(lo, hi, res, iters)),
      k_lo(lo), k_hi(hi), residual(res), iterations(iters) {}

QuadratureNotConverged::QuadratureNotConverged(double est, double ch, int p)
    : NumericalError("quadrature did not converge with " + std::to_string(p) +
                     " panels: estimate " + std::to_string(est) + ", last change " +
                     std::to_string(ch)),
      estimate(est), change(ch), panels(p) {}

RefinementRequired::RefinementRequired(double step, double rel)
    : NumericalError("step-size audit failed: halving dt=" + std::to_string(step) +
                     " changed the photon number by " + std::to_string(100.0 * rel) + "%"),
      dt(step), relative_change(rel) {}

ConfigError::ConfigError(const std::string& message, int l)
    : std::runtime_error(l > 0 ? "line " + std::to_string(l) + ": " + message : message),
      line(l) {}

}  // namespace dcesim
