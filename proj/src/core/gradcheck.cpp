#include "gsaudio/core/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gsaudio/error.hpp"

namespace gsaudio::core {

double finite_difference_check(const ScalarFunction& f, const Tensor& point, double step,
                               std::span<const std::size_t> coordinates) {
  if (!(step > 0.0)) throw ContractViolation("finite_difference_check: step must be positive");
  auto checked = [](double v) {
    if (!std::isfinite(v)) throw NumericError("finite_difference_check: non-finite function value");
    return v;
  };

  Tensor analytic = Tensor::zeros(point.rows(), point.cols());
  checked(f(point, &analytic));
  if (analytic.size() != point.size())
    throw ContractViolation("finite_difference_check: gradient size differs from point");

  std::vector<std::size_t> all;
  if (coordinates.empty()) {
    all.resize(point.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    coordinates = all;
  }

  double worst = 0.0;
  Tensor probe = point;
  for (std::size_t i : coordinates) {
    if (i >= point.size()) throw ContractViolation("finite_difference_check: coordinate out of range");
    const double x0 = point[i];
    probe[i] = x0 + step;
    const double up = checked(f(probe, nullptr));
    probe[i] = x0 - step;
    const double down = checked(f(probe, nullptr));
    probe[i] = x0;
    const double central = (up - down) / (2.0 * step);
    const double a = analytic[i];
    const double denom = std::max({std::fabs(a), std::fabs(central), 1e-12});
    worst = std::max(worst, std::fabs(a - central) / denom);
  }
  return worst;
}

}  // namespace gsaudio::core
