#ifndef SCMA_TYPES_HPP
#define SCMA_TYPES_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>

namespace scma {

using cplx = std::complex<double>;

/// A codebook file or value set broke a structural invariant. The message
/// names the invariant that failed.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exact enumeration would exceed the configured point budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact enumeration over the M^J superimposed codewords is allowed only
/// strictly below this cap. 16-QAM with six users (16^6 = 2^24) is the first
/// standard system that does not fit; callers get a BudgetError directing
/// them to the Monte Carlo path.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

}  // namespace scma

#endif
