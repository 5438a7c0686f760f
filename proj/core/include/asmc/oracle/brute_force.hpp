#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asmc/coalescent.hpp"
#include "asmc/trace.hpp"

namespace asmc {

/// Lambda_n by walking every index-pair sequence l_{0:n} with l_p^1 != l_p^2
/// and multiplying the 0/1 factors lambda_p^b(A_p^{l_{p+1}}, l_p). A branch
/// stops at its first zero factor. Exponential; for small traces only.
/// Counts are exact 64-bit integers, row-major N x N.
std::vector<std::uint64_t> lambda_brute_force(const Genealogy& genealogy,
                                              const CoalescenceIndicator& b);

/// Direct bar-Gamma^b(F) from the brute-force counts, with F given
/// as a row-major pair matrix over the terminal cloud.
double gamma_bar_brute_force(const Genealogy& genealogy, const CoalescenceIndicator& b,
                             std::span<const double> pair_values);

}  // namespace asmc
