#pragma once

#include "emext/extcalc.hpp"

namespace emext {

/* (Lambda V)^{(x) n} presented on n disjoint copies of the generators, with
 * the fold map mu_n sending copy i of v to v. */
struct TensorPowerAlgebra {
    std::shared_ptr<const DgaPresentation> base;
    std::shared_ptr<const DgaPresentation> power;
    int n = 2;
};

TensorPowerAlgebra tensor_power_algebra(std::shared_ptr<const DgaPresentation> base, int n);

/* x -> 1 (x) ... (x) x (x) ... (x) 1 with x in slot `copy` (0-based). */
Poly embed_copy(const TensorPowerAlgebra& tp, const Poly& p, int copy);
/* The n-fold multiplication. */
Poly fold_mu_n(const TensorPowerAlgebra& tp, const Poly& p);

/* Exact chain-level kernel basis of mu_n in one degree (coordinates over
 * basis_of_degree(power, degree)). */
std::vector<Vec> mu_n_kernel(const TensorPowerAlgebra& tp, int degree);

/* element in (ker mu_n)^m in its degree; (ker)^0 is the whole algebra. */
bool ideal_power_membership(const TensorPowerAlgebra& tp, const Poly& element, int m, int degree);

struct BoundedValue {
    int value = 0;
    bool exact = false;     // window certificate applies
    bool capped = false;    // true: "value" is m_max and the answer is "> m_max"
    std::string note;
};

std::string bounded_str(const BoundedValue& v);

/* Nilpotency length of ker H(mu_n): the longest nonzero product of kernel
 * classes. Exact when base cohomology vanishes above B in the window and
 * n*B fits. */
BoundedValue zcl(std::shared_ptr<const DgaPresentation> pres, int n, int window_hi, int m_max);

/* Least m <= m_max with H(rho_m) injective in every window degree, where
 * rho_m quotients by the chain-level (ker mu_n)^{m+1}. */
BoundedValue htc_lower(std::shared_ptr<const DgaPresentation> pres, int n, int m_max, int window_hi);

/* Nilpotency length of ker(mu_{A,n}) inside the finite class table. */
BoundedValue ext_zcl(const ExtTable& table, int n, int m_max);

/* Same protocol as htc_lower on the chain algebra A^{(x)n},
 * A = Hom(P, Lambda V). For Gorenstein inputs the product-length
 * reformulation is cross-checked. */
BoundedValue htc_ext(const ExtTable& table, int n, int m_max);

enum class CriterionVerdict { equal, not_equal, inconclusive };
std::string criterion_str(CriterionVerdict v);

struct CriterionResult {
    CriterionVerdict verdict = CriterionVerdict::inconclusive;
    std::string reason;      // failed hypothesis when inconclusive
    int m = 0;
    bool in_power_m = false;    // omega^{(x)n} in (ker mu_n)^m
    bool in_power_m1 = false;   // ... in (ker mu_n)^{m+1}
};

/* Tests f(1)^{(x)n} in (ker mu_n)^m \ (ker mu_n)^{m+1} for the generating
 * class f; preconditions: Gorenstein and ev != 0. */
CriterionResult thm_criterion(const ExtTable& table, int n, int m, int fd_bound);

}  // namespace emext
