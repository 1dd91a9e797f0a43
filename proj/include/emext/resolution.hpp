#pragma once

#include <memory>

#include "emext/algebra.hpp"

namespace emext {

/* Element of a semi-free module: item index -> coefficient in the base
 * algebra. */
using ModElt = std::map<int, Poly>;

struct ClosureItem {
    Key skey;    // commutative: exponents over the s-generators; tensor: {} = 1, {i} = s(v_i)
    int degree;  // natural internal degree
    int weight;  // truncation weight, >= degree (== degree unless corrections reach higher)
};

/* Semi-free resolution of the ground field over the base presentation.
 * Tensor flavor: semibasis {1} u {sv}, differential from the contracting
 * homotopy identity; exact, no truncation. Commutative flavor: semibasis =
 * monomials of Lambda(sV) of weight <= weight_bound, differential built
 * inductively with delta(sv) = v - c_v. */
struct AcyclicClosure {
    std::shared_ptr<const DgaPresentation> base;
    std::vector<ClosureItem> items;                // sorted by (degree, skey)
    std::map<Key, int, KeyLess> item_index;
    std::vector<ModElt> delta;                     // per item
    int weight_bound = -1;                         // -1: exact (tensor flavor)

    /* Commutative flavor only: presentation of Lambda(V u sV^(1) u ... u
     * sV^(copies)); the first n_base generators are the base ones. */
    std::shared_ptr<const DgaPresentation> ext;
    int n_base = 0;
    int copies = 1;
    std::vector<int> sweights;  // per s-generator of one copy

    bool is_tensor() const { return base->flavor == Flavor::tensor; }
    int unit_item() const;
    int find_item(const Key& skey) const;  // -1 when not stored
};

AcyclicClosure ah_acyclic_closure(std::shared_ptr<const DgaPresentation> pres);

AcyclicClosure sullivan_acyclic_closure(std::shared_ptr<const DgaPresentation> pres, int weight_bound);

/* n-fold tensor power P (x)_A ... (x)_A P as a semi-free module over the same
 * base; item weight = sum of the factor weights. n = 2 is the resolution used
 * for the Ext product. */
AcyclicClosure tensor_power_resolution(const AcyclicClosure& P, int n);

/* Module differential on item coordinates:
 * delta(a (x) m) = da (x) m + (-1)^|a| a delta(m). */
ModElt closure_delta(const AcyclicClosure& C, const ModElt& x);
void mod_add_scaled(const DgaPresentation& pres, ModElt& a, const Scalar& c, const ModElt& b);
bool mod_is_zero(const ModElt& x);

/* Total complex of the closure on internal degrees [0, hi]; basis at degree n
 * = pairs (item, base monomial). */
struct ClosureComplex {
    ChainComplex cx;
    std::map<int, std::vector<std::pair<int, Key>>> basis;  // degree -> (item, base key)
    std::map<int, std::map<std::pair<int, Key>, int>> index;
};
ClosureComplex closure_total_complex(const AcyclicClosure& C, int hi);

struct AcyclicityReport {
    bool ok = true;
    int counterexample_degree = 0;
    int counterexample_dim = 0;
};

/* Homology of the total complex must be K in degree 0 and vanish elsewhere
 * on [lo, hi]. */
AcyclicityReport verify_acyclic(const AcyclicClosure& C, int lo, int hi);

/* Comparison lift alpha : P -> Q over the identity of K. Values on the
 * semibasis of P, each an element of Q; commutes with the differentials. */
struct ComparisonLift {
    std::vector<ModElt> values;  // per P item
};

ComparisonLift lift_comparison(const AcyclicClosure& P, const AcyclicClosure& Q);

/* Apply a module morphism given on the semibasis to a general element. */
ModElt lift_apply(const AcyclicClosure& P, const AcyclicClosure& Q, const ComparisonLift& L, const ModElt& x);

/* Tensor-flavor contracting homotopy s with delta s + s d = id on TV+;
 * returns the defect (zero when the identity holds) on the given word. */
ModElt ah_contraction_defect(const AcyclicClosure& C, const Key& word);

}  // namespace emext
