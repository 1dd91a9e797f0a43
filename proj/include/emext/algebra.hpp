#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emext/field.hpp"
#include "emext/linalg.hpp"

namespace emext {

enum class Flavor { commutative, tensor };

struct Generator {
    std::string name;
    int degree = 0;
    bool odd() const { return degree % 2 != 0; }
};

/* Basis element of the free algebra.
 * commutative: exponent vector indexed by generator (odd exponents <= 1);
 * tensor: sequence of generator indices (a word).
 * Encoded as one vector with flavor-dependent meaning; the empty-or-zero key
 * is the unit monomial. */
using Key = std::vector<int>;

/* Lexicographic on the underlying sequences; commutative keys all have the
 * same length, tensor words compare with the shorter prefix first. */
struct KeyLess {
    bool operator()(const Key& a, const Key& b) const { return a < b; }
};

using Poly = std::map<Key, Scalar, KeyLess>;

struct Derivation {
    int shift = 0;               // +1 Sullivan, -1 Adams-Hilton
    std::vector<Poly> images;    // per generator
};

struct DgaPresentation {
    Field field = Field::rationals();
    Flavor flavor = Flavor::commutative;
    std::vector<Generator> gens;
    Derivation diff;

    int diff_shift() const { return flavor == Flavor::commutative ? +1 : -1; }

    Key unit_key() const { return flavor == Flavor::commutative ? Key(gens.size(), 0) : Key{}; }
    int degree_of(const Key& k) const;
    int word_length(const Key& k) const;  // number of algebra factors

    std::string key_str(const Key& k) const;
    std::string poly_str(const Poly& p) const;
};

Poly poly_zero();
Poly poly_unit(const DgaPresentation& pres);
Poly poly_gen(const DgaPresentation& pres, int gen_index);
Poly poly_term(const Key& k, const Scalar& c);

bool poly_is_zero(const Poly& p);
/* Degree of a homogeneous poly; nullopt for 0, throws on inhomogeneous. */
std::optional<int> poly_degree(const DgaPresentation& pres, const Poly& p);

void poly_add_scaled(const DgaPresentation& pres, Poly& a, const Scalar& c, const Poly& b);
Poly poly_add(const DgaPresentation& pres, const Poly& a, const Poly& b);
Poly poly_scale(const DgaPresentation& pres, const Scalar& c, const Poly& a);

/* Product of monomials: sign from sorting odd generators (commutative), plain
 * concatenation (tensor). Returns nullopt when an odd generator squares. */
std::optional<std::pair<Key, int>> mul_key(const DgaPresentation& pres, const Key& a, const Key& b);

Poly multiply(const DgaPresentation& pres, const Poly& p, const Poly& q);

/* Graded Leibniz extension of a derivation given on generators. */
Poly apply_derivation(const DgaPresentation& pres, const Derivation& th, const Poly& p);
Poly apply_diff(const DgaPresentation& pres, const Poly& p);

/* Complete, duplicate-free, canonically ordered basis of degree n. */
std::vector<Key> basis_of_degree(const DgaPresentation& pres, int n);

struct DiffViolation {
    int gen_index;
    Poly residue;  // nonzero d(d(gen))
};

/* Verifies d(d(v)) = 0 for every generator; also that each image is
 * homogeneous of the declared shift. Returns the first violation. */
std::optional<DiffViolation> check_differential(const DgaPresentation& pres);

/* d decomposable (Sullivan) / vanishing linear part (tensor). */
bool is_minimal(const DgaPresentation& pres);

/* Structural checks: unique names, flavor-appropriate generator degrees,
 * homogeneous differential. Throws UsageError. */
void validate_presentation(const DgaPresentation& pres, bool user_facing = true);

/* Coordinates of a homogeneous poly in basis_of_degree. */
Vec poly_to_vec(const DgaPresentation& pres, const Poly& p, const std::vector<Key>& basis);
Poly vec_to_poly(const Vec& v, const std::vector<Key>& basis);

/* The base chain complex (A, d) on a degree range, plus its bases. */
struct BaseComplex {
    ChainComplex cx;
    std::map<int, std::vector<Key>> basis;
};
BaseComplex base_complex(const DgaPresentation& pres, int lo, int hi);

}  // namespace emext
