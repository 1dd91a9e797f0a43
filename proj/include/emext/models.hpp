#pragma once

#include "emext/algebra.hpp"

namespace emext {

using PresPtr = std::shared_ptr<const DgaPresentation>;

PresPtr point_model(const Field& field, Flavor flavor);

/* Sullivan: Lambda(x1), |x1| = n odd, or Lambda(x1, x2), dx2 = x1^2, n even.
 * Adams-Hilton: T(a1), |a1| = n - 1, zero differential. */
PresPtr sphere_model(int n, Flavor flavor, const Field& field = Field::rationals());

/* Adams-Hilton model of S^q u_phi e^{q+1}, attaching degree r:
 * generators a (degree q-1), a' (degree q), da = 0, da' = -r a. */
PresPtr two_cell_model(int q, long r, const Field& field);

/* T(H_*(X)) with zero differential: one generator per (degree, rank) entry. */
PresPtr suspension_model(const std::vector<std::pair<int, int>>& betti, const Field& field = Field::rationals());

/* Disjoint-union generators, componentwise differential. */
PresPtr product_model(const PresPtr& p1, const PresPtr& p2);

/* Appends a contractible pair (u, w = du); homotopy-invariance material. */
PresPtr append_contractible_pair(const PresPtr& pres, int degree_u, const std::string& suffix = "");

struct BuiltinInfo {
    std::string name;
    std::string params;
    std::string description;
};
const std::vector<BuiltinInfo>& builtin_models();

/* "point", "sphere:3,sullivan", "two_cell:2,3", "suspension:1x1+2x1",
 * "product:3,3" (sullivan spheres). */
PresPtr builtin_model(const std::string& spec, const Field& field);

}  // namespace emext
