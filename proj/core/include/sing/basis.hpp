#pragma once

#include <map>
#include <vector>

#include "sing/matrix.hpp"

namespace sing {

// Degrees of a tensor-product basis element, one entry per active variable of
// the owning BasisSet (same ordering as BasisSet::active_variables).
struct MultiIndex {
    std::vector<int> degrees;

    int total_degree() const {
        int s = 0;
        for (int d : degrees) s += d;
        return s;
    }
    bool operator==(const MultiIndex& o) const { return degrees == o.degrees; }
};

// A truncated tensor-product expansion space over a subset of input variables.
// Variable ids are 1-based and ascending. An empty active set is allowed and
// yields the single constant element (used by the first map component).
struct BasisSet {
    std::vector<int> active_variables;
    std::vector<MultiIndex> indices;
    int max_total_degree = 0;

    std::size_t size() const { return indices.size(); }
};

// All multi-indices with total degree <= max_degree over the active variables,
// graded by total degree, then sorted within a grade so earlier variables carry
// higher degree first. max_degree 0 gives the constant-only set; degree >= 1
// always contains the constant and every univariate linear element, so affine
// maps are representable exactly.
BasisSet total_degree_set(const std::vector<int>& active_variables, int max_degree);

// Univariate basis element: the probabilist Hermite polynomial H_m
// (H_{m+1} = x H_m - m H_{m-1}), so e_0 = 1 and e_1 = x and affine maps live
// in the space exactly. order selects the derivative, 0..2.
double hermite_element(int degree, double x, int order);

// Fills value/d1/d2[0..max_degree] for all degrees at once.
void hermite_element_table(double x, int max_degree, double* value, double* d1, double* d2);

// One value per multi-index; tensor product of univariate evaluations, with
// the requested derivative order applied per variable (global 1-based ids;
// missing entries mean order 0). Orders above 2 throw UnsupportedDerivativeOrder.
Vector eval_basis(const BasisSet& b, const Vector& point,
                  const std::map<int, int>& derivative_orders = {});

// Same evaluation on a point that holds only the active variables, in the
// order of BasisSet::active_variables.
Vector eval_basis_local(const BasisSet& b, const Vector& point_active,
                        const std::vector<int>& orders_active = {});

}  // namespace sing
