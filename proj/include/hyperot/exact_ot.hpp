#ifndef HYPEROT_EXACT_OT_HPP
#define HYPEROT_EXACT_OT_HPP

#include "hyperot/sinkhorn.hpp"

namespace hyperot {

// Globally optimal unregularized coupling for small instances.
// Uniform square instances with n <= 8 go through assignment
// enumeration; anything else with n_s * n_t <= 64 cells goes through a
// bipartite network simplex over the transportation polytope. Larger
// instances throw.
Coupling exact_ot(const Vector& a, const Vector& b, const CostMatrix& cost);

// The two paths, exposed so they can be cross-checked directly.
Coupling exact_ot_assignment(const Vector& a, const CostMatrix& cost);
Coupling exact_ot_simplex(const Vector& a, const Vector& b, const CostMatrix& cost);

}  // namespace hyperot

#endif  // HYPEROT_EXACT_OT_HPP
