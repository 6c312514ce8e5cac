#pragma once

#include <array>

#include "ewgeom/common.hpp"

namespace ewgeom {

// sigma[mu][row][col]: identity followed by the three Pauli matrices.
inline const std::array<std::array<std::array<cplx, 2>, 2>, 4>& sigma_matrices() {
    static const std::array<std::array<std::array<cplx, 2>, 2>, 4> s = {{
        {{{cplx{1, 0}, cplx{0, 0}}, {cplx{0, 0}, cplx{1, 0}}}},
        {{{cplx{0, 0}, cplx{1, 0}}, {cplx{1, 0}, cplx{0, 0}}}},
        {{{cplx{0, 0}, cplx{0, -1}}, {cplx{0, 1}, cplx{0, 0}}}},
        {{{cplx{1, 0}, cplx{0, 0}}, {cplx{0, 0}, cplx{-1, 0}}}},
    }};
    return s;
}

// Pauli frame of the Hermitian fiber: tau_mu = sigma_mu / sqrt(2), whose
// Gram matrix under the epsilon-pair metric is diag(1,-1,-1,-1).
inline cplx tau_up(int mu, int a, int adot) {
    return sigma_matrices()[mu][a][adot] / kSqrt2;
}

// Minkowski components diag(1,-1,-1,-1); identical with both indices up or
// both down.
inline double minkowski_diag(int mu) { return mu == 0 ? 1.0 : -1.0; }

}  // namespace ewgeom
