#pragma once

#include "llns/field.hpp"
#include "llns/rng.hpp"

namespace llns {

// Covariance of the fluctuating-stress entries,
//   delta_ik delta_jl + delta_il delta_jk - (2/3) delta_ij delta_kl,
// with the 2/3 kept verbatim for every d. Indices are 1-based, range 1..d.
double covariance_oracle(int i, int j, int k, int l, int d = 3);

// Increments of the truncated cylindrical Brownian motion over one step:
// for every k with |k|_inf < 2^m, a complex symmetric traceless d x d matrix,
// with conjugate mirror entries (xi^{-k} = conj xi^k) so the physical-space
// noise is real. Entries are laid out flat: entry(kidx * d*d + i*d + j).
struct NoiseIncrement {
    int dim = 0;
    int m = 0;
    double dt = 0.0;
    std::vector<cplx> entries;

    int half_width() const { return (1 << m) - 1; }
    int side() const { return 2 * half_width() + 1; }
    std::size_t mode_count() const;
    std::size_t mode_index(const std::array<int, 3>& k) const;
    const cplx* matrix(const std::array<int, 3>& k) const {
        return entries.data() + mode_index(k) * static_cast<std::size_t>(dim) * dim;
    }
};

// Draw one increment: unconstrained Gaussian per canonical k (first nonzero
// component positive), symmetrized, exactly de-traced, mirrored to -k by
// conjugation. Entry variances are chosen so the covariance matches the
// oracle on the symmetric sector; the projected divergence used by the
// dynamics never sees the trace sector.
void sample_increment(int dim, int m, double dt, const RngStream& rng, NoiseIncrement& out);
NoiseIncrement sample_increment(int dim, int m, double dt, const RngStream& rng);

// amplitude * P div pi_Lambda(dxi):
// component i at k is amplitude * sum_{l,j} P_il(k) (i k_j) dxi^k_{lj}.
SpectralField stochastic_forcing(const NoiseIncrement& inc, double amplitude, TorusGrid grid);

// Ito-isometry oracle: E |forcing(k)|^2 / (amplitude^2 dt), evaluated by
// direct enumeration over index quadruples of the covariance contracted with
// the Leray multiplier and the divergence factors. Analytically (d-1)|k|^2.
double forcing_mode_second_moment(const std::array<int, 3>& k, int d);

} // namespace llns
