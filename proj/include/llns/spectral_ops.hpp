#pragma once

#include "llns/field.hpp"

#include <functional>

namespace llns {

// Collocation samples -> Fourier coefficients (mean convention) and back.
SpectralField to_spectral(const PhysicalField& samples);
PhysicalField from_spectral(const SpectralField& f);

// Sharp Galerkin cutoff pi_Lambda with Lambda = 2^m: keeps |k|_inf < 2^m
// (strict), zeroes the rest, tags the result with cutoff_m = m.
SpectralField project_cutoff(const SpectralField& f, int m);

// Leray-Hodge projection, multiplier delta_ij - k_i k_j / |k|^2; identity on
// the k = 0 mode (zero-mean handling is the solver's job).
SpectralField leray_project(const SpectralField& f);

SpectralField spectral_derivative(const SpectralField& f, int axis);
SpectralField laplacian(const SpectralField& f);

// -P div pi_Lambda(u (x) u), evaluated exactly: the quadratic convolution is
// formed on a zero-padded grid of >= 3*2^m points per axis, so no aliased
// mode contaminates the retained band. Requires u band-limited to |k|_inf < 2^m.
SpectralField galerkin_nonlinear(const SpectralField& u, int m);

// Coefficients of the *untruncated* product u (x) u at the requested modes
// (each |k|_inf <= 2^m), exact on the same padded grid. Row-major d*d matrix
// per requested mode, w[i*d+j] = (u_i u_j)_hat(k).
std::vector<std::vector<cplx>> quadratic_product_modes(const SpectralField& u, int m,
                                                       const std::vector<std::array<int, 3>>& modes);

// Same single convolver pass as galerkin_nonlinear, additionally extracting
// (P div(u (x) u))(k) -- the untruncated pairing the Euler residual needs --
// at each tap mode.
SpectralField galerkin_nonlinear_tapped(const SpectralField& u, int m,
                                        const std::vector<std::array<int, 3>>& tap_modes,
                                        std::vector<std::array<cplx, 3>>& full_div);

bool is_band_limited(const SpectralField& f, int m);

// Largest deviation from conj symmetry: max |imag| of the synthesized
// physical field, full complex synthesis (the stored k_last = 0 plane is the
// only place asymmetry can live in this layout).
double hermitian_residue(const SpectralField& f);

// 2D Taylor-Green vortex u = (sin x0 cos x1, -cos x0 sin x1).
SpectralField taylor_green(TorusGrid grid);

// Zero-mean, divergence-free, Hermitian random field with coefficients
// amplitude(|k|) * (complex Gaussian), band-limited to |k|_inf < 2^m.
SpectralField random_divfree_field(TorusGrid grid, int m, std::uint64_t seed,
                                   const std::function<double(double)>& amplitude);

} // namespace llns
