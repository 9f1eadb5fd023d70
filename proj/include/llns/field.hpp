#pragma once

#include "llns/grid.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace llns {

using cplx = std::complex<double>;

// Fourier coefficients of a real d-component vector field on the torus,
// stored per component in the Hermitian-reduced r2c layout. Coefficients
// follow the mean convention: u_hat(k) = (2pi)^{-d} int u e^{-ik.x} dx.
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(TorusGrid grid);

    const TorusGrid& grid() const { return grid_; }
    int dim() const { return grid_.dim(); }

    cplx* component(int c) { return comps_[c].data(); }
    const cplx* component(int c) const { return comps_[c].data(); }

    cplx coeff(int c, const std::array<int, 3>& k) const;
    // Sets the coefficient at k and, when k lies on the stored k_last = 0
    // plane, its Hermitian mirror at -k.
    void set_coeff(int c, const std::array<int, 3>& k, cplx value);

    bool divergence_free = false;
    std::optional<int> cutoff_m;

    void fill_zero();
    // Re-impose conj symmetry on the k_last = 0 plane (and zero Nyquist
    // entries); used after direct spectral construction.
    void enforce_hermitian();
    void zero_nyquist();
    void zero_mean();
    std::array<double, 3> mean() const; // the k=0 coefficient, real parts

    // Multiplicity of a stored mode in sums over the full lattice
    // (2 for k_last > 0 whose mirror is implicit, else 1).
    double mode_weight(const std::array<int, 3>& k) const { return k[grid_.dim() - 1] > 0 ? 2.0 : 1.0; }

    // <f,g> = (2pi)^{-d} int f . conj(g) dx = sum_k f(k) . conj(g(k)).
    friend double inner(const SpectralField& a, const SpectralField& b);
    double norm2() const;          // sqrt(<f,f>)
    double energy() const;         // 0.5 <u,u>
    double max_divergence() const; // max_k |k . u_hat(k)|
    double max_abs_coeff() const;
    bool finite() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    void axpy(double a, const SpectralField& x); // this += a*x

  private:
    TorusGrid grid_;
    std::vector<std::vector<cplx>> comps_;
};

// Collocation samples of a real vector field, one contiguous array per
// component, row-major over the grid.
struct PhysicalField {
    TorusGrid grid;
    std::vector<std::vector<double>> comps;

    PhysicalField() = default;
    explicit PhysicalField(TorusGrid g)
        : grid(g), comps(g.dim(), std::vector<double>(g.physical_size(), 0.0)) {}
};

} // namespace llns
