#pragma once

#include "llns/grid.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace llns {

// Thin wrapper around FFTW r2c/c2r/c2c plans for one (dim, n) pair.
// Plans are created once (under a global lock; FFTW planning is not
// thread-safe) and executed through the new-array interface, so a single
// Transforms object may be shared by concurrent readers. Plans use
// FFTW_ESTIMATE | FFTW_UNALIGNED: deterministic algorithm choice and no
// alignment requirement on caller buffers, which keeps results bit-stable
// across runs.
class Transforms {
  public:
    explicit Transforms(TorusGrid grid);
    ~Transforms();

    Transforms(const Transforms&) = delete;
    Transforms& operator=(const Transforms&) = delete;

    const TorusGrid& grid() const { return grid_; }

    // Analysis with the mean convention: out(k) = (1/N) sum_x in(x) e^{-ik.x}.
    void forward(const double* in, std::complex<double>* out) const;
    // Synthesis: out(x) = sum_k in(k) e^{ik.x} over the Hermitian band.
    // Scratch copy is taken internally (c2r destroys its input).
    void backward(const std::complex<double>* in, double* out) const;

    // Full-spectrum complex synthesis: out(x) = sum_k in(k) e^{ik.x} with
    // `in` of physical_size in row-major FFTW frequency order.
    void backward_c2c(const std::complex<double>* in, std::complex<double>* out) const;

    // Shared, lazily-created instance per (dim, n).
    static const Transforms& get(TorusGrid grid);

  private:
    struct Impl;
    TorusGrid grid_;
    std::unique_ptr<Impl> impl_;
};

} // namespace llns
