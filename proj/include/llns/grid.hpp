#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace llns {

// Periodic torus [0,2pi)^d sampled on n collocation points per axis.
// Spectral data lives in the FFTW r2c ("Hermitian-reduced") layout: the last
// axis stores frequencies 0..n/2, the others store 0..n/2-1, +-n/2, -(n/2-1)..-1
// in FFTW index order. Nyquist entries (frequency +-n/2) are kept zero, so the
// resolvable band is |k_i| <= n/2 - 1 per axis.
class TorusGrid {
  public:
    TorusGrid() = default;
    TorusGrid(int dim, int n_per_dim) : dim_(dim), n_(n_per_dim) {
        if (dim_ != 2 && dim_ != 3)
            throw std::invalid_argument("TorusGrid: dim must be 2 or 3");
        if (n_ < 4 || (n_ & (n_ - 1)) != 0)
            throw std::invalid_argument("TorusGrid: n_per_dim must be a power of two >= 4");
    }

    int dim() const { return dim_; }
    int n() const { return n_; }
    int max_k() const { return n_ / 2 - 1; }

    std::size_t physical_size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim_; ++a) s *= static_cast<std::size_t>(n_);
        return s;
    }
    // r2c layout: last axis reduced to n/2+1 entries.
    std::size_t spectral_size() const {
        std::size_t s = static_cast<std::size_t>(n_ / 2 + 1);
        for (int a = 0; a < dim_ - 1; ++a) s *= static_cast<std::size_t>(n_);
        return s;
    }

    // Signed frequency of a raw storage index along a non-reduced axis.
    // Index n/2 is the (zeroed) Nyquist entry, reported as -n/2.
    int freq(int index) const { return index <= n_ / 2 ? (index == n_ / 2 ? -n_ / 2 : index) : index - n_; }

    // Storage index of a signed frequency on a non-reduced axis.
    int index_of_freq(int k) const { return k >= 0 ? k : k + n_; }

    // Decode a flat r2c index into signed wavevector components.
    std::array<int, 3> wavevector(std::size_t flat) const {
        std::array<int, 3> k{0, 0, 0};
        const int last = n_ / 2 + 1;
        if (dim_ == 2) {
            k[1] = static_cast<int>(flat % last);
            k[0] = freq(static_cast<int>(flat / last));
        } else {
            k[2] = static_cast<int>(flat % last);
            std::size_t rest = flat / last;
            k[1] = freq(static_cast<int>(rest % n_));
            k[0] = freq(static_cast<int>(rest / n_));
        }
        return k;
    }

    std::size_t flat_index(const std::array<int, 3>& k) const {
        const std::size_t last = static_cast<std::size_t>(n_ / 2 + 1);
        if (dim_ == 2)
            return static_cast<std::size_t>(index_of_freq(k[0])) * last + static_cast<std::size_t>(k[1]);
        return (static_cast<std::size_t>(index_of_freq(k[0])) * n_ + index_of_freq(k[1])) * last +
               static_cast<std::size_t>(k[2]);
    }

    bool operator==(const TorusGrid& o) const { return dim_ == o.dim_ && n_ == o.n_; }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }

  private:
    int dim_ = 2;
    int n_ = 4;
};

inline int max_norm(const std::array<int, 3>& k) {
    int m = 0;
    for (int c : k) m = std::max(m, std::abs(c));
    return m;
}

inline double squared_norm(const std::array<int, 3>& k) {
    return double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
}

} // namespace llns
