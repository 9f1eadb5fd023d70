#include "llns/spectral_ops.hpp"

#include "llns/fft.hpp"
#include "llns/rng.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace llns {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void leray_multiplier(const std::array<int, 3>& k, int d, const cplx* in, cplx* out) {
    const double k2 = squared_norm(k);
    if (k2 == 0.0) {
        for (int i = 0; i < d; ++i) out[i] = in[i];
        return;
    }
    cplx kdotu(0.0, 0.0);
    for (int j = 0; j < d; ++j) kdotu += double(k[j]) * in[j];
    for (int i = 0; i < d; ++i) out[i] = in[i] - (double(k[i]) / k2) * kdotu;
}

// Exact quadratic convolution on a zero-padded grid of P = 3*2^m points per
// axis: inputs band-limited to |k|_inf <= 2^m - 1 produce products whose
// aliases all land outside |k|_inf <= 2^m, so every retained mode is exact.
class PaddedConvolver {
  public:
    PaddedConvolver(int dim, int m) : dim_(dim), m_(m), pad_(3 << m) {
        const int P = pad_;
        phys_size_ = 1;
        for (int a = 0; a < dim_; ++a) phys_size_ *= static_cast<std::size_t>(P);
        spec_size_ = phys_size_ / P * (P / 2 + 1);

        spread_.assign(dim_, std::vector<cplx>(spec_size_));
        real_.assign(dim_, std::vector<double>(phys_size_));
        const int npair = dim_ * (dim_ + 1) / 2;
        prod_.assign(npair, std::vector<cplx>(spec_size_));

        std::lock_guard<std::mutex> lock(planner_mutex());
        int dims[3] = {P, P, P};
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::vector<double> rbuf(phys_size_);
        std::vector<cplx> cbuf(spec_size_);
        c2r_ = fftw_plan_dft_c2r(dim_, dims, reinterpret_cast<fftw_complex*>(cbuf.data()), rbuf.data(),
                                 flags);
        r2c_ = fftw_plan_dft_r2c(dim_, dims, rbuf.data(), reinterpret_cast<fftw_complex*>(cbuf.data()),
                                 flags);
    }

    ~PaddedConvolver() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(c2r_);
        fftw_destroy_plan(r2c_);
    }

    // Fill prod_ with the spectral coefficients of u_i u_j.
    void compute(const SpectralField& u) {
        const TorusGrid& g = u.grid();
        const int band = (1 << m_) - 1;

        for (int c = 0; c < dim_; ++c) {
            std::fill(spread_[c].begin(), spread_[c].end(), cplx(0.0, 0.0));
            const cplx* src = u.component(c);
            const std::size_t n_modes = g.spectral_size();
            for (std::size_t i = 0; i < n_modes; ++i) {
                auto k = g.wavevector(i);
                if (max_norm(k) > band) continue;
                spread_[c][flat_padded(k)] = src[i];
            }
            fftw_execute_dft_c2r(c2r_, reinterpret_cast<fftw_complex*>(spread_[c].data()),
                                 real_[c].data());
        }

        const double inv_n = 1.0 / static_cast<double>(phys_size_);
        int pair = 0;
        for (int i = 0; i < dim_; ++i) {
            for (int j = i; j < dim_; ++j, ++pair) {
                // product goes through a real scratch (reuse the i-th buffer
                // only after all pairs touching it are done: iterate j >= i
                // and multiply into a separate buffer)
                std::vector<double>& scratch = prod_real_;
                scratch.resize(phys_size_);
                const double* a = real_[i].data();
                const double* b = real_[j].data();
                for (std::size_t x = 0; x < phys_size_; ++x) scratch[x] = a[x] * b[x];
                fftw_execute_dft_r2c(r2c_, scratch.data(),
                                     reinterpret_cast<fftw_complex*>(prod_[pair].data()));
                for (auto& v : prod_[pair]) v *= inv_n;
            }
        }
    }

    // (u_i u_j)_hat at k, |k|_inf <= 2^m. Symmetric in (i, j).
    cplx product_coeff(int i, int j, const std::array<int, 3>& k) const {
        if (i > j) std::swap(i, j);
        const int pair = pair_index(i, j);
        if (k[dim_ - 1] >= 0) return prod_[pair][flat_padded(k)];
        std::array<int, 3> mk{-k[0], -k[1], -k[2]};
        return std::conj(prod_[pair][flat_padded(mk)]);
    }

    int dim() const { return dim_; }
    int m() const { return m_; }

  private:
    int pair_index(int i, int j) const {
        // upper-triangular packing, row i, column j >= i
        return i * dim_ - i * (i - 1) / 2 + (j - i);
    }

    std::size_t flat_padded(const std::array<int, 3>& k) const {
        const int P = pad_;
        const std::size_t last = static_cast<std::size_t>(P / 2 + 1);
        auto idx = [P](int kk) { return static_cast<std::size_t>(kk >= 0 ? kk : kk + P); };
        if (dim_ == 2) return idx(k[0]) * last + static_cast<std::size_t>(k[1]);
        return (idx(k[0]) * P + idx(k[1])) * last + static_cast<std::size_t>(k[2]);
    }

    int dim_, m_, pad_;
    std::size_t phys_size_ = 0, spec_size_ = 0;
    std::vector<std::vector<cplx>> spread_;
    std::vector<std::vector<double>> real_;
    std::vector<std::vector<cplx>> prod_;
    std::vector<double> prod_real_;
    fftw_plan c2r_ = nullptr, r2c_ = nullptr;
};

PaddedConvolver& convolver_for(int dim, int m) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<PaddedConvolver>> cache;
    auto key = std::make_pair(dim, m);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<PaddedConvolver>(dim, m)).first;
    return *it->second;
}

void require_band(const SpectralField& u, int m) {
    if ((1 << m) - 1 > u.grid().max_k())
        throw std::invalid_argument("cutoff 2^m exceeds the grid band");
    if (u.cutoff_m && *u.cutoff_m <= m) return;
    if (!is_band_limited(u, m))
        throw std::invalid_argument("field is not band-limited to |k|_inf < 2^m");
}

} // namespace

SpectralField to_spectral(const PhysicalField& samples) {
    const TorusGrid& g = samples.grid;
    if (static_cast<int>(samples.comps.size()) != g.dim())
        throw std::invalid_argument("to_spectral: component count does not match grid dimension");
    for (const auto& comp : samples.comps) {
        if (comp.size() != g.physical_size())
            throw std::invalid_argument("to_spectral: sample array shape mismatch");
        for (double v : comp)
            if (!std::isfinite(v)) throw std::invalid_argument("to_spectral: non-finite samples");
    }
    SpectralField out(g);
    const Transforms& tf = Transforms::get(g);
    for (int c = 0; c < g.dim(); ++c) tf.forward(samples.comps[c].data(), out.component(c));
    out.zero_nyquist();
    return out;
}

PhysicalField from_spectral(const SpectralField& f) {
    PhysicalField out(f.grid());
    const Transforms& tf = Transforms::get(f.grid());
    for (int c = 0; c < f.grid().dim(); ++c) tf.backward(f.component(c), out.comps[c].data());
    return out;
}

SpectralField project_cutoff(const SpectralField& f, int m) {
    const TorusGrid& g = f.grid();
    if (m < 0 || (1 << m) - 1 > g.max_k())
        throw std::invalid_argument("project_cutoff: 2^m exceeds the grid band");
    SpectralField out(g);
    const int band = 1 << m;
    const std::size_t n_modes = g.spectral_size();
    for (std::size_t i = 0; i < n_modes; ++i) {
        if (max_norm(g.wavevector(i)) >= band) continue;
        for (int c = 0; c < g.dim(); ++c) out.component(c)[i] = f.component(c)[i];
    }
    out.divergence_free = f.divergence_free;
    out.cutoff_m = m;
    return out;
}

SpectralField leray_project(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    SpectralField out(g);
    const int d = g.dim();
    const std::size_t n_modes = g.spectral_size();
    cplx in[3], pr[3];
    for (std::size_t i = 0; i < n_modes; ++i) {
        auto k = g.wavevector(i);
        for (int c = 0; c < d; ++c) in[c] = f.component(c)[i];
        leray_multiplier(k, d, in, pr);
        for (int c = 0; c < d; ++c) out.component(c)[i] = pr[c];
    }
    out.divergence_free = true;
    out.cutoff_m = f.cutoff_m;
    return out;
}

SpectralField spectral_derivative(const SpectralField& f, int axis) {
    const TorusGrid& g = f.grid();
    if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("spectral_derivative: bad axis");
    SpectralField out(g);
    const std::size_t n_modes = g.spectral_size();
    for (std::size_t i = 0; i < n_modes; ++i) {
        const cplx ik(0.0, double(g.wavevector(i)[axis]));
        for (int c = 0; c < g.dim(); ++c) out.component(c)[i] = ik * f.component(c)[i];
    }
    out.divergence_free = f.divergence_free;
    out.cutoff_m = f.cutoff_m;
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    SpectralField out(g);
    const std::size_t n_modes = g.spectral_size();
    for (std::size_t i = 0; i < n_modes; ++i) {
        const double k2 = squared_norm(g.wavevector(i));
        for (int c = 0; c < g.dim(); ++c) out.component(c)[i] = -k2 * f.component(c)[i];
    }
    out.divergence_free = f.divergence_free;
    out.cutoff_m = f.cutoff_m;
    return out;
}

bool is_band_limited(const SpectralField& f, int m) {
    const TorusGrid& g = f.grid();
    const int band = 1 << m;
    const std::size_t n_modes = g.spectral_size();
    for (std::size_t i = 0; i < n_modes; ++i) {
        if (max_norm(g.wavevector(i)) < band) continue;
        for (int c = 0; c < g.dim(); ++c)
            if (f.component(c)[i] != cplx(0.0, 0.0)) return false;
    }
    return true;
}

namespace {

SpectralField assemble_nonlinear(const SpectralField& u, int m, PaddedConvolver& conv) {
    const TorusGrid& g = u.grid();
    const int d = g.dim();
    SpectralField out(g);
    const int band = 1 << m;
    const std::size_t n_modes = g.spectral_size();
    cplx div[3], pr[3];
    for (std::size_t i = 0; i < n_modes; ++i) {
        auto k = g.wavevector(i);
        if (max_norm(k) >= band) continue;
        if (k[0] == 0 && k[1] == 0 && k[2] == 0) continue;
        for (int l = 0; l < d; ++l) {
            cplx s(0.0, 0.0);
            for (int j = 0; j < d; ++j) s += cplx(0.0, double(k[j])) * conv.product_coeff(l, j, k);
            div[l] = s;
        }
        leray_multiplier(k, d, div, pr);
        for (int c = 0; c < d; ++c) out.component(c)[i] = -pr[c];
    }
    out.divergence_free = true;
    out.cutoff_m = m;
    return out;
}

std::array<cplx, 3> projected_divergence_at(PaddedConvolver& conv, int d,
                                            const std::array<int, 3>& k) {
    cplx div[3], pr[3];
    for (int l = 0; l < d; ++l) {
        cplx s(0.0, 0.0);
        for (int j = 0; j < d; ++j) s += cplx(0.0, double(k[j])) * conv.product_coeff(l, j, k);
        div[l] = s;
    }
    leray_multiplier(k, d, div, pr);
    std::array<cplx, 3> out{cplx(0, 0), cplx(0, 0), cplx(0, 0)};
    for (int c = 0; c < d; ++c) out[c] = pr[c];
    return out;
}

} // namespace

SpectralField galerkin_nonlinear(const SpectralField& u, int m) {
    require_band(u, m);
    if (m == 0) { // band is {0}: constant field, divergence vanishes
        SpectralField out(u.grid());
        out.divergence_free = true;
        out.cutoff_m = m;
        return out;
    }
    PaddedConvolver& conv = convolver_for(u.grid().dim(), m);
    conv.compute(u);
    return assemble_nonlinear(u, m, conv);
}

SpectralField galerkin_nonlinear_tapped(const SpectralField& u, int m,
                                        const std::vector<std::array<int, 3>>& tap_modes,
                                        std::vector<std::array<cplx, 3>>& full_div) {
    require_band(u, m);
    const int d = u.grid().dim();
    full_div.assign(tap_modes.size(), {cplx(0, 0), cplx(0, 0), cplx(0, 0)});
    if (m == 0) {
        SpectralField out(u.grid());
        out.divergence_free = true;
        out.cutoff_m = m;
        return out;
    }
    PaddedConvolver& conv = convolver_for(d, m);
    conv.compute(u);
    for (std::size_t q = 0; q < tap_modes.size(); ++q)
        full_div[q] = projected_divergence_at(conv, d, tap_modes[q]);
    return assemble_nonlinear(u, m, conv);
}

std::vector<std::vector<cplx>> quadratic_product_modes(const SpectralField& u, int m,
                                                       const std::vector<std::array<int, 3>>& modes) {
    require_band(u, m);
    const int d = u.grid().dim();
    PaddedConvolver& conv = convolver_for(d, m);
    conv.compute(u);
    std::vector<std::vector<cplx>> out;
    out.reserve(modes.size());
    for (const auto& k : modes) {
        if (max_norm(k) > (1 << m))
            throw std::invalid_argument("quadratic_product_modes: mode outside the exact band");
        std::vector<cplx> w(static_cast<std::size_t>(d) * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) w[static_cast<std::size_t>(i) * d + j] = conv.product_coeff(i, j, k);
        out.push_back(std::move(w));
    }
    return out;
}

double hermitian_residue(const SpectralField& f) {
    const TorusGrid& g = f.grid();
    const int n = g.n();
    const int d = g.dim();
    std::vector<cplx> full(g.physical_size());
    double worst = 0.0;
    const Transforms& tf = Transforms::get(g);

    auto stored = [&](int c, std::array<int, 3> idx) {
        std::size_t flat;
        const std::size_t last = static_cast<std::size_t>(n / 2 + 1);
        if (d == 2)
            flat = static_cast<std::size_t>(idx[0]) * last + static_cast<std::size_t>(idx[1]);
        else
            flat = (static_cast<std::size_t>(idx[0]) * n + idx[1]) * last + static_cast<std::size_t>(idx[2]);
        return f.component(c)[flat];
    };

    for (int c = 0; c < d; ++c) {
        std::size_t pos = 0;
        const int n0 = n, n1 = d == 3 ? n : 1;
        for (int i0 = 0; i0 < n0; ++i0) {
            for (int i1 = 0; i1 < n1; ++i1) {
                for (int il = 0; il < n; ++il, ++pos) {
                    std::array<int, 3> idx = d == 2 ? std::array<int, 3>{i0, il, 0}
                                                    : std::array<int, 3>{i0, i1, il};
                    if (il <= n / 2) {
                        full[pos] = stored(c, idx);
                    } else {
                        std::array<int, 3> mir{(n - i0) % n, d == 3 ? (n - i1) % n : 0, n - il};
                        if (d == 2) mir = {(n - i0) % n, n - il, 0};
                        full[pos] = std::conj(stored(c, mir));
                    }
                }
            }
        }
        tf.backward_c2c(full.data(), full.data());
        for (const auto& v : full) worst = std::max(worst, std::abs(v.imag()));
    }
    return worst;
}

SpectralField taylor_green(TorusGrid grid) {
    if (grid.dim() != 2)
        throw std::invalid_argument("taylor_green: defined here for the 2D vortex only");
    SpectralField u(grid);
    const cplx quarter_i(0.0, 0.25);
    // u = (sin x0 cos x1, -cos x0 sin x1)
    u.set_coeff(0, {1, 1, 0}, -quarter_i);
    u.set_coeff(0, {1, -1, 0}, -quarter_i);
    u.set_coeff(1, {1, 1, 0}, quarter_i);
    u.set_coeff(1, {1, -1, 0}, -quarter_i);
    u.divergence_free = true;
    u.cutoff_m = 1;
    return u;
}

SpectralField random_divfree_field(TorusGrid grid, int m, std::uint64_t seed,
                                   const std::function<double(double)>& amplitude) {
    if ((1 << m) - 1 > grid.max_k())
        throw std::invalid_argument("random_divfree_field: 2^m exceeds the grid band");
    SpectralField f(grid);
    const RngStream rng{seed, 0, 0};
    const int d = grid.dim();
    const int band = 1 << m;
    const std::size_t n_modes = grid.spectral_size();
    cplx raw[3], pr[3];
    for (std::size_t i = 0; i < n_modes; ++i) {
        auto k = grid.wavevector(i);
        const int kinf = max_norm(k);
        if (kinf == 0 || kinf >= band) continue;
        const double amp = amplitude(std::sqrt(squared_norm(k)));
        for (int c = 0; c < d; ++c) {
            auto nrm = rng.normals(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(c));
            raw[c] = amp * cplx(nrm[0], nrm[1]) * M_SQRT1_2;
        }
        leray_multiplier(k, d, raw, pr);
        for (int c = 0; c < d; ++c) f.component(c)[i] = pr[c];
    }
    f.enforce_hermitian();
    f.zero_mean();
    f.divergence_free = true;
    f.cutoff_m = m;
    return f;
}

} // namespace llns
