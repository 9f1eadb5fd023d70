#include "llns/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace llns {

double covariance_oracle(int i, int j, int k, int l, int d) {
    if (i < 1 || j < 1 || k < 1 || l < 1 || i > d || j > d || k > d || l > d)
        throw std::out_of_range("covariance_oracle: index out of range");
    auto kd = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    return kd(i, k) * kd(j, l) + kd(i, l) * kd(j, k) - (2.0 / 3.0) * kd(i, j) * kd(k, l);
}

std::size_t NoiseIncrement::mode_count() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(side());
    return s;
}

std::size_t NoiseIncrement::mode_index(const std::array<int, 3>& k) const {
    const int K = half_width();
    const int W = side();
    for (int a = 0; a < dim; ++a)
        if (k[a] < -K || k[a] > K) throw std::out_of_range("NoiseIncrement: mode outside band");
    std::size_t idx = 0;
    for (int a = 0; a < dim; ++a) idx = idx * W + static_cast<std::size_t>(k[a] + K);
    return idx;
}

namespace {

bool is_canonical(const std::array<int, 3>& k, int dim) {
    for (int a = 0; a < dim; ++a) {
        if (k[a] > 0) return true;
        if (k[a] < 0) return false;
    }
    return false; // k = 0 handled separately
}

// Subtract tr/d from the diagonal, writing the last diagonal entry as minus
// the sum of the others so the trace is a floating-point exact zero.
void detrace(cplx* a, int d) {
    cplx tr(0.0, 0.0);
    for (int i = 0; i < d; ++i) tr += a[i * d + i];
    const cplx t = tr / double(d);
    cplx partial(0.0, 0.0);
    for (int i = 0; i < d - 1; ++i) {
        a[i * d + i] -= t;
        partial += a[i * d + i];
    }
    a[(d - 1) * d + (d - 1)] = -partial;
}

} // namespace

void sample_increment(int dim, int m, double dt, const RngStream& rng, NoiseIncrement& out) {
    if (dt <= 0.0) throw std::invalid_argument("sample_increment: dt must be positive");
    if (m > 10) throw std::invalid_argument("sample_increment: keying supports m <= 10");
    out.dim = dim;
    out.m = m;
    out.dt = dt;
    const std::size_t d2 = static_cast<std::size_t>(dim) * dim;
    out.entries.assign(out.mode_count() * d2, cplx(0.0, 0.0));

    const int K = out.half_width();
    const double diag_scale = std::sqrt(dt);        // E|xi_ii|^2 = 2 dt
    const double off_scale = std::sqrt(0.5 * dt);   // E|xi_ij|^2 = dt
    const double real_diag = std::sqrt(2.0 * dt);   // k = 0, real entries
    const double real_off = std::sqrt(dt);

    std::array<int, 3> k{0, 0, 0};
    auto visit = [&](const std::array<int, 3>& kv) {
        const std::size_t kidx = out.mode_index(kv);
        cplx* a = out.entries.data() + kidx * d2;
        const bool origin = kv[0] == 0 && kv[1] == 0 && kv[2] == 0;
        if (!origin && !is_canonical(kv, dim)) return; // mirrored afterwards
        // Band-independent draw keying: the same k gets the same Brownian
        // path whatever the cutoff, 11 bits per signed component.
        std::uint64_t kcode = 0;
        for (int a2 = 0; a2 < dim; ++a2)
            kcode = (kcode << 11) | static_cast<std::uint64_t>(kv[a2] + 1024);
        const auto slot = static_cast<std::uint32_t>(kcode);
        const auto chan_hi = static_cast<std::uint32_t>(kcode >> 32) << 8;
        int entry = 0;
        for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j, ++entry) {
                const auto g = rng.normals(slot, chan_hi | static_cast<std::uint32_t>(entry));
                cplx v;
                if (origin)
                    v = cplx((i == j ? real_diag : real_off) * g[0], 0.0);
                else
                    v = (i == j ? diag_scale : off_scale) * cplx(g[0], g[1]);
                a[i * dim + j] = v;
                a[j * dim + i] = v;
            }
        }
        detrace(a, dim);
        if (!origin) {
            std::array<int, 3> mk{-kv[0], -kv[1], -kv[2]};
            cplx* b = out.entries.data() + out.mode_index(mk) * d2;
            for (std::size_t e = 0; e < d2; ++e) b[e] = std::conj(a[e]);
        }
    };

    if (dim == 2) {
        for (k[0] = -K; k[0] <= K; ++k[0])
            for (k[1] = -K; k[1] <= K; ++k[1]) visit(k);
    } else {
        for (k[0] = -K; k[0] <= K; ++k[0])
            for (k[1] = -K; k[1] <= K; ++k[1])
                for (k[2] = -K; k[2] <= K; ++k[2]) visit(k);
    }
}

NoiseIncrement sample_increment(int dim, int m, double dt, const RngStream& rng) {
    NoiseIncrement out;
    sample_increment(dim, m, dt, rng, out);
    return out;
}

SpectralField stochastic_forcing(const NoiseIncrement& inc, double amplitude, TorusGrid grid) {
    if (amplitude < 0.0) throw std::invalid_argument("stochastic_forcing: amplitude must be >= 0");
    if (grid.dim() != inc.dim) throw std::invalid_argument("stochastic_forcing: dimension mismatch");
    if ((1 << inc.m) - 1 > grid.max_k())
        throw std::invalid_argument("stochastic_forcing: increment band exceeds grid");
    SpectralField f(grid);
    const int d = grid.dim();
    const int band = 1 << inc.m;
    const std::size_t n_modes = grid.spectral_size();
    for (std::size_t idx = 0; idx < n_modes; ++idx) {
        auto k = grid.wavevector(idx);
        const int kinf = max_norm(k);
        if (kinf == 0 || kinf >= band) continue;
        const cplx* xi = inc.matrix(k);
        const double k2 = squared_norm(k);
        cplx div[3];
        for (int l = 0; l < d; ++l) {
            cplx s(0.0, 0.0);
            for (int j = 0; j < d; ++j) s += cplx(0.0, double(k[j])) * xi[l * d + j];
            div[l] = s;
        }
        cplx kdot(0.0, 0.0);
        for (int j = 0; j < d; ++j) kdot += double(k[j]) * div[j];
        for (int i = 0; i < d; ++i)
            f.component(i)[idx] = amplitude * (div[i] - (double(k[i]) / k2) * kdot);
    }
    f.divergence_free = true;
    f.cutoff_m = inc.m;
    return f;
}

double forcing_mode_second_moment(const std::array<int, 3>& k, int d) {
    const double k2 = squared_norm(k);
    if (k2 == 0.0) return 0.0;
    auto proj = [&](int i, int l) { return (i == l ? 1.0 : 0.0) - double(k[i]) * k[l] / k2; };
    double total = 0.0;
    for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l)
            for (int j = 0; j < d; ++j)
                for (int lp = 0; lp < d; ++lp)
                    for (int jp = 0; jp < d; ++jp)
                        total += proj(i, l) * proj(i, lp) * double(k[j]) * double(k[jp]) *
                                 covariance_oracle(l + 1, j + 1, lp + 1, jp + 1, d);
    return total;
}

} // namespace llns
