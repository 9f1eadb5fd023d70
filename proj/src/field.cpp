#include "llns/field.hpp"

#include <cmath>
#include <stdexcept>

namespace llns {

SpectralField::SpectralField(TorusGrid grid)
    : grid_(grid), comps_(grid.dim(), std::vector<cplx>(grid.spectral_size(), cplx(0.0, 0.0))) {}

cplx SpectralField::coeff(int c, const std::array<int, 3>& k) const {
    const int d = grid_.dim();
    if (k[d - 1] >= 0) return comps_[c][grid_.flat_index(k)];
    // Mirror of a stored entry: u(-k) = conj(u(k)).
    std::array<int, 3> mk{-k[0], -k[1], -k[2]};
    return std::conj(comps_[c][grid_.flat_index(mk)]);
}

void SpectralField::set_coeff(int c, const std::array<int, 3>& k, cplx value) {
    const int d = grid_.dim();
    if (k[d - 1] < 0) {
        std::array<int, 3> mk{-k[0], -k[1], -k[2]};
        comps_[c][grid_.flat_index(mk)] = std::conj(value);
        return;
    }
    comps_[c][grid_.flat_index(k)] = value;
    if (k[d - 1] == 0) {
        std::array<int, 3> mk{-k[0], -k[1], -k[2]};
        bool self = true;
        for (int a = 0; a < d; ++a) self = self && (mk[a] == k[a]);
        if (!self) comps_[c][grid_.flat_index(mk)] = std::conj(value);
    }
}

void SpectralField::fill_zero() {
    for (auto& comp : comps_)
        for (auto& v : comp) v = cplx(0.0, 0.0);
}

void SpectralField::zero_nyquist() {
    const int ny = grid_.n() / 2;
    const std::size_t m = grid_.spectral_size();
    for (std::size_t i = 0; i < m; ++i) {
        auto k = grid_.wavevector(i);
        bool hit = false;
        for (int a = 0; a < grid_.dim(); ++a) hit = hit || (std::abs(k[a]) == ny);
        if (hit)
            for (auto& comp : comps_) comp[i] = cplx(0.0, 0.0);
    }
}

void SpectralField::enforce_hermitian() {
    zero_nyquist();
    const std::size_t m = grid_.spectral_size();
    const int d = grid_.dim();
    for (std::size_t i = 0; i < m; ++i) {
        auto k = grid_.wavevector(i);
        if (k[d - 1] != 0) continue;
        // Canonical representative on the plane: first nonzero component > 0.
        int lead = 0;
        for (int a = 0; a < d - 1 && lead == 0; ++a) lead = k[a];
        std::array<int, 3> mk{-k[0], -k[1], -k[2]};
        if (lead > 0) {
            std::size_t j = grid_.flat_index(mk);
            for (auto& comp : comps_) comp[j] = std::conj(comp[i]);
        } else if (lead == 0) {
            for (auto& comp : comps_) comp[i] = cplx(comp[i].real(), 0.0);
        }
    }
}

void SpectralField::zero_mean() {
    for (auto& comp : comps_) comp[0] = cplx(0.0, 0.0);
}

std::array<double, 3> SpectralField::mean() const {
    std::array<double, 3> m{0.0, 0.0, 0.0};
    for (int c = 0; c < grid_.dim(); ++c) m[c] = comps_[c][0].real();
    return m;
}

double inner(const SpectralField& a, const SpectralField& b) {
    if (a.grid() != b.grid()) throw std::invalid_argument("inner: grid mismatch");
    double s = 0.0;
    const std::size_t m = a.grid().spectral_size();
    const std::size_t last = static_cast<std::size_t>(a.grid().n() / 2 + 1);
    for (int c = 0; c < a.grid().dim(); ++c) {
        const cplx* pa = a.component(c);
        const cplx* pb = b.component(c);
        for (std::size_t i = 0; i < m; ++i) {
            double w = (i % last) > 0 ? 2.0 : 1.0; // implicit conjugate mirror
            s += w * (pa[i].real() * pb[i].real() + pa[i].imag() * pb[i].imag());
        }
    }
    return s;
}

double SpectralField::norm2() const { return std::sqrt(inner(*this, *this)); }

double SpectralField::energy() const { return 0.5 * inner(*this, *this); }

double SpectralField::max_divergence() const {
    double worst = 0.0;
    const std::size_t m = grid_.spectral_size();
    for (std::size_t i = 0; i < m; ++i) {
        auto k = grid_.wavevector(i);
        cplx div(0.0, 0.0);
        for (int c = 0; c < grid_.dim(); ++c) div += double(k[c]) * comps_[c][i];
        worst = std::max(worst, std::abs(div));
    }
    return worst;
}

double SpectralField::max_abs_coeff() const {
    double worst = 0.0;
    for (const auto& comp : comps_)
        for (const auto& v : comp) worst = std::max(worst, std::abs(v));
    return worst;
}

bool SpectralField::finite() const {
    for (const auto& comp : comps_)
        for (const auto& v : comp)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    for (int c = 0; c < grid_.dim(); ++c)
        for (std::size_t i = 0; i < comps_[c].size(); ++i) comps_[c][i] += o.comps_[c][i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    for (int c = 0; c < grid_.dim(); ++c)
        for (std::size_t i = 0; i < comps_[c].size(); ++i) comps_[c][i] -= o.comps_[c][i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& comp : comps_)
        for (auto& v : comp) v *= s;
    return *this;
}

void SpectralField::axpy(double a, const SpectralField& x) {
    for (int c = 0; c < grid_.dim(); ++c)
        for (std::size_t i = 0; i < comps_[c].size(); ++i) comps_[c][i] += a * x.comps_[c][i];
}

} // namespace llns
