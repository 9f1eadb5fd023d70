#include "llns/spectral_ops.hpp"

#include "llns/fft.hpp"

#include "doctest.h"

#include <cmath>

using namespace llns;

namespace {

PhysicalField sampled(TorusGrid g, int comp, double (*fn)(double, double, double)) {
    PhysicalField out(g);
    const int n = g.n();
    const double h = 2.0 * M_PI / n;
    std::size_t pos = 0;
    if (g.dim() == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j, ++pos) out.comps[comp][pos] = fn(i * h, j * h, 0.0);
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k, ++pos) out.comps[comp][pos] = fn(i * h, j * h, k * h);
    }
    return out;
}

double max_component_diff(const PhysicalField& a, const PhysicalField& b) {
    double worst = 0.0;
    for (std::size_t c = 0; c < a.comps.size(); ++c)
        for (std::size_t i = 0; i < a.comps[c].size(); ++i)
            worst = std::max(worst, std::abs(a.comps[c][i] - b.comps[c][i]));
    return worst;
}

// Direct O(M^2) mode-pair convolution of the truncated product, the
// de-aliasing oracle: (u_i u_j)(k) = sum_{k'} u_i(k') u_j(k - k').
cplx convolution_oracle(const SpectralField& u, int ci, int cj, const std::array<int, 3>& k, int m) {
    const int K = (1 << m) - 1;
    const int d = u.grid().dim();
    cplx s(0.0, 0.0);
    std::array<int, 3> q{0, 0, 0}, r{0, 0, 0};
    auto in_band = [&](const std::array<int, 3>& v) {
        for (int a = 0; a < d; ++a)
            if (std::abs(v[a]) > K) return false;
        return true;
    };
    const int z0 = d == 3 ? K : 0;
    for (q[0] = -K; q[0] <= K; ++q[0])
        for (q[1] = -K; q[1] <= K; ++q[1])
            for (q[2] = -z0; q[2] <= z0; ++q[2]) {
                for (int a = 0; a < 3; ++a) r[a] = k[a] - q[a];
                if (!in_band(r)) continue;
                s += u.coeff(ci, q) * u.coeff(cj, r);
            }
    return s;
}

} // namespace

TEST_CASE("to_spectral: constant field keeps only the mean mode") {
    TorusGrid g(2, 16);
    PhysicalField v(g);
    for (auto& x : v.comps[0]) x = 2.5;
    SpectralField f = to_spectral(v);
    CHECK(f.coeff(0, {0, 0, 0}).real() == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(std::abs(f.coeff(0, {1, 0, 0})) < 1e-14);
    CHECK(std::abs(f.coeff(1, {0, 0, 0})) < 1e-14);
}

TEST_CASE("to_spectral: cos(x1) has coefficients 1/2 at +-e1") {
    TorusGrid g(2, 16);
    PhysicalField v = sampled(g, 0, [](double x, double, double) { return std::cos(x); });
    SpectralField f = to_spectral(v);
    CHECK(f.coeff(0, {1, 0, 0}).real() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(f.coeff(0, {-1, 0, 0}).real() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(f.coeff(0, {1, 0, 0}).imag()) < 1e-14);
    CHECK(std::abs(f.coeff(0, {2, 0, 0})) < 1e-14);
}

TEST_CASE("to_spectral round trip is the identity to 1e-12") {
    for (int d : {2, 3}) {
        TorusGrid g(d, d == 2 ? 32 : 16);
        SpectralField f = random_divfree_field(g, d == 2 ? 3 : 2, 77u, [](double) { return 1.0; });
        PhysicalField phys = from_spectral(f);
        SpectralField back = to_spectral(phys);
        PhysicalField again = from_spectral(back);
        double scale = 0.0;
        for (const auto& comp : phys.comps)
            for (double x : comp) scale = std::max(scale, std::abs(x));
        CHECK(max_component_diff(phys, again) < 1e-12 * std::max(scale, 1.0));
    }
}

TEST_CASE("to_spectral rejects bad input") {
    TorusGrid g(2, 16);
    PhysicalField v(g);
    v.comps[0].pop_back();
    CHECK_THROWS_AS(to_spectral(v), std::invalid_argument);

    PhysicalField w(g);
    w.comps[1][3] = std::nan("");
    CHECK_THROWS_AS(to_spectral(w), std::invalid_argument);
}

TEST_CASE("project_cutoff keeps |k|_inf < 2^m strictly") {
    TorusGrid g(2, 32);
    SpectralField f(g);
    f.set_coeff(0, {1, 0, 0}, cplx(1.0, 0.0));
    f.set_coeff(0, {4, 0, 0}, cplx(1.0, 0.0));
    SpectralField out = project_cutoff(f, 2); // Lambda = 4
    CHECK(out.coeff(0, {1, 0, 0}).real() == 1.0);
    CHECK(std::abs(out.coeff(0, {4, 0, 0})) == 0.0);
    CHECK(out.cutoff_m == 2);

    SpectralField twice = project_cutoff(out, 2);
    CHECK(std::abs(twice.coeff(0, {1, 0, 0}) - out.coeff(0, {1, 0, 0})) == 0.0);
}

TEST_CASE("project_cutoff equals the mode-by-mode mask oracle") {
    TorusGrid g(2, 32);
    SpectralField f = random_divfree_field(g, 4, 5u, [](double) { return 1.0; });
    SpectralField cut = project_cutoff(f, 2);
    const std::size_t n = g.spectral_size();
    for (std::size_t i = 0; i < n; ++i) {
        auto k = g.wavevector(i);
        for (int c = 0; c < 2; ++c) {
            cplx expect = max_norm(k) < 4 ? f.component(c)[i] : cplx(0.0, 0.0);
            CHECK(cut.component(c)[i] == expect);
        }
    }
}

TEST_CASE("project_cutoff rejects m outside the grid band") {
    TorusGrid g(2, 16);
    SpectralField f(g);
    CHECK_THROWS_AS(project_cutoff(f, 4), std::invalid_argument);
}

TEST_CASE("cutoff mass is nondecreasing in m and converges") {
    TorusGrid g(2, 64);
    SpectralField f = random_divfree_field(g, 5, 11u, [](double) { return 1.0; });
    double prev = 0.0;
    for (int m = 0; m <= 5; ++m) {
        double cur = project_cutoff(f, m).norm2();
        CHECK(cur >= prev - 1e-15);
        prev = cur;
    }
    CHECK(prev == doctest::Approx(f.norm2()).epsilon(1e-13));
}

TEST_CASE("leray kills gradients and fixes transverse modes") {
    TorusGrid g(2, 16);
    SpectralField f(g);
    f.set_coeff(0, {1, 0, 0}, cplx(1.0, 0.0)); // velocity parallel to k
    SpectralField p = leray_project(f);
    CHECK(std::abs(p.coeff(0, {1, 0, 0})) < 1e-15);

    SpectralField h(g);
    h.set_coeff(1, {1, 0, 0}, cplx(1.0, 0.0)); // transverse
    SpectralField q = leray_project(h);
    CHECK(std::abs(q.coeff(1, {1, 0, 0}) - cplx(1.0, 0.0)) < 1e-15);
    CHECK(q.divergence_free);
}

TEST_CASE("leray output is orthogonal to every test gradient (quadrature)") {
    TorusGrid g(2, 32);
    SpectralField f = random_divfree_field(g, 3, 3u, [](double) { return 1.0; });
    // break divergence-freeness on purpose, then project
    f.set_coeff(0, {2, 1, 0}, cplx(0.7, -0.3));
    f.divergence_free = false;
    SpectralField p = leray_project(f);
    PhysicalField pp = from_spectral(p);
    const int n = g.n();
    const double h = 2.0 * M_PI / n;
    for (int kx = 0; kx <= 3; ++kx) {
        for (int ky = -3; ky <= 3; ++ky) {
            if (kx == 0 && ky <= 0) continue;
            // chi = cos(k.x): grad chi = -sin(k.x) k; quadrature average
            double acc = 0.0;
            std::size_t pos = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j, ++pos) {
                    const double s = -std::sin(kx * i * h + ky * j * h);
                    acc += s * (kx * pp.comps[0][pos] + ky * pp.comps[1][pos]);
                }
            CHECK(std::abs(acc / double(n) / double(n)) < 1e-12);
        }
    }
    // idempotent, identity on divergence-free fields
    SpectralField p2 = leray_project(p);
    double diff = 0.0;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < g.spectral_size(); ++i)
            diff = std::max(diff, std::abs(p2.component(c)[i] - p.component(c)[i]));
    CHECK(diff < 1e-15);
}

TEST_CASE("cutoff and leray commute") {
    TorusGrid g(2, 32);
    SpectralField f = random_divfree_field(g, 4, 19u, [](double) { return 1.0; });
    f.set_coeff(0, {3, 2, 0}, cplx(0.4, 0.1)); // non-solenoidal content
    SpectralField a = project_cutoff(leray_project(f), 2);
    SpectralField b = leray_project(project_cutoff(f, 2));
    double diff = 0.0;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < g.spectral_size(); ++i)
            diff = std::max(diff, std::abs(a.component(c)[i] - b.component(c)[i]));
    CHECK(diff < 1e-15);
}

TEST_CASE("spectral derivative: d/dx1 cos(x1) = -sin(x1)") {
    TorusGrid g(2, 16);
    PhysicalField v = sampled(g, 0, [](double x, double, double) { return std::cos(x); });
    SpectralField f = to_spectral(v);
    PhysicalField dv = from_spectral(spectral_derivative(f, 0));
    PhysicalField expect = sampled(g, 0, [](double x, double, double) { return -std::sin(x); });
    CHECK(max_component_diff(dv, expect) < 1e-13);
}

TEST_CASE("laplacian multiplies the (1,2) mode by -5") {
    TorusGrid g(2, 16);
    PhysicalField v = sampled(g, 0, [](double x, double y, double) { return std::cos(x + 2 * y); });
    SpectralField f = to_spectral(v);
    PhysicalField lap = from_spectral(laplacian(f));
    for (std::size_t i = 0; i < lap.comps[0].size(); ++i)
        CHECK(lap.comps[0][i] == doctest::Approx(-5.0 * v.comps[0][i]).epsilon(1e-12));
}

TEST_CASE("derivative commutes with project_cutoff exactly") {
    TorusGrid g(2, 32);
    SpectralField f = random_divfree_field(g, 4, 23u, [](double) { return 1.0; });
    SpectralField a = spectral_derivative(project_cutoff(f, 3), 1);
    SpectralField b = project_cutoff(spectral_derivative(f, 1), 3);
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < g.spectral_size(); ++i)
            CHECK(a.component(c)[i] == b.component(c)[i]);
}

TEST_CASE("galerkin nonlinear term: zero input, Taylor-Green, energy orthogonality") {
    TorusGrid g(2, 32);
    SpectralField zero(g);
    zero.divergence_free = true;
    zero.cutoff_m = 3;
    CHECK(galerkin_nonlinear(zero, 3).max_abs_coeff() == 0.0);

    SpectralField tg = taylor_green(g);
    SpectralField ntg = galerkin_nonlinear(tg, 3);
    CHECK(ntg.max_abs_coeff() < 1e-12); // pure gradient, killed by Leray

    for (unsigned seed = 0; seed < 5; ++seed) {
        SpectralField u = random_divfree_field(g, 3, 100 + seed, [](double) { return 1.0; });
        SpectralField nl = galerkin_nonlinear(u, 3);
        CHECK(nl.divergence_free);
        CHECK(is_band_limited(nl, 3));
        const double u2 = u.norm2();
        CHECK(std::abs(inner(u, nl)) <= 1e-12 * u2 * u2 * u2);
    }
}

TEST_CASE("galerkin nonlinear equals the direct mode-pair convolution oracle") {
    TorusGrid g(2, 16);
    const int m = 2;
    SpectralField u = random_divfree_field(g, m, 42u, [](double) { return 1.0; });

    // two-mode configuration first
    SpectralField two(g);
    two.set_coeff(0, {1, 2, 0}, cplx(0.3, 0.2));
    two.set_coeff(1, {1, 2, 0}, cplx(-0.15, -0.1));
    two.set_coeff(0, {2, -1, 0}, cplx(0.1, -0.4));
    two.set_coeff(1, {2, -1, 0}, cplx(0.2, -0.8));
    two = leray_project(project_cutoff(two, m));

    for (const SpectralField* field : {&two, &u}) {
        SpectralField nl = galerkin_nonlinear(*field, m);
        const int band = 1 << m;
        std::array<int, 3> k{0, 0, 0};
        for (k[0] = -band + 1; k[0] < band; ++k[0]) {
            for (k[1] = -band + 1; k[1] < band; ++k[1]) {
                if (k[0] == 0 && k[1] == 0) continue;
                // assemble -P (i k . w) from the oracle convolution
                cplx div[2];
                for (int l = 0; l < 2; ++l) {
                    div[l] = cplx(0, 1) *
                             (double(k[0]) * convolution_oracle(*field, l, 0, k, m) +
                              double(k[1]) * convolution_oracle(*field, l, 1, k, m));
                }
                const double k2 = squared_norm(k);
                cplx kdot = double(k[0]) * div[0] + double(k[1]) * div[1];
                for (int i = 0; i < 2; ++i) {
                    cplx expect = -(div[i] - (double(k[i]) / k2) * kdot);
                    CHECK(std::abs(nl.coeff(i, k) - expect) < 1e-13);
                }
            }
        }
    }
}

TEST_CASE("galerkin nonlinear rejects non-band-limited input") {
    TorusGrid g(2, 32);
    SpectralField f = random_divfree_field(g, 4, 8u, [](double) { return 1.0; });
    CHECK_THROWS_AS(galerkin_nonlinear(f, 2), std::invalid_argument);
}

TEST_CASE("operations preserve Hermitian symmetry") {
    TorusGrid g(2, 32);
    SpectralField u = random_divfree_field(g, 3, 55u, [](double) { return 1.0; });
    CHECK(hermitian_residue(u) < 1e-12);
    CHECK(hermitian_residue(leray_project(u)) < 1e-12);
    CHECK(hermitian_residue(project_cutoff(u, 2)) < 1e-12);
    CHECK(hermitian_residue(spectral_derivative(u, 0)) < 1e-11);
    CHECK(hermitian_residue(galerkin_nonlinear(u, 3)) < 1e-11);
}

TEST_CASE("taylor-green is divergence-free with energy 1/4") {
    TorusGrid g(2, 32);
    SpectralField tg = taylor_green(g);
    CHECK(tg.max_divergence() < 1e-15);
    CHECK(tg.energy() == doctest::Approx(0.25).epsilon(1e-14));
    PhysicalField p = from_spectral(tg);
    // spot value: u1(pi/2, 0) = sin(pi/2)cos(0) = 1
    const int n = g.n();
    CHECK(p.comps[0][(n / 4) * n + 0] == doctest::Approx(1.0).epsilon(1e-13));
}
