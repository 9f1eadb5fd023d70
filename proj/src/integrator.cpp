#include "llns/integrator.hpp"

#include "llns/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace llns {

namespace {

bool mode_is_canonical(const std::array<int, 3>& k, int dim) {
    for (int a = 0; a < dim; ++a) {
        if (k[a] > 0) return true;
        if (k[a] < 0) return false;
    }
    return false;
}

std::array<cplx, 3> field_at(const SpectralField& f, const std::array<int, 3>& k) {
    std::array<cplx, 3> v{cplx(0, 0), cplx(0, 0), cplx(0, 0)};
    for (int c = 0; c < f.dim(); ++c) v[c] = f.coeff(c, k);
    return v;
}

// Per-(grid, nu dt) mode tables reused across steps: |k|^2, the Hermitian
// weight, the strict band mask and the viscous decay factor.
struct ModeTables {
    std::vector<double> k2;
    std::vector<double> weight;
    std::vector<unsigned char> in_band;
    std::vector<double> decay;
};

ModeTables build_tables(const TorusGrid& g, int m, double nu_dt) {
    ModeTables t;
    const std::size_t n = g.spectral_size();
    t.k2.resize(n);
    t.weight.resize(n);
    t.in_band.resize(n);
    t.decay.resize(n);
    const int band = 1 << m;
    const int d = g.dim();
    for (std::size_t i = 0; i < n; ++i) {
        auto k = g.wavevector(i);
        t.k2[i] = squared_norm(k);
        t.weight[i] = k[d - 1] > 0 ? 2.0 : 1.0;
        t.in_band[i] = max_norm(k) < band ? 1 : 0;
        t.decay[i] = std::exp(-nu_dt * t.k2[i]);
    }
    return t;
}

struct StepAccum {
    double diss = 0.0;       // sum w (|w|^2 - |e w|^2)
    double drift2 = 0.0;     // sum w |N + f|^2
    double transfer = 0.0;   // sum w Re <u, N>
    double force = 0.0;      // sum w Re <u, f>
    double noise_work = 0.0; // sum w Re <e w, a S>
    double s2 = 0.0;         // sum w |a S|^2
    double energy2 = 0.0;    // sum w |u_new|^2
};

// In-place exponential Euler-Maruyama update. fbase is P pi_Lambda of the
// forcing shape (scaled by tf), S the sampled stochastic forcing (or null).
void advance(SpectralField& u, const ModeTables& tb, double dt, double tf,
             const SpectralField* nonlinear, const SpectralField* fbase, const SpectralField* S,
             double amplitude, StepAccum* acc) {
    const int d = u.dim();
    const std::size_t n = u.grid().spectral_size();
    for (int c = 0; c < d; ++c) {
        cplx* uc = u.component(c);
        const cplx* nc = nonlinear ? nonlinear->component(c) : nullptr;
        const cplx* fc = fbase ? fbase->component(c) : nullptr;
        const cplx* sc = S ? S->component(c) : nullptr;
        for (std::size_t i = 0; i < n; ++i) {
            if (!tb.in_band[i]) continue;
            const double wgt = tb.weight[i];
            cplx drift(0.0, 0.0);
            if (nc) drift += nc[i];
            if (fc) drift += tf * fc[i];
            const cplx w = uc[i] + dt * drift;
            const cplx ew = tb.decay[i] * w;
            cplx unew = ew;
            if (sc) unew += amplitude * sc[i];
            if (acc) {
                acc->diss += wgt * (std::norm(w) - std::norm(ew));
                acc->drift2 += wgt * std::norm(drift);
                if (nc) acc->transfer += wgt * (uc[i].real() * nc[i].real() + uc[i].imag() * nc[i].imag());
                if (fc)
                    acc->force += wgt * tf * (uc[i].real() * fc[i].real() + uc[i].imag() * fc[i].imag());
                if (sc) {
                    const cplx as = amplitude * sc[i];
                    acc->noise_work += wgt * (ew.real() * as.real() + ew.imag() * as.imag());
                    acc->s2 += wgt * std::norm(as);
                }
                acc->energy2 += wgt * std::norm(unew);
            }
            uc[i] = unew;
        }
    }
}

double band_second_moment_sum(int d, int m) {
    double total = 0.0;
    const int K = (1 << m) - 1;
    std::array<int, 3> k{0, 0, 0};
    if (d == 2) {
        for (k[0] = -K; k[0] <= K; ++k[0])
            for (k[1] = -K; k[1] <= K; ++k[1]) total += forcing_mode_second_moment(k, d);
    } else {
        for (k[0] = -K; k[0] <= K; ++k[0])
            for (k[1] = -K; k[1] <= K; ++k[1])
                for (k[2] = -K; k[2] <= K; ++k[2]) total += forcing_mode_second_moment(k, d);
    }
    return total;
}

} // namespace

void ForcingSpec::validate(int dim) const {
    for (const auto& mode : modes) {
        if (mode.k[0] == 0 && mode.k[1] == 0 && mode.k[2] == 0)
            throw std::invalid_argument("forcing: k = 0 is not allowed (no bulk acceleration)");
        if (dim == 2 && mode.k[2] != 0)
            throw std::invalid_argument("forcing: third wavevector component in a 2D run");
        if (!mode_is_canonical(mode.k, dim))
            throw std::invalid_argument("forcing: list only canonical modes (first nonzero k_i > 0)");
    }
}

SpectralField ForcingSpec::field(TorusGrid grid, double t) const {
    SpectralField f(grid);
    const double tf = time_factor(t);
    for (const auto& mode : modes)
        for (int c = 0; c < grid.dim(); ++c) f.set_coeff(c, mode.k, tf * mode.amplitude[c]);
    return f;
}

double kappa_exponent(int d) { return 3.0 * (d + 2) / 8.0; }

SolverParams make_params(double nu, double alpha, int d, TorusGrid grid, double dt, double t_end,
                         ForcingSpec forcing) {
    if (nu <= 0.0) throw std::invalid_argument("make_params: nu must be positive");
    if (alpha < 0.75 || alpha > 1.0)
        throw std::invalid_argument("make_params: alpha must lie in [3/4, 1]");
    if (grid.dim() != d) throw std::invalid_argument("make_params: grid dimension mismatch");
    SolverParams p;
    p.d = d;
    p.grid = grid;
    p.nu = nu;
    p.alpha = alpha;
    p.m = static_cast<int>(std::lround(alpha * std::log2(1.0 / nu)));
    if (p.m < 0) p.m = 0;
    if ((1 << p.m) - 1 > grid.max_k())
        throw std::invalid_argument("make_params: 2^m exceeds the grid band (under-resolved run)");
    p.kappa = kappa_exponent(d);
    p.dt = dt;
    p.t_end = t_end;
    forcing.validate(d);
    p.forcing = std::move(forcing);
    return p;
}

double suggested_dt(const SpectralField& u, int m, double cfl) {
    PhysicalField phys = from_spectral(u);
    double umax = 0.0;
    const std::size_t n = u.grid().physical_size();
    for (std::size_t i = 0; i < n; ++i) {
        double mag2 = 0.0;
        for (int c = 0; c < u.dim(); ++c) mag2 += phys.comps[c][i] * phys.comps[c][i];
        umax = std::max(umax, mag2);
    }
    umax = std::sqrt(umax);
    if (umax == 0.0) return cfl; // nothing advecting
    return cfl / (double(1 << m) * umax);
}

double ito_input_per_step(const SolverParams& p) {
    const double a = p.noise_amplitude();
    if (a == 0.0) return 0.0;
    return 0.5 * a * a * p.dt * band_second_moment_sum(p.d, p.m);
}

SpectralField step(const SpectralField& u, const SolverParams& p, const RngStream& rng) {
    SpectralField next = u;
    const ModeTables tb = build_tables(p.grid, p.m, p.nu * p.dt);
    SpectralField nonlinear;
    if (p.enable_nonlinear) nonlinear = galerkin_nonlinear(u, p.m);
    SpectralField fbase;
    const bool forced = !p.forcing.empty();
    if (forced) fbase = leray_project(project_cutoff(p.forcing.field(p.grid, 0.0), p.m));
    SpectralField S;
    const double a = p.noise_amplitude();
    if (a > 0.0) {
        NoiseIncrement inc = sample_increment(p.d, p.m, p.dt, rng);
        S = stochastic_forcing(inc, 1.0, p.grid);
    }
    advance(next, tb, p.dt, 1.0, p.enable_nonlinear ? &nonlinear : nullptr, forced ? &fbase : nullptr,
            a > 0.0 ? &S : nullptr, a, nullptr);
    if (!next.finite()) throw BlowUpError(0, "step: non-finite state (blow-up at the chosen dt)");
    next.divergence_free = true;
    next.cutoff_m = p.m;
    return next;
}

const ModeTap* TrajectoryStore::tap(const std::array<int, 3>& k) const {
    for (const auto& t : taps)
        if (t.k == k) return &t;
    return nullptr;
}

TrajectoryStore run(const SpectralField& u0, const SolverParams& p, const RngStream& rng,
                    const RunOptions& opts) {
    if (p.dt <= 0.0) throw std::invalid_argument("run: dt must be positive");
    const auto n_steps = static_cast<std::size_t>(std::llround(p.t_end / p.dt));
    if (n_steps == 0) throw std::invalid_argument("run: t_end shorter than one step");

    TrajectoryStore traj;
    traj.params = p;
    traj.seed = rng.seed;
    traj.member = rng.member;

    SpectralField u = leray_project(project_cutoff(u0, p.m));
    u.zero_mean();

    const ModeTables tb = build_tables(p.grid, p.m, p.nu * p.dt);
    const double a = p.noise_amplitude();
    const double ito_model = ito_input_per_step(p);
    const bool forced = !p.forcing.empty();
    SpectralField fbase;
    if (forced) fbase = leray_project(project_cutoff(p.forcing.field(p.grid, 0.0), p.m)); // unit shape
    SpectralField fraw_proj; // P f shape, untruncated, for the residual tap
    if (forced && !opts.tap_modes.empty()) fraw_proj = leray_project(p.forcing.field(p.grid, 0.0));

    const bool tapping = !opts.tap_modes.empty();
    traj.taps.resize(opts.tap_modes.size());
    struct TapSums {
        std::array<cplx, 3> visc{}, nonlin{}, force{}, noise{};
    };
    std::vector<TapSums> sums(opts.tap_modes.size());
    for (std::size_t q = 0; q < opts.tap_modes.size(); ++q) traj.taps[q].k = opts.tap_modes[q];

    auto record_state = [&](double t) {
        traj.times.push_back(t);
        if (opts.store_snapshots) {
            SpectralField snap = u;
            snap.cutoff_m = p.m;
            snap.divergence_free = true;
            traj.snapshots.push_back(std::move(snap));
        }
        for (std::size_t q = 0; q < traj.taps.size(); ++q) {
            ModeTap& tap = traj.taps[q];
            tap.u.push_back(field_at(u, tap.k));
            tap.visc_sum.push_back(sums[q].visc);
            tap.nonlin_sum.push_back(sums[q].nonlin);
            tap.force_sum.push_back(sums[q].force);
            tap.noise_sum.push_back(sums[q].noise);
        }
    };
    auto record_integrand = [&](const std::vector<std::array<cplx, 3>>& full_div, double tf) {
        for (std::size_t q = 0; q < traj.taps.size(); ++q) {
            traj.taps[q].conv_full.push_back(full_div[q]);
            std::array<cplx, 3> pf{cplx(0, 0), cplx(0, 0), cplx(0, 0)};
            if (forced) {
                auto v = field_at(fraw_proj, traj.taps[q].k);
                for (int c = 0; c < p.d; ++c) pf[c] = tf * v[c];
            }
            traj.taps[q].force_proj.push_back(pf);
        }
    };

    traj.initial_energy = u.energy();
    NoiseIncrement inc;
    SpectralField S;
    std::vector<std::array<cplx, 3>> full_div;

    for (std::size_t n = 0; n < n_steps; ++n) {
        const double t = double(n) * p.dt;
        const bool sample_now = n % opts.sample_every == 0;
        if (sample_now) record_state(t);

        SpectralField nonlinear;
        if (tapping)
            nonlinear = galerkin_nonlinear_tapped(u, p.m, opts.tap_modes, full_div);
        else if (p.enable_nonlinear)
            nonlinear = galerkin_nonlinear(u, p.m);
        if (sample_now && tapping) record_integrand(full_div, p.forcing.time_factor(t));

        const double tf = forced ? p.forcing.time_factor(t) : 0.0;
        if (a > 0.0) {
            sample_increment(p.d, p.m, p.dt, rng.at_step(n), inc);
            S = stochastic_forcing(inc, 1.0, p.grid);
        }

        if (tapping) {
            // Exact per-mode increments: the drift split reuses w - u so the
            // four sums reproduce u(t) - u(0) to rounding.
            for (std::size_t q = 0; q < traj.taps.size(); ++q) {
                const auto& k = opts.tap_modes[q];
                const auto uk = field_at(u, k);
                const auto nk = p.enable_nonlinear ? field_at(nonlinear, k)
                                                   : std::array<cplx, 3>{cplx(0, 0), cplx(0, 0), cplx(0, 0)};
                const auto fk = forced ? field_at(fbase, k)
                                       : std::array<cplx, 3>{cplx(0, 0), cplx(0, 0), cplx(0, 0)};
                const double e = std::exp(-p.nu * squared_norm(k) * p.dt);
                for (int c = 0; c < p.d; ++c) {
                    const cplx drift = nk[c] + tf * fk[c];
                    const cplx w = uk[c] + p.dt * drift;
                    const cplx force_inc = p.dt * (tf * fk[c]);
                    sums[q].visc[c] += e * w - w;
                    sums[q].force[c] += force_inc;
                    sums[q].nonlin[c] += (w - uk[c]) - force_inc;
                    if (a > 0.0) sums[q].noise[c] += a * field_at(S, k)[c];
                }
            }
        }

        StepAccum acc;
        advance(u, tb, p.dt, tf, p.enable_nonlinear ? &nonlinear : nullptr, forced ? &fbase : nullptr,
                a > 0.0 ? &S : nullptr, a, &acc);

        if (!std::isfinite(acc.energy2))
            throw BlowUpError(n, "run: blow-up of the truncated system at step " + std::to_string(n));

        AuditSample row;
        row.t = t + p.dt;
        row.energy = 0.5 * acc.energy2;
        row.dissipation = 0.5 * acc.diss;
        row.force_work = p.dt * acc.force;
        row.quad_remainder = 0.5 * p.dt * p.dt * acc.drift2;
        row.nonlinear_transfer = p.dt * acc.transfer;
        row.noise_work = acc.noise_work;
        row.ito_realized = 0.5 * acc.s2;
        row.ito_model = ito_model;
        row.mean = u.mean();
        traj.audit.push_back(row);
    }

    // Final sample: state plus one extra convolution for the integrand row.
    record_state(double(n_steps) * p.dt);
    if (tapping) {
        galerkin_nonlinear_tapped(u, p.m, opts.tap_modes, full_div);
        record_integrand(full_div, p.forcing.time_factor(double(n_steps) * p.dt));
    }
    return traj;
}

EnergyAuditReport energy_audit(const TrajectoryStore& traj, const SolverParams& p) {
    (void)p;
    if (traj.audit.empty()) throw std::invalid_argument("energy_audit: no audit series present");
    EnergyAuditReport rep;
    double prev = traj.initial_energy;
    for (const auto& row : traj.audit) {
        const double modeled = -row.dissipation + row.force_work + row.quad_remainder + row.ito_model;
        const double r = (row.energy - prev) - modeled;
        rep.residuals.push_back(r);
        rep.max_abs = std::max(rep.max_abs, std::abs(r));
        if (row.energy > 0.0) rep.max_rel = std::max(rep.max_rel, std::abs(r) / row.energy);
        prev = row.energy;
    }
    double s = 0.0;
    for (double r : rep.residuals) s += r;
    rep.mean = s / double(rep.residuals.size());
    double v = 0.0;
    for (double r : rep.residuals) v += (r - rep.mean) * (r - rep.mean);
    rep.stddev = rep.residuals.size() > 1 ? std::sqrt(v / double(rep.residuals.size() - 1)) : 0.0;
    return rep;
}

} // namespace llns
