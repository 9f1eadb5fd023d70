#include "llns/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace llns {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct Transforms::Impl {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    fftw_plan c2c_back = nullptr;
    mutable std::vector<std::complex<double>> scratch; // c2r clobbers input
    mutable std::mutex scratch_mutex;
};

Transforms::Transforms(TorusGrid grid) : grid_(grid), impl_(new Impl) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int n = grid_.n();
    int dims[3] = {n, n, n};
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;

    std::vector<double> rbuf(grid_.physical_size());
    std::vector<std::complex<double>> cbuf(grid_.spectral_size());
    std::vector<std::complex<double>> fbuf(grid_.physical_size());

    impl_->r2c = fftw_plan_dft_r2c(grid_.dim(), dims, rbuf.data(),
                                   reinterpret_cast<fftw_complex*>(cbuf.data()), flags);
    impl_->c2r = fftw_plan_dft_c2r(grid_.dim(), dims, reinterpret_cast<fftw_complex*>(cbuf.data()),
                                   rbuf.data(), flags);
    impl_->c2c_back = fftw_plan_dft(grid_.dim(), dims, reinterpret_cast<fftw_complex*>(fbuf.data()),
                                    reinterpret_cast<fftw_complex*>(fbuf.data()), FFTW_BACKWARD, flags);
    impl_->scratch.resize(grid_.spectral_size());
}

Transforms::~Transforms() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (impl_->r2c) fftw_destroy_plan(impl_->r2c);
    if (impl_->c2r) fftw_destroy_plan(impl_->c2r);
    if (impl_->c2c_back) fftw_destroy_plan(impl_->c2c_back);
}

void Transforms::forward(const double* in, std::complex<double>* out) const {
    fftw_execute_dft_r2c(impl_->r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
    const double inv_n = 1.0 / static_cast<double>(grid_.physical_size());
    const std::size_t m = grid_.spectral_size();
    for (std::size_t i = 0; i < m; ++i) out[i] *= inv_n;
}

void Transforms::backward(const std::complex<double>* in, double* out) const {
    std::lock_guard<std::mutex> lock(impl_->scratch_mutex);
    impl_->scratch.assign(in, in + grid_.spectral_size());
    fftw_execute_dft_c2r(impl_->c2r, reinterpret_cast<fftw_complex*>(impl_->scratch.data()), out);
}

void Transforms::backward_c2c(const std::complex<double>* in, std::complex<double>* out) const {
    if (in != out) std::copy(in, in + grid_.physical_size(), out);
    fftw_execute_dft(impl_->c2c_back, reinterpret_cast<fftw_complex*>(out),
                     reinterpret_cast<fftw_complex*>(out));
}

const Transforms& Transforms::get(TorusGrid grid) {
    static std::mutex cache_mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<Transforms>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto key = std::make_pair(grid.dim(), grid.n());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::unique_ptr<Transforms>(new Transforms(grid))).first;
    return *it->second;
}

} // namespace llns
