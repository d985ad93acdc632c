#include "perfhom/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>

#include "perfhom/errors.hpp"

namespace perfhom {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
long fft_friendly(long n) {
    for (long m = n;; ++m) {
        long r = m;
        for (long p : {2L, 3L, 5L, 7L}) {
            while (r % p == 0) r /= p;
        }
        if (r == 1) return m;
    }
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (p == nullptr) throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

}  // namespace

struct Convolver::Impl {
    Grid grid;
    SampledKernel kernel;
    ConvolutionMethod method;

    // direct path
    std::vector<std::ptrdiff_t> linear_offsets;

    // fft path
    std::array<long, kMaxDim> padded{1, 1, 1};
    std::size_t real_size = 0;
    std::size_t complex_size = 0;
    std::vector<std::complex<double>> kernel_hat;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    Impl(const Grid& g, const SampledKernel& k, ConvolutionMethod m) : grid(g), kernel(k), method(m) {}

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }

    void setup_direct() {
        const auto strides = grid.strides();
        linear_offsets.reserve(kernel.offsets.size());
        for (const auto& o : kernel.offsets) {
            std::ptrdiff_t d = 0;
            for (int a = 0; a < grid.dim(); ++a) d += o[a] * strides[a];
            linear_offsets.push_back(d);
        }
    }

    void setup_fft() {
        const int dim = grid.dim();
        int n[kMaxDim];
        real_size = 1;
        for (int a = 0; a < dim; ++a) {
            padded[a] = fft_friendly(grid.extent(a) + 2 * kernel.reach);
            n[a] = static_cast<int>(padded[a]);
            real_size *= static_cast<std::size_t>(padded[a]);
        }
        complex_size = real_size / static_cast<std::size_t>(padded[dim - 1])
                       * static_cast<std::size_t>(padded[dim - 1] / 2 + 1);

        auto real = fftw_buffer<double>(real_size);
        auto spec = fftw_buffer<fftw_complex>(complex_size);
        {
            std::lock_guard lock(planner_mutex());
            forward = fftw_plan_dft_r2c(dim, n, real.get(), spec.get(), FFTW_ESTIMATE);
            backward = fftw_plan_dft_c2r(dim, n, spec.get(), real.get(), FFTW_ESTIMATE);
        }
        if (!forward || !backward) throw error("FFTW planning failed");

        // Kernel wrapped around the origin of the padded box.
        std::fill(real.get(), real.get() + real_size, 0.0);
        for (std::size_t i = 0; i < kernel.offsets.size(); ++i) {
            std::size_t linear = 0;
            for (int a = 0; a < dim; ++a) {
                const long wrapped = (kernel.offsets[i][a] % padded[a] + padded[a]) % padded[a];
                linear = linear * static_cast<std::size_t>(padded[a]) + static_cast<std::size_t>(wrapped);
            }
            real[linear] = kernel.weights[i];
        }
        fftw_execute_dft_r2c(forward, real.get(), spec.get());
        const double scale = grid.cell_volume() / static_cast<double>(real_size);
        kernel_hat.resize(complex_size);
        for (std::size_t i = 0; i < complex_size; ++i) {
            kernel_hat[i] = std::complex<double>(spec[i][0], spec[i][1]) * scale;
        }
    }

    void apply_direct(std::span<const double> in, std::span<double> out) const {
        const int dim = grid.dim();
        const auto& ext = grid.extents();
        const double hn = grid.cell_volume();
        Index idx{};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < linear_offsets.size(); ++k) {
                const auto& o = kernel.offsets[k];
                bool inside = true;
                for (int a = 0; a < dim; ++a) {
                    const long c = idx[a] + o[a];
                    if (c < 0 || c >= ext[a]) {
                        inside = false;
                        break;
                    }
                }
                if (inside) {
                    acc += kernel.weights[k] * in[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + linear_offsets[k])];
                }
            }
            out[i] = hn * acc;
            for (int a = kMaxDim - 1; a >= 0; --a) {
                if (++idx[a] < ext[a]) break;
                idx[a] = 0;
            }
        }
    }

    // Maps grid index <-> padded index (identity placement at the low corner).
    template <class F>
    void for_each_node(F f) const {
        const auto& ext = grid.extents();
        std::size_t i = 0;
        for (long a = 0; a < ext[0]; ++a) {
            for (long b = 0; b < ext[1]; ++b) {
                const std::size_t row = (static_cast<std::size_t>(a) * static_cast<std::size_t>(padded[1])
                                         + static_cast<std::size_t>(b))
                                        * static_cast<std::size_t>(padded[2]);
                for (long c = 0; c < ext[2]; ++c) f(i++, row + static_cast<std::size_t>(c));
            }
        }
    }

    void apply_fft(std::span<const double> in, std::span<double> out) const {
        auto real = fftw_buffer<double>(real_size);
        auto spec = fftw_buffer<fftw_complex>(complex_size);
        std::fill(real.get(), real.get() + real_size, 0.0);
        for_each_node([&](std::size_t i, std::size_t p) { real[p] = in[i]; });
        fftw_execute_dft_r2c(forward, real.get(), spec.get());
        for (std::size_t i = 0; i < complex_size; ++i) {
            const std::complex<double> v = std::complex<double>(spec[i][0], spec[i][1]) * kernel_hat[i];
            spec[i][0] = v.real();
            spec[i][1] = v.imag();
        }
        fftw_execute_dft_c2r(backward, spec.get(), real.get());
        for_each_node([&](std::size_t i, std::size_t p) { out[i] = real[p]; });
    }
};

Convolver::Convolver(const Grid& grid, const SampledKernel& kernel, ConvolutionMethod method) {
    if (kernel.dim != grid.dim()) throw shape_error("kernel and grid dimensions differ");
    if (kernel.spacing != grid.spacing()) throw shape_error("kernel was sampled at a different spacing");
    if (method == ConvolutionMethod::automatic) {
        method = kernel.offsets.size() <= 64 ? ConvolutionMethod::direct : ConvolutionMethod::fft;
    }
    impl_ = std::make_unique<Impl>(grid, kernel, method);
    if (method == ConvolutionMethod::direct) {
        impl_->setup_direct();
    } else {
        impl_->setup_fft();
    }
}

Convolver::~Convolver() = default;
Convolver::Convolver(Convolver&&) noexcept = default;
Convolver& Convolver::operator=(Convolver&&) noexcept = default;

ConvolutionMethod Convolver::method() const noexcept { return impl_->method; }
const Grid& Convolver::grid() const noexcept { return impl_->grid; }

void Convolver::apply(std::span<const double> in, std::span<double> out) const {
    if (in.size() != impl_->grid.size() || out.size() != impl_->grid.size()) {
        throw shape_error("convolution operand size does not match grid");
    }
    if (impl_->method == ConvolutionMethod::direct) {
        impl_->apply_direct(in, out);
    } else {
        impl_->apply_fft(in, out);
    }
}

ScalarField Convolver::apply(const ScalarField& in) const {
    require_same_grid(in.grid(), impl_->grid, "convolution");
    ScalarField out(impl_->grid);
    apply(in.values(), out.values());
    return out;
}

ScalarField convolve(const ScalarField& in, const SampledKernel& kernel, ConvolutionMethod method) {
    return Convolver(in.grid(), kernel, method).apply(in);
}

}  // namespace perfhom
