#pragma once

#include <memory>
#include <span>

#include "perfhom/grid.hpp"
#include "perfhom/kernel.hpp"

namespace perfhom {

enum class ConvolutionMethod { automatic, direct, fft };

/// Discrete convolution with a sampled kernel on a fixed grid:
///
///     out[x] = h^N * sum_o w(o) in[x + o],
///
/// with `in` taken as zero off the grid. The FFT path zero-pads every axis by
/// twice the kernel reach, so both paths compute the same linear convolution.
/// apply() allocates its own work buffers and may be called concurrently.
class Convolver {
public:
    Convolver(const Grid& grid, const SampledKernel& kernel, ConvolutionMethod method = ConvolutionMethod::automatic);
    ~Convolver();
    Convolver(Convolver&&) noexcept;
    Convolver& operator=(Convolver&&) noexcept;

    void apply(std::span<const double> in, std::span<double> out) const;
    ScalarField apply(const ScalarField& in) const;

    /// The method actually used (never `automatic`).
    ConvolutionMethod method() const noexcept;
    const Grid& grid() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around Convolver.
ScalarField convolve(const ScalarField& in, const SampledKernel& kernel,
                     ConvolutionMethod method = ConvolutionMethod::automatic);

}  // namespace perfhom
