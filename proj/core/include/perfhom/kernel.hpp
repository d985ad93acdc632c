#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "perfhom/grid.hpp"

namespace perfhom {

/// Radial profiles on the unit ball, each normalised to unit mass.
enum class Profile {
    indicator,  ///< constant on the open unit ball (discontinuous at |z| = 1)
    tent,       ///< proportional to 1 - |z|
    bump,       ///< Wendland C^2 function (1 - r)^4 (4 r + 1)
};

enum class RescaleMode {
    mass1,          ///< J_d(z) = d^-N J(z / d), unit mass
    second_moment,  ///< J_d(z) = C d^-(N+2) J(z / d), localises to the Laplacian
};

std::string_view to_string(Profile p);
std::string_view to_string(RescaleMode m);
Profile parse_profile(std::string_view name);
RescaleMode parse_rescale_mode(std::string_view name);

/// Radially symmetric, compactly supported convolution kernel.
struct KernelSpec {
    int dim = 2;
    Profile profile = Profile::indicator;
    /// Accumulated rescale factor; 1 means the unrescaled profile.
    double delta = 1.0;
    RescaleMode mode = RescaleMode::mass1;
    /// Extra multiplicative factor; 1 for every built-in kernel.
    double amplitude = 1.0;

    double support_radius() const { return delta; }
    /// Kernel value at offset z (entries beyond dim ignored).
    double operator()(const Point& z) const;
    /// Kernel value as a function of |z|.
    double radial(double r) const;
    /// Analytic integral of the kernel over R^N.
    double expected_mass() const;
    /// The constant C = (1/2 int J(x) x_1^2 dx)^-1 of the unrescaled profile.
    double c_constant() const;
};

KernelSpec make_kernel(int dim, Profile profile);

/// Surface area of the unit sphere in R^N (2 for N = 1).
double unit_sphere_area(int dim);
/// Volume of the unit ball in R^N.
double unit_ball_volume(int dim);

struct KernelProperty {
    std::string name;
    bool passed = false;
    /// Informational properties are reported but never fail validation.
    bool informational = false;
    std::string detail;
};

struct KernelReport {
    std::vector<KernelProperty> properties;
    bool passed() const;
    std::string failures() const;
};

/// Checks nonnegativity, symmetry, mass (by radial Gauss-Kronrod quadrature) and
/// J(0) > 0. Continuity is reported as informational only.
KernelReport validate_kernel(const KernelSpec& k);

/// Like validate_kernel but throws validation_error listing the failed properties.
void require_valid_kernel(const KernelSpec& k);

/// C for the unrescaled profile: closed form, cross-checked against quadrature.
double second_moment_constant(const KernelSpec& k);

/// Second moment int J(z) z_1^2 dz of the (possibly rescaled) kernel, by quadrature.
double second_moment_by_quadrature(const KernelSpec& k);
/// Mass int J(z) dz of the (possibly rescaled) kernel, by quadrature.
double mass_by_quadrature(const KernelSpec& k);

KernelSpec rescale(const KernelSpec& k, double delta, RescaleMode mode);

enum class MassMode { raw, renormalized };

/// Kernel sampled at lattice offsets j*h inside its support.
struct SampledKernel {
    int dim = 2;
    double spacing = 0.0;
    double support_radius = 0.0;
    MassMode mode = MassMode::renormalized;
    /// Integer offsets; entries beyond dim are zero.
    std::vector<Index> offsets;
    std::vector<double> weights;
    /// Largest |offset| component, in nodes.
    long reach = 0;
    /// Dense (2 reach + 1)^dim table of weights, zero outside the support.
    std::vector<double> table;

    /// h^N * sum of weights.
    double mass() const;
    double weight_at(const Index& offset) const;
};

/// Midpoint samples of `k` on the lattice of spacing h. Offsets whose sample
/// falls outside the open support get no entry. In renormalized mode the
/// weights are scaled so that the discrete mass equals the analytic mass.
SampledKernel sample(const KernelSpec& k, double h, MassMode mode = MassMode::renormalized);

}  // namespace perfhom
