#include "perfhom/kernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "perfhom/errors.hpp"

namespace perfhom {
namespace {

double profile_value(Profile p, double r) {
    if (r >= 1.0) return 0.0;
    switch (p) {
        case Profile::indicator: return 1.0;
        case Profile::tent: return 1.0 - r;
        case Profile::bump: {
            const double s = 1.0 - r;
            return s * s * s * s * (4.0 * r + 1.0);
        }
    }
    return 0.0;
}

double beta(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

// int_0^1 profile(r) r^k dr, closed form.
double radial_moment(Profile p, int k) {
    const double kk = k;
    switch (p) {
        case Profile::indicator: return 1.0 / (kk + 1.0);
        case Profile::tent: return 1.0 / ((kk + 1.0) * (kk + 2.0));
        case Profile::bump: return 4.0 * beta(kk + 2.0, 5.0) + beta(kk + 1.0, 5.0);
    }
    return 0.0;
}

// Normalisation so that the unrescaled profile has unit mass.
double profile_normalisation(Profile p, int dim) {
    return 1.0 / (unit_sphere_area(dim) * radial_moment(p, dim - 1));
}

double radial_integral(const KernelSpec& k, int power) {
    auto integrand = [&](double r) { return k.radial(r) * std::pow(r, power); };
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, k.support_radius(), 15, 1e-14, &error);
    return unit_sphere_area(k.dim) * value;
}

}  // namespace

std::string_view to_string(Profile p) {
    switch (p) {
        case Profile::indicator: return "indicator";
        case Profile::tent: return "tent";
        case Profile::bump: return "bump";
    }
    return "?";
}

std::string_view to_string(RescaleMode m) { return m == RescaleMode::mass1 ? "mass1" : "second-moment"; }

Profile parse_profile(std::string_view name) {
    if (name == "indicator") return Profile::indicator;
    if (name == "tent") return Profile::tent;
    if (name == "bump" || name == "wendland") return Profile::bump;
    throw validation_error("unknown kernel profile '" + std::string(name) + "'");
}

RescaleMode parse_rescale_mode(std::string_view name) {
    if (name == "mass1") return RescaleMode::mass1;
    if (name == "second-moment" || name == "second_moment") return RescaleMode::second_moment;
    throw validation_error("unknown rescale mode '" + std::string(name) + "'");
}

double unit_sphere_area(int dim) {
    const double n = dim;
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

double unit_ball_volume(int dim) {
    const double n = dim;
    return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

double KernelSpec::radial(double r) const {
    const double base = profile_normalisation(profile, dim) * profile_value(profile, r / delta);
    double scale = std::pow(delta, -dim);
    if (mode == RescaleMode::second_moment) scale *= c_constant() / (delta * delta);
    return amplitude * scale * base;
}

double KernelSpec::operator()(const Point& z) const {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += z[a] * z[a];
    return radial(std::sqrt(r2));
}

double KernelSpec::expected_mass() const {
    return mode == RescaleMode::mass1 ? 1.0 : c_constant() / (delta * delta);
}

double KernelSpec::c_constant() const {
    return 2.0 * dim * radial_moment(profile, dim - 1) / radial_moment(profile, dim + 1);
}

KernelSpec make_kernel(int dim, Profile profile) {
    if (dim < 1 || dim > kMaxDim) throw validation_error("kernel dimension must be in [1, 3]");
    KernelSpec k;
    k.dim = dim;
    k.profile = profile;
    return k;
}

bool KernelReport::passed() const {
    for (const auto& p : properties) {
        if (!p.informational && !p.passed) return false;
    }
    return true;
}

std::string KernelReport::failures() const {
    std::string out;
    for (const auto& p : properties) {
        if (p.informational || p.passed) continue;
        if (!out.empty()) out += ", ";
        out += p.name + " (" + p.detail + ")";
    }
    return out;
}

double mass_by_quadrature(const KernelSpec& k) { return radial_integral(k, k.dim - 1); }

double second_moment_by_quadrature(const KernelSpec& k) { return radial_integral(k, k.dim + 1) / k.dim; }

KernelReport validate_kernel(const KernelSpec& k) {
    KernelReport report;
    const double radius = k.support_radius();

    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> coord(-1.5 * radius, 1.5 * radius);
    bool nonnegative = true;
    bool symmetric = true;
    for (int s = 0; s < 4096; ++s) {
        Point z{};
        for (int a = 0; a < k.dim; ++a) z[a] = coord(rng);
        Point mz{};
        for (int a = 0; a < k.dim; ++a) mz[a] = -z[a];
        const double v = k(z);
        if (!(v >= 0.0) || !std::isfinite(v)) nonnegative = false;
        if (v != k(mz)) symmetric = false;
    }
    report.properties.push_back({"nonnegative", nonnegative, false, "sampled on 4096 points"});
    report.properties.push_back({"symmetric", symmetric, false, "J(z) == J(-z) on samples"});

    const double mass = mass_by_quadrature(k);
    const double expected = k.expected_mass();
    const double rel = std::abs(mass - expected) / expected;
    std::ostringstream detail;
    detail.precision(12);
    detail << "quadrature mass " << mass << ", expected " << expected;
    report.properties.push_back({"normalized_mass", rel < 1e-8, false, detail.str()});

    const double centre = k(Point{});
    report.properties.push_back({"positive_at_origin", centre > 0.0, false, "J(0) = " + std::to_string(centre)});

    // J must be continuous for the hypothesis used by the theory; the indicator is not.
    const double edge = k.radial(radius * (1.0 - 1e-9));
    const bool continuous = std::abs(edge) <= 1e-6 * std::max(1.0, centre);
    report.properties.push_back({"continuous", continuous, true,
                                 continuous ? "vanishes at the support boundary"
                                            : "jumps at the support boundary"});
    return report;
}

void require_valid_kernel(const KernelSpec& k) {
    const auto report = validate_kernel(k);
    if (!report.passed()) throw validation_error("kernel validation failed: " + report.failures());
}

double second_moment_constant(const KernelSpec& k) {
    KernelSpec base = k;
    base.delta = 1.0;
    base.mode = RescaleMode::mass1;
    const double closed = base.c_constant();
    const double numeric = 1.0 / (0.5 * second_moment_by_quadrature(base) / base.amplitude);
    if (std::abs(closed - numeric) > 1e-8 * closed) {
        throw validation_error("second-moment constant: closed form " + std::to_string(closed)
                               + " disagrees with quadrature " + std::to_string(numeric));
    }
    return closed;
}

KernelSpec rescale(const KernelSpec& k, double delta, RescaleMode mode) {
    if (!(delta > 0.0) || delta > 1.0) throw validation_error("rescale factor must lie in (0, 1]");
    KernelSpec out = k;
    out.delta = k.delta * delta;
    out.mode = mode;
    return out;
}

double SampledKernel::mass() const {
    double sum = 0.0;
    for (double w : weights) sum += w;
    return sum * std::pow(spacing, dim);
}

double SampledKernel::weight_at(const Index& offset) const {
    const long width = 2 * reach + 1;
    std::size_t linear = 0;
    for (int a = 0; a < dim; ++a) {
        if (offset[a] < -reach || offset[a] > reach) return 0.0;
        linear = linear * static_cast<std::size_t>(width) + static_cast<std::size_t>(offset[a] + reach);
    }
    return table[linear];
}

SampledKernel sample(const KernelSpec& k, double h, MassMode mode) {
    const double radius = k.support_radius();
    if (!(h > 0.0) || h >= radius) {
        throw validation_error("kernel unresolved: spacing " + std::to_string(h) + " is not below support radius "
                               + std::to_string(radius));
    }
    SampledKernel s;
    s.dim = k.dim;
    s.spacing = h;
    s.support_radius = radius;
    s.mode = mode;
    s.reach = static_cast<long>(std::floor(radius / h));
    const long width = 2 * s.reach + 1;
    long table_size = 1;
    for (int a = 0; a < k.dim; ++a) table_size *= width;
    s.table.assign(static_cast<std::size_t>(table_size), 0.0);

    const double r2max = (radius / h) * (radius / h);
    for (long t = 0; t < table_size; ++t) {
        Index off{};
        long rem = t;
        long norm2 = 0;
        for (int a = k.dim - 1; a >= 0; --a) {
            off[a] = rem % width - s.reach;
            rem /= width;
            norm2 += off[a] * off[a];
        }
        if (static_cast<double>(norm2) >= r2max) continue;
        // Depends on |offset| only, so w(o) == w(-o) bit for bit.
        const double w = k.radial(h * std::sqrt(static_cast<double>(norm2)));
        if (w == 0.0) continue;
        s.offsets.push_back(off);
        s.weights.push_back(w);
    }
    if (mode == MassMode::renormalized) {
        const double scale = k.expected_mass() / s.mass();
        for (double& w : s.weights) w *= scale;
    }
    for (std::size_t i = 0; i < s.offsets.size(); ++i) {
        std::size_t linear = 0;
        for (int a = 0; a < k.dim; ++a) {
            linear = linear * static_cast<std::size_t>(width) + static_cast<std::size_t>(s.offsets[i][a] + s.reach);
        }
        s.table[linear] = s.weights[i];
    }
    return s;
}

}  // namespace perfhom
