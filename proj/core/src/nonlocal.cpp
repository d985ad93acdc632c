#include "perfhom/nonlocal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "linear_solver.hpp"
#include "perfhom/errors.hpp"

namespace perfhom {
namespace {

void require_margin(const DomainMask& mask, const SampledKernel& kernel) {
    const Grid& g = mask.grid();
    Index lo{}, hi{};
    for (int a = 0; a < g.dim(); ++a) {
        lo[a] = std::numeric_limits<long>::max();
        hi[a] = std::numeric_limits<long>::min();
    }
    bool any = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!mask.in_omega(i)) continue;
        any = true;
        const Index idx = g.unravel(i);
        for (int a = 0; a < g.dim(); ++a) {
            lo[a] = std::min(lo[a], idx[a]);
            hi[a] = std::max(hi[a], idx[a]);
        }
    }
    if (!any) throw validation_error("mask has no Omega nodes");
    for (int a = 0; a < g.dim(); ++a) {
        if (lo[a] - kernel.reach < 0 || hi[a] + kernel.reach >= g.extent(a)) {
            throw validation_error("kernel support (reach " + std::to_string(kernel.reach)
                                   + " nodes) exceeds the grid margin around Omega on axis " + std::to_string(a));
        }
    }
}

double centre_weight(const SampledKernel& k) { return k.weight_at(Index{}); }

// Felzenszwalb-Huttenlocher lower envelope of parabolas: squared distance
// transform of one line of samples in place.
void distance_transform_1d(std::vector<double>& f, std::vector<double>& d, std::vector<long>& v,
                           std::vector<double>& z) {
    const long n = static_cast<long>(f.size());
    const double inf = std::numeric_limits<double>::infinity();
    long k = -1;
    for (long q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        double s = 0.0;
        while (true) {
            const long p = v[k];
            s = ((f[q] + static_cast<double>(q * q)) - (f[p] + static_cast<double>(p * p))) / (2.0 * static_cast<double>(q - p));
            if (s <= z[k] && k > 0) {
                --k;
            } else {
                break;
            }
        }
        if (s <= z[k]) {
            v[k] = q;
            z[k] = -inf;
        } else {
            ++k;
            v[k] = q;
            z[k] = s;
        }
        z[k + 1] = inf;
    }
    if (k < 0) return;
    long j = 0;
    for (long q = 0; q < n; ++q) {
        while (z[j + 1] < static_cast<double>(q)) ++j;
        const double diff = static_cast<double>(q - v[j]);
        d[q] = diff * diff + f[v[j]];
    }
    f.swap(d);
}

}  // namespace

std::string_view to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::dirichlet_holes ? "dirichlet" : "neumann";
}

BoundaryCondition parse_boundary_condition(std::string_view name) {
    if (name == "dirichlet") return BoundaryCondition::dirichlet_holes;
    if (name == "neumann") return BoundaryCondition::neumann_holes;
    throw validation_error("unknown boundary condition '" + std::string(name) + "'");
}

NonlocalOperator::NonlocalOperator(DomainMask mask, SampledKernel kernel, BoundaryCondition bc,
                                   ConvolutionMethod method)
    : mask_(std::move(mask))
    , kernel_(std::move(kernel))
    , bc_(bc)
    , convolver_(mask_.grid(), kernel_, method)
    , mass_(mask_.grid()) {
    require_margin(mask_, kernel_);
    const Grid& g = mask_.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (is_unknown(i)) unknowns_.push_back(i);
    }
    ScalarField integration(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        integration[i] = (bc_ == BoundaryCondition::dirichlet_holes || mask_[i] != Label::hole) ? 1.0 : 0.0;
    }
    mass_ = convolver_.apply(integration);
}

ScalarField NonlocalOperator::apply(const ScalarField& u) const {
    require_same_grid(u.grid(), grid(), "NonlocalOperator::apply");
    std::vector<double> x = compress(u);
    std::vector<double> y(x.size());
    apply_compressed(x, y);
    for (double& v : y) v = -v;
    return expand(y);
}

void NonlocalOperator::apply_compressed(std::span<const double> x, std::span<double> y) const {
    ScalarField full = expand(x);
    ScalarField conv(grid());
    convolver_.apply(full.values(), conv.values());
    for (std::size_t k = 0; k < unknowns_.size(); ++k) {
        const std::size_t i = unknowns_[k];
        y[k] = mass_[i] * x[k] - conv[i];
    }
}

std::vector<double> NonlocalOperator::compressed_diagonal() const {
    const double self = grid().cell_volume() * centre_weight(kernel_);
    std::vector<double> d(unknowns_.size());
    for (std::size_t k = 0; k < unknowns_.size(); ++k) d[k] = mass_[unknowns_[k]] - self;
    return d;
}

std::vector<double> NonlocalOperator::compress(const ScalarField& f) const {
    std::vector<double> x(unknowns_.size());
    for (std::size_t k = 0; k < unknowns_.size(); ++k) x[k] = f[unknowns_[k]];
    return x;
}

ScalarField NonlocalOperator::expand(std::span<const double> x) const {
    ScalarField f(grid());
    for (std::size_t k = 0; k < unknowns_.size(); ++k) f[unknowns_[k]] = x[k];
    return f;
}

SolveResult solve(const NonlocalOperator& op, const ScalarField& f, const SolveOptions& options) {
    require_same_grid(f.grid(), op.grid(), "solve");
    if (!f.all_finite()) throw validation_error("right-hand side has non-finite values");
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!op.mask().in_omega(i) && f[i] != 0.0) {
            throw validation_error("right-hand side is not supported in Omega");
        }
    }
    const std::size_t n = op.unknowns().size();
    if (n == 0) throw validation_error("no Omega^eps nodes to solve on");
    std::vector<double> b = op.compress(f);
    for (double& v : b) v = -v;
    std::vector<double> x(n, 0.0);
    const auto diag = op.compressed_diagonal();
    const std::size_t max_it = options.max_iterations
                                   ? options.max_iterations
                                   : static_cast<std::size_t>(20.0 * std::sqrt(static_cast<double>(n))) + 200;
    const auto res = detail::conjugate_gradient(
        [&](std::span<const double> in, std::span<double> out) { op.apply_compressed(in, out); }, diag, b, x,
        options.tol, max_it);
    if (!res.converged) throw solver_error("nonlocal solve did not converge", res.residual, res.iterations);
    return SolveResult{op.expand(x), res.iterations, res.residual};
}

SpectralResult first_eigenvalue(const NonlocalOperator& op, const SpectralOptions& options) {
    const std::size_t n = op.unknowns().size();
    if (n == 0) throw validation_error("no Omega^eps nodes for the eigenproblem");
    const std::size_t m = std::max<std::size_t>(1, std::min(options.basis_size, n));
    auto apply = [&](std::span<const double> in, std::span<double> out) { op.apply_compressed(in, out); };

    double scale = 0.0;
    for (double d : op.compressed_diagonal()) scale = std::max(scale, std::abs(d));
    scale = std::max(scale, std::numeric_limits<double>::min());

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss;
    std::vector<double> start(n);
    for (double& s : start) s = gauss(rng);

    std::vector<std::vector<double>> basis(m + 1, std::vector<double>(n));
    std::vector<double> w(n), ritz(n), resid(n);
    SpectralResult result{0.0, ScalarField(op.grid())};
    result.seed = options.seed;
    double theta = 0.0;
    double rnorm = std::numeric_limits<double>::infinity();

    for (std::size_t restart = 0; restart < options.max_restarts; ++restart) {
        const double s0 = detail::norm(start);
        for (std::size_t i = 0; i < n; ++i) basis[0][i] = start[i] / s0;
        std::vector<double> alpha, beta;
        std::size_t k = 0;
        for (; k < m; ++k) {
            apply(basis[k], w);
            ++result.iterations;
            alpha.push_back(detail::dot(basis[k], w));
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j <= k; ++j) {
                    const double c = detail::dot(basis[j], w);
                    for (std::size_t i = 0; i < n; ++i) w[i] -= c * basis[j][i];
                }
            }
            const double b = detail::norm(w);
            if (k + 1 == m || b <= 1e-13 * scale) {
                ++k;
                break;
            }
            beta.push_back(b);
            for (std::size_t i = 0; i < n; ++i) basis[k + 1][i] = w[i] / b;
        }

        Eigen::VectorXd diag(static_cast<Eigen::Index>(k));
        Eigen::VectorXd sub(static_cast<Eigen::Index>(k > 0 ? k - 1 : 0));
        for (std::size_t j = 0; j < k; ++j) diag(static_cast<Eigen::Index>(j)) = alpha[j];
        for (std::size_t j = 0; j + 1 < k; ++j) sub(static_cast<Eigen::Index>(j)) = beta[j];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        theta = tri.eigenvalues()(0);
        const Eigen::VectorXd s = tri.eigenvectors().col(0);

        std::fill(ritz.begin(), ritz.end(), 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            const double c = s(static_cast<Eigen::Index>(j));
            for (std::size_t i = 0; i < n; ++i) ritz[i] += c * basis[j][i];
        }
        const double rn = detail::norm(ritz);
        for (double& v : ritz) v /= rn;
        apply(ritz, resid);
        ++result.iterations;
        theta = detail::dot(ritz, resid);
        for (std::size_t i = 0; i < n; ++i) resid[i] -= theta * ritz[i];
        rnorm = detail::norm(resid);
        if (rnorm <= options.tol) break;
        start = ritz;
    }
    if (!(rnorm <= options.tol)) {
        throw solver_error("Lanczos iteration did not reach the eigen-residual tolerance", rnorm, result.iterations);
    }

    result.eigenvalue = std::max(theta, 0.0);
    result.residual = rnorm;
    result.singular = theta <= 1e-10 * scale;
    const double to_l2 = 1.0 / std::sqrt(op.grid().cell_volume());
    for (double& v : ritz) v *= to_l2;
    result.eigenvector = op.expand(ritz);
    return result;
}

ScalarField distance_to_label(const DomainMask& mask, Label target) {
    const Grid& g = mask.grid();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> sq(g.size());
    bool any = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        sq[i] = mask[i] == target ? 0.0 : inf;
        any = any || mask[i] == target;
    }
    ScalarField out(g, inf);
    if (!any) return out;

    const auto strides = g.strides();
    for (int axis = 0; axis < g.dim(); ++axis) {
        const long len = g.extent(axis);
        const auto stride = static_cast<std::size_t>(strides[axis]);
        std::vector<double> line(static_cast<std::size_t>(len)), scratch(static_cast<std::size_t>(len));
        std::vector<long> v(static_cast<std::size_t>(len));
        std::vector<double> z(static_cast<std::size_t>(len) + 1);
        for (std::size_t start = 0; start < g.size(); ++start) {
            // Visit each line once, from the node with coordinate 0 on `axis`.
            if (g.unravel(start)[axis] != 0) continue;
            for (long q = 0; q < len; ++q) line[static_cast<std::size_t>(q)] = sq[start + static_cast<std::size_t>(q) * stride];
            distance_transform_1d(line, scratch, v, z);
            for (long q = 0; q < len; ++q) sq[start + static_cast<std::size_t>(q) * stride] = line[static_cast<std::size_t>(q)];
        }
    }
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g.spacing() * std::sqrt(sq[i]);
    return out;
}

CoveringCertificate covering_lower_bound(const DomainMask& mask, const SampledKernel& kernel, double layer_width) {
    if (!(layer_width > 0.0)) throw validation_error("layer width must be positive");
    require_margin(mask, kernel);
    const Grid& g = mask.grid();
    CoveringCertificate cert;
    cert.layer_width = layer_width;

    const ScalarField dist = distance_to_label(mask, Label::exterior);
    std::vector<long> layer_of(g.size(), 0);
    long max_layer = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mask[i] != Label::omega_eps) continue;
        if (!std::isfinite(dist[i])) throw validation_error("covering needs at least one exterior node");
        const long j = std::max(1L, static_cast<long>(std::ceil(dist[i] / layer_width - 1e-12)));
        layer_of[i] = j;
        max_layer = std::max(max_layer, j);
    }

    // Support indicator: counts nodes of the previous layer inside the stencil,
    // so alpha_j = 0 is decided exactly rather than from rounded FFT output.
    SampledKernel support = kernel;
    std::fill(support.weights.begin(), support.weights.end(), 1.0);
    for (std::size_t t = 0; t < support.table.size(); ++t) support.table[t] = support.table[t] != 0.0 ? 1.0 : 0.0;
    const Convolver mass_conv(g, kernel);
    const Convolver count_conv(g, support, mass_conv.method());
    const double hn = g.cell_volume();

    ScalarField previous(g);
    for (std::size_t i = 0; i < g.size(); ++i) previous[i] = mask[i] == Label::exterior ? 1.0 : 0.0;

    double chain = 0.0;
    double chain_sum = 0.0;
    for (long j = 1; j <= max_layer; ++j) {
        std::vector<std::size_t> nodes;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (layer_of[i] == j) nodes.push_back(i);
        }
        if (nodes.empty()) {
            ++cert.empty_layers;
            continue;
        }
        const ScalarField mass = mass_conv.apply(previous);
        const ScalarField count = count_conv.apply(previous);
        double min_mass = std::numeric_limits<double>::infinity();
        bool blind = false;
        for (std::size_t i : nodes) {
            if (count[i] / hn < 0.5) blind = true;
            min_mass = std::min(min_mass, mass[i]);
        }
        const double a = blind ? 0.0 : 0.25 * std::max(min_mass, 0.0);
        cert.layer_sizes.push_back(nodes.size());
        cert.alpha.push_back(a);
        const std::size_t index = cert.alpha.size();
        if (a > 0.0) {
            chain = index == 1 ? 1.0 / a : (1.0 + chain) / a;
            chain_sum += chain;
        } else {
            chain = std::numeric_limits<double>::infinity();
            if (cert.failed_layer == 0) cert.failed_layer = index;
        }
        cert.chain.push_back(chain);

        std::fill(previous.values().begin(), previous.values().end(), 0.0);
        for (std::size_t i : nodes) previous[i] = 1.0;
    }
    cert.layer_count = cert.alpha.size();
    cert.established = cert.layer_count > 0 && cert.failed_layer == 0;
    if (cert.established) {
        cert.lambda_lower = 1.0 / chain_sum;
        cert.eigenvalue_lower = 0.5 * cert.lambda_lower;
        cert.diagnostic = "certificate established over " + std::to_string(cert.layer_count) + " layers";
    } else if (cert.layer_count == 0) {
        cert.diagnostic = "no Omega^eps nodes to cover";
    } else {
        cert.diagnostic = "layer " + std::to_string(cert.failed_layer)
                          + " does not see the previous layer within the kernel support (alpha = 0); "
                            "certificate not established";
    }
    return cert;
}

}  // namespace perfhom
