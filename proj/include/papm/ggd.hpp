#pragma once

#include "papm/grid_map.hpp"
#include "papm/point_set.hpp"

namespace papm {

/// Isotropic generalized-Gaussian parameters. The scatter matrix is fixed to
/// the 2x2 identity, so kernels and costs depend on Euclidean distance only.
struct GgdParams {
    double sigma = 4.0;   // bandwidth, pixels, > 0
    double shape_s = 8.0; // shape, dimensionless, > 0; 2 recovers the Gaussian
};

enum class KernelNorm {
    analytic,              // closed-form constant for the continuous density
    discrete_renormalized, // each kernel sums to 1 over its in-image support
};

struct KernelSpec {
    GgdParams params{};
    KernelNorm normalization = KernelNorm::discrete_renormalized;
    double truncation_tau = 1e-6; // relative cutoff of the peak, in (0, 1)
    int stride = 1;               // output grid downsampling factor
};

/// Unnormalized kernel exp(-(d^2 / 2 sigma^2)^(s/2)); 1 at d = 0 and strictly
/// decreasing in d. For shape_s = 2 this is exactly the Gaussian
/// exp(-d^2 / 2 sigma^2).
double kernel_value(double distance, const GgdParams& p);

/// Radius where the kernel falls to tau: sigma * sqrt(2) * ln(1/tau)^(1/s).
double truncation_radius(const GgdParams& p, double tau);

/// Closed-form 2-D normalization constant s / (pi sigma^2 Gamma(1/s) 2^(1/s)).
double analytic_normalization(const GgdParams& p);

/// Sum of one truncated kernel per annotation, evaluated at pixel centers of
/// the (optionally strided) grid. In discrete_renormalized mode each kernel's
/// in-image sum is exactly 1, so the map total equals the point count.
GridMap generate_hd_papm(const PointSet& pts, const KernelSpec& spec);

struct L2Loss {
    double value = 0.0;
    GridMap grad; // d value / d pred, same shape as pred
};

/// value = 1/2 sum (target - pred)^2 over pixels; grad = pred - target.
L2Loss l2_loss(const GridMap& pred, const GridMap& target);

} // namespace papm
