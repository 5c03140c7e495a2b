// Copyright 2026 The Cheshire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Von Neumann pointers. Each pointer is a transverse beam displacement read
// on a CCD axis, with wavefunction
//
//     G(x) = (2 pi s^2)^(-1/4) exp(-x^2 / (4 s^2)),
//
// so s is the standard deviation of |G|^2. Coupling to a spectral observable
// displaces the pointer by g * a inside eigenspace a. Because the coupling is
// diagonal per eigenspace, the joint state is an exact finite sum of
// displaced Gaussians, and after post-selection the pointer wavefunction is
//
//     psi(x) = sum_i w_i prod_axes G(x_axis - d_i,axis),   w_i = <post|branch_i>.
//
// Two displaced Gaussians overlap as <G_j|G_i> = exp(-(d_i - d_j)^2 / (8 s^2)),
// and G_i G_j is a Gaussian density of variance s^2 centred at (d_i + d_j)/2
// scaled by that overlap. All moments below are closed-form Gram sums.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cheshire/qstate.hpp"
#include "cheshire/result.hpp"

namespace cheshire {

enum class Axis { Vertical, Horizontal };

inline const char *axis_name(Axis a) {
    return a == Axis::Vertical ? "vertical" : "horizontal";
}

struct GaussianPointer {
    double width;     // s, length units
    double coupling;  // g, displacement per unit eigenvalue
    Axis axis;

    std::optional<std::string> invalid_reason() const {
        if (!(std::isfinite(width) && width > 0.0)) {
            return "pointer width must be finite and > 0";
        }
        if (!(std::isfinite(coupling) && coupling >= 0.0)) {
            return "pointer coupling must be finite and >= 0";
        }
        return std::nullopt;
    }
};

struct PointerBranch {
    Ket system;                         // unnormalized
    std::vector<double> displacements;  // one per attached pointer, in attach order
};

struct CoupledState {
    std::vector<GaussianPointer> pointers;
    std::vector<PointerBranch> branches;

    std::optional<std::size_t> axis_index(Axis a) const {
        for (std::size_t k = 0; k < pointers.size(); ++k) {
            if (pointers[k].axis == a) {
                return k;
            }
        }
        return std::nullopt;
    }

    std::size_t nonzero_branch_count(double tol = kAlgebraTol) const {
        return static_cast<std::size_t>(std::count_if(
            branches.begin(), branches.end(),
            [tol](const PointerBranch &b) { return b.system.norm() > tol; }));
    }

    double total_branch_weight() const {
        double total = 0.0;
        for (const auto &b : branches) {
            total += b.system.norm_squared();
        }
        return total;
    }
};

inline CoupledState uncoupled(const Ket &state) {
    return CoupledState{{}, {{state, {}}}};
}

/// Splits each branch per eigenspace of obs and displaces the new pointer by g * eigenvalue.
inline Result<CoupledState> couple(const CoupledState &state, const SpectralObservable &obs,
                                   const GaussianPointer &pointer) {
    if (auto why = pointer.invalid_reason()) {
        return make_error(ErrorCode::InvalidArgument, *why);
    }
    if (state.axis_index(pointer.axis)) {
        return make_error(ErrorCode::DuplicateAxis,
                          std::string(axis_name(pointer.axis)) + " axis already has a pointer");
    }
    if (auto v = validate_spectral(obs)) {
        return make_error(ErrorCode::InvalidArgument, "invalid observable: " + v->message);
    }
    CoupledState out;
    out.pointers = state.pointers;
    out.pointers.push_back(pointer);
    out.branches.reserve(state.branches.size() * obs.size());
    for (const auto &b : state.branches) {
        for (const auto &eig : obs.branches) {
            PointerBranch nb{apply(eig.projector, b.system), b.displacements};
            nb.displacements.push_back(pointer.coupling * eig.eigenvalue);
            out.branches.push_back(std::move(nb));
        }
    }
    return out;
}

inline Result<CoupledState> couple(const Ket &state, const SpectralObservable &obs,
                                   const GaussianPointer &pointer) {
    return couple(uncoupled(state), obs, pointer);
}

struct PointerMixture {
    std::vector<Axis> axes;
    std::vector<double> widths;  // per axis
    std::vector<Complex> weights;
    std::vector<std::vector<double>> displacements;  // per branch, per axis

    std::size_t dimension() const {
        return axes.size();
    }
    std::size_t size() const {
        return weights.size();
    }
    std::optional<std::size_t> axis_index(Axis a) const {
        for (std::size_t k = 0; k < axes.size(); ++k) {
            if (axes[k] == a) {
                return k;
            }
        }
        return std::nullopt;
    }
};

/// <G_j|G_i> over all axes.
inline double branch_overlap(std::span<const double> di, std::span<const double> dj,
                             std::span<const double> widths) {
    double exponent = 0.0;
    for (std::size_t a = 0; a < widths.size(); ++a) {
        double delta = di[a] - dj[a];
        exponent += delta * delta / (8.0 * widths[a] * widths[a]);
    }
    return std::exp(-exponent);
}

/// sum_ij w_i conj(w_j) O_ij. Real and nonnegative up to rounding.
inline double mixture_normalization(const PointerMixture &m) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        total += std::norm(m.weights[i]);
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            double o = branch_overlap(m.displacements[i], m.displacements[j], m.widths);
            total += 2.0 * (m.weights[i] * std::conj(m.weights[j])).real() * o;
        }
    }
    return std::max(total, 0.0);
}

/// Post-selection below this probability is treated as impossible.
inline constexpr double kNullPostSelection = 1e-15;

struct PostSelectedPointer {
    PointerMixture mixture;
    double success_probability;
};

inline Result<PostSelectedPointer> postselect_pointer(const CoupledState &coupled,
                                                      const Ket &post) {
    PointerMixture m;
    for (const auto &p : coupled.pointers) {
        m.axes.push_back(p.axis);
        m.widths.push_back(p.width);
    }
    for (const auto &b : coupled.branches) {
        m.weights.push_back(inner(post, b.system));
        m.displacements.push_back(b.displacements);
    }
    double success = mixture_normalization(m);
    if (success < kNullPostSelection) {
        return make_error(ErrorCode::NullPostSelection,
                          "post-selected state is orthogonal to every pointer branch");
    }
    return PostSelectedPointer{std::move(m), success};
}

struct AxisMoments {
    Axis axis;
    double mean;
    double variance;
};

/// Closed-form per-axis mean and variance of the post-selected pointer density.
inline Result<std::vector<AxisMoments>> mixture_moments(const PointerMixture &m) {
    const double z = mixture_normalization(m);
    if (z < kNullPostSelection) {
        return make_error(ErrorCode::NullPostSelection, "pointer mixture has zero norm");
    }
    std::vector<AxisMoments> out;
    for (std::size_t a = 0; a < m.dimension(); ++a) {
        const double s2 = m.widths[a] * m.widths[a];
        double first = 0.0;
        double second = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::size_t j = 0; j < m.size(); ++j) {
                double c = (m.weights[i] * std::conj(m.weights[j])).real() *
                           branch_overlap(m.displacements[i], m.displacements[j], m.widths);
                double centre = 0.5 * (m.displacements[i][a] + m.displacements[j][a]);
                first += c * centre;
                second += c * (centre * centre + s2);
            }
        }
        double mean = first / z;
        out.push_back({m.axes[a], mean, second / z - mean * mean});
    }
    return out;
}

/// Unnormalized pointer wavefunction sum_i w_i prod_a G(x_a - d_i,a).
inline Complex mixture_amplitude(const PointerMixture &m, std::span<const double> point) {
    Complex total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double g = 1.0;
        for (std::size_t a = 0; a < m.dimension(); ++a) {
            double s = m.widths[a];
            double u = point[a] - m.displacements[i][a];
            g *= std::exp(-u * u / (4.0 * s * s)) / std::sqrt(std::sqrt(2.0 * std::numbers::pi * s * s));
        }
        total += m.weights[i] * g;
    }
    return total;
}

/// Normalized probability density of the pointer readout at point.
inline Result<double> mixture_density(const PointerMixture &m, std::span<const double> point) {
    if (point.size() != m.dimension()) {
        return make_error(ErrorCode::InvalidArgument, "point dimension does not match pointer axes");
    }
    const double z = mixture_normalization(m);
    if (z < kNullPostSelection) {
        return make_error(ErrorCode::NullPostSelection, "pointer mixture has zero norm");
    }
    return std::norm(mixture_amplitude(m, point)) / z;
}

/// Probability mass of the marginal on one axis inside each Voronoi cell of the
/// given centres (cells split at midpoints between sorted neighbours).
/// Masses are returned in the order the centres were given.
inline Result<std::vector<double>> axis_lobe_masses(const PointerMixture &m, Axis axis,
                                                    std::span<const double> centres) {
    auto idx = m.axis_index(axis);
    if (!idx) {
        return make_error(ErrorCode::InvalidArgument, "axis has no pointer");
    }
    const double z = mixture_normalization(m);
    if (z < kNullPostSelection) {
        return make_error(ErrorCode::NullPostSelection, "pointer mixture has zero norm");
    }
    const std::size_t a = *idx;
    const double s = m.widths[a];
    std::vector<double> sorted(centres.begin(), centres.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        return make_error(ErrorCode::InvalidArgument, "lobe centres must be distinct");
    }

    // Standard normal CDF via erfc keeps the far tails accurate.
    auto cdf = [](double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); };
    auto cell_mass = [&](double lo, double hi) {
        double mass = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::size_t j = 0; j < m.size(); ++j) {
                double c = (m.weights[i] * std::conj(m.weights[j])).real() *
                           branch_overlap(m.displacements[i], m.displacements[j], m.widths);
                double centre = 0.5 * (m.displacements[i][a] + m.displacements[j][a]);
                double upper = std::isinf(hi) ? 1.0 : cdf((hi - centre) / s);
                double lower = std::isinf(lo) ? 0.0 : cdf((lo - centre) / s);
                mass += c * (upper - lower);
            }
        }
        return mass / z;
    };

    std::vector<double> out;
    out.reserve(centres.size());
    for (double c : centres) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), c);
        std::size_t k = static_cast<std::size_t>(it - sorted.begin());
        double lo = k == 0 ? -INFINITY : 0.5 * (sorted[k - 1] + sorted[k]);
        double hi = k + 1 == sorted.size() ? INFINITY : 0.5 * (sorted[k] + sorted[k + 1]);
        out.push_back(cell_mass(lo, hi));
    }
    return out;
}

}  // namespace cheshire
