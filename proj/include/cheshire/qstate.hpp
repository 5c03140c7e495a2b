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

// One photon in a two-arm interferometer: the 4-dimensional space
// arm {1, 2} (x) circular polarisation {+, -}, its canonical pre- and
// post-selected states, and the observables probed inside the arms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cheshire {

using Complex = std::complex<double>;

inline constexpr std::size_t kDim = 4;

/// Absolute tolerance for algebraic identities in the 4-dimensional space.
inline constexpr double kAlgebraTol = 1e-12;

inline constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2;

enum class Arm { One = 0, Two = 1 };
enum class Polarisation { Plus = 0, Minus = 1 };

/// Basis label |arm, pol>. Canonical index order: (1,+), (1,-), (2,+), (2,-).
struct BasisLabel {
    Arm arm;
    Polarisation pol;

    constexpr std::size_t index() const {
        return 2 * static_cast<std::size_t>(arm) + static_cast<std::size_t>(pol);
    }
    static constexpr BasisLabel from_index(std::size_t k) {
        return BasisLabel{static_cast<Arm>(k / 2), static_cast<Polarisation>(k % 2)};
    }
    friend constexpr bool operator==(const BasisLabel &, const BasisLabel &) = default;
};

inline std::string to_string(const BasisLabel &b) {
    return std::string("|") + (b.arm == Arm::One ? "1" : "2") + "," +
           (b.pol == Polarisation::Plus ? "+" : "-") + ">";
}

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

class Ket {
   public:
    using Amplitudes = std::array<Complex, kDim>;

    Ket() = default;

    /// Unnormalized ket (an intermediate).
    explicit Ket(const Amplitudes &amps) : amps_(amps) {
    }

    /// Flags the ket normalized when its norm is 1 within kAlgebraTol.
    static Ket checked(const Amplitudes &amps) {
        Ket k(amps);
        k.normalized_ = std::abs(k.norm_squared() - 1.0) <= kAlgebraTol;
        return k;
    }

    const Amplitudes &amplitudes() const {
        return amps_;
    }
    Complex operator[](std::size_t k) const {
        return amps_[k];
    }
    Complex operator[](BasisLabel b) const {
        return amps_[b.index()];
    }
    bool normalized() const {
        return normalized_;
    }

    double norm_squared() const {
        double total = 0.0;
        for (const auto &a : amps_) {
            total += std::norm(a);
        }
        return total;
    }
    double norm() const {
        return std::sqrt(norm_squared());
    }
    bool finite() const {
        return std::all_of(amps_.begin(), amps_.end(), is_finite);
    }

    /// Returns the normalized ket; the zero ket comes back unchanged and unflagged.
    Ket normalized_copy() const {
        double n = norm();
        if (n == 0.0) {
            return *this;
        }
        Amplitudes out{};
        for (std::size_t k = 0; k < kDim; ++k) {
            out[k] = amps_[k] / n;
        }
        Ket result(out);
        result.normalized_ = true;
        return result;
    }

    friend Ket operator+(const Ket &a, const Ket &b) {
        Amplitudes out{};
        for (std::size_t k = 0; k < kDim; ++k) {
            out[k] = a.amps_[k] + b.amps_[k];
        }
        return Ket(out);
    }
    friend Ket operator-(const Ket &a, const Ket &b) {
        Amplitudes out{};
        for (std::size_t k = 0; k < kDim; ++k) {
            out[k] = a.amps_[k] - b.amps_[k];
        }
        return Ket(out);
    }
    friend Ket operator*(Complex c, const Ket &a) {
        Amplitudes out{};
        for (std::size_t k = 0; k < kDim; ++k) {
            out[k] = c * a.amps_[k];
        }
        return Ket(out);
    }

   private:
    Amplitudes amps_{};
    bool normalized_ = false;
};

inline Ket basis_ket(BasisLabel label) {
    Ket::Amplitudes amps{};
    amps[label.index()] = 1.0;
    return Ket::checked(amps);
}

inline Ket basis_ket(Arm arm, Polarisation pol) {
    return basis_ket(BasisLabel{arm, pol});
}

/// <bra|ket>, conjugate-linear in the first argument.
inline Complex inner(const Ket &bra, const Ket &ket) {
    Complex total = 0.0;
    for (std::size_t k = 0; k < kDim; ++k) {
        total += std::conj(bra[k]) * ket[k];
    }
    return total;
}

/// Largest entrywise modulus of a - b.
inline double max_abs_diff(const Ket &a, const Ket &b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < kDim; ++k) {
        worst = std::max(worst, std::abs(a[k] - b[k]));
    }
    return worst;
}

class Operator {
   public:
    using Entries = std::array<std::array<Complex, kDim>, kDim>;

    Operator() = default;
    explicit Operator(const Entries &entries) : m_(entries) {
    }

    static Operator identity() {
        Operator op;
        for (std::size_t k = 0; k < kDim; ++k) {
            op.m_[k][k] = 1.0;
        }
        return op;
    }
    static Operator zero() {
        return Operator();
    }
    static Operator diagonal(const std::array<Complex, kDim> &d) {
        Operator op;
        for (std::size_t k = 0; k < kDim; ++k) {
            op.m_[k][k] = d[k];
        }
        return op;
    }
    /// |ket><bra|
    static Operator outer(const Ket &ket, const Ket &bra) {
        Operator op;
        for (std::size_t r = 0; r < kDim; ++r) {
            for (std::size_t c = 0; c < kDim; ++c) {
                op.m_[r][c] = ket[r] * std::conj(bra[c]);
            }
        }
        return op;
    }

    Complex operator()(std::size_t row, std::size_t col) const {
        return m_[row][col];
    }
    Complex &operator()(std::size_t row, std::size_t col) {
        return m_[row][col];
    }
    const Entries &entries() const {
        return m_;
    }

    Operator adjoint() const {
        Operator out;
        for (std::size_t r = 0; r < kDim; ++r) {
            for (std::size_t c = 0; c < kDim; ++c) {
                out.m_[r][c] = std::conj(m_[c][r]);
            }
        }
        return out;
    }

    friend Operator operator*(const Operator &a, const Operator &b) {
        Operator out;
        for (std::size_t r = 0; r < kDim; ++r) {
            for (std::size_t c = 0; c < kDim; ++c) {
                Complex acc = 0.0;
                for (std::size_t k = 0; k < kDim; ++k) {
                    acc += a.m_[r][k] * b.m_[k][c];
                }
                out.m_[r][c] = acc;
            }
        }
        return out;
    }
    friend Operator operator+(const Operator &a, const Operator &b) {
        Operator out;
        for (std::size_t r = 0; r < kDim; ++r) {
            for (std::size_t c = 0; c < kDim; ++c) {
                out.m_[r][c] = a.m_[r][c] + b.m_[r][c];
            }
        }
        return out;
    }
    friend Operator operator-(const Operator &a, const Operator &b) {
        return a + Complex(-1.0) * b;
    }
    friend Operator operator*(Complex s, const Operator &a) {
        Operator out;
        for (std::size_t r = 0; r < kDim; ++r) {
            for (std::size_t c = 0; c < kDim; ++c) {
                out.m_[r][c] = s * a.m_[r][c];
            }
        }
        return out;
    }

   private:
    Entries m_{};
};

inline double max_abs_diff(const Operator &a, const Operator &b) {
    double worst = 0.0;
    for (std::size_t r = 0; r < kDim; ++r) {
        for (std::size_t c = 0; c < kDim; ++c) {
            worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
        }
    }
    return worst;
}

inline bool approx_equal(const Operator &a, const Operator &b, double tol = kAlgebraTol) {
    return max_abs_diff(a, b) <= tol;
}
inline bool is_hermitian(const Operator &a, double tol = kAlgebraTol) {
    return approx_equal(a, a.adjoint(), tol);
}
inline bool is_unitary(const Operator &a, double tol = kAlgebraTol) {
    return approx_equal(a * a.adjoint(), Operator::identity(), tol) &&
           approx_equal(a.adjoint() * a, Operator::identity(), tol);
}
inline bool is_idempotent(const Operator &a, double tol = kAlgebraTol) {
    return approx_equal(a * a, a, tol);
}
inline Operator commutator(const Operator &a, const Operator &b) {
    return a * b - b * a;
}

/// Matrix-vector product. The result is an intermediate and is never flagged normalized.
inline Ket apply(const Operator &op, const Ket &ket) {
    Ket::Amplitudes out{};
    for (std::size_t r = 0; r < kDim; ++r) {
        Complex acc = 0.0;
        for (std::size_t c = 0; c < kDim; ++c) {
            acc += op(r, c) * ket[c];
        }
        out[r] = acc;
    }
    return Ket(out);
}

struct SpectralBranch {
    double eigenvalue;
    Operator projector;
};

/// An observable given by its eigenvalues and eigenspace projectors.
/// Degenerate eigenspaces are kept as a single higher-rank projector.
struct SpectralObservable {
    std::string name;
    std::vector<SpectralBranch> branches;

    std::size_t size() const {
        return branches.size();
    }

    std::optional<Operator> projector_for(double eigenvalue) const {
        for (const auto &b : branches) {
            if (b.eigenvalue == eigenvalue) {
                return b.projector;
            }
        }
        return std::nullopt;
    }

    /// sum_a a * P_a
    Operator as_operator() const {
        Operator total;
        for (const auto &b : branches) {
            total = total + Complex(b.eigenvalue) * b.projector;
        }
        return total;
    }
};

enum class SpectralViolationKind {
    Empty,
    NonFinite,
    NotIdempotent,
    NotHermitian,
    NotOrthogonal,
    Incomplete,
    DuplicateEigenvalue,
};

struct SpectralViolation {
    SpectralViolationKind kind;
    std::size_t first_branch = 0;
    std::size_t second_branch = 0;
    double residual = 0.0;
    std::string message;
};

/// Returns the first violated invariant, or nullopt when the observable is well formed.
inline std::optional<SpectralViolation> validate_spectral(const SpectralObservable &obs,
                                                          double tol = kAlgebraTol) {
    auto report = [](SpectralViolationKind kind, std::size_t i, std::size_t j, double residual,
                     const std::string &what) {
        std::ostringstream msg;
        msg << what << " (branches " << i << "," << j << ", residual " << residual << ")";
        return SpectralViolation{kind, i, j, residual, msg.str()};
    };
    const auto &br = obs.branches;
    if (br.empty()) {
        return SpectralViolation{SpectralViolationKind::Empty, 0, 0, 0.0, "no branches"};
    }
    for (std::size_t i = 0; i < br.size(); ++i) {
        bool finite = std::isfinite(br[i].eigenvalue);
        for (const auto &row : br[i].projector.entries()) {
            for (const auto &z : row) {
                finite = finite && is_finite(z);
            }
        }
        if (!finite) {
            return report(SpectralViolationKind::NonFinite, i, i, 0.0, "non-finite entry");
        }
    }
    for (std::size_t i = 0; i < br.size(); ++i) {
        const Operator &p = br[i].projector;
        double r = max_abs_diff(p * p, p);
        if (r > tol) {
            return report(SpectralViolationKind::NotIdempotent, i, i, r, "projector not idempotent");
        }
        r = max_abs_diff(p, p.adjoint());
        if (r > tol) {
            return report(SpectralViolationKind::NotHermitian, i, i, r, "projector not hermitian");
        }
    }
    for (std::size_t i = 0; i < br.size(); ++i) {
        for (std::size_t j = i + 1; j < br.size(); ++j) {
            double r = max_abs_diff(br[i].projector * br[j].projector, Operator::zero());
            if (r > tol) {
                return report(SpectralViolationKind::NotOrthogonal, i, j, r, "projectors not orthogonal");
            }
        }
    }
    Operator sum;
    for (const auto &b : br) {
        sum = sum + b.projector;
    }
    double r = max_abs_diff(sum, Operator::identity());
    if (r > tol) {
        return report(SpectralViolationKind::Incomplete, 0, br.size() - 1, r,
                      "projectors do not sum to identity");
    }
    for (std::size_t i = 0; i < br.size(); ++i) {
        for (std::size_t j = i + 1; j < br.size(); ++j) {
            if (br[i].eigenvalue == br[j].eigenvalue) {
                return report(SpectralViolationKind::DuplicateEigenvalue, i, j, 0.0,
                              "duplicate eigenvalue");
            }
        }
    }
    return std::nullopt;
}

// Linear polarisation in the circular basis, real convention:
//   |H> = (|+> + |->)/sqrt2,  |V> = (|+> - |->)/sqrt2.

inline Ket arm_state(Arm arm, Complex plus, Complex minus) {
    Ket::Amplitudes amps{};
    amps[BasisLabel{arm, Polarisation::Plus}.index()] = plus;
    amps[BasisLabel{arm, Polarisation::Minus}.index()] = minus;
    return Ket::checked(amps);
}

inline Ket horizontal(Arm arm) {
    return arm_state(arm, kInvSqrt2, kInvSqrt2);
}
inline Ket vertical(Arm arm) {
    return arm_state(arm, kInvSqrt2, -kInvSqrt2);
}

struct CanonicalStates {
    Ket pre;   // (|1> + |2>)|H>/sqrt2
    Ket post;  // (|1>|H> + |2>|V>)/sqrt2
};

inline CanonicalStates canonical_states() {
    return CanonicalStates{
        Ket::checked({0.5, 0.5, 0.5, 0.5}),
        Ket::checked({0.5, 0.5, 0.5, -0.5}),
    };
}

inline Operator arm_projector(Arm arm) {
    std::array<Complex, kDim> d{};
    d[BasisLabel{arm, Polarisation::Plus}.index()] = 1.0;
    d[BasisLabel{arm, Polarisation::Minus}.index()] = 1.0;
    return Operator::diagonal(d);
}

inline Operator basis_projector(BasisLabel b) {
    std::array<Complex, kDim> d{};
    d[b.index()] = 1.0;
    return Operator::diagonal(d);
}

/// |+><+| - |-><-| acting on both arms.
inline Operator sigma_z_operator() {
    return Operator::diagonal({1.0, -1.0, 1.0, -1.0});
}

inline SpectralObservable arm_observable(Arm arm) {
    Arm other = arm == Arm::One ? Arm::Two : Arm::One;
    return SpectralObservable{arm == Arm::One ? "Pi1" : "Pi2",
                              {{1.0, arm_projector(arm)}, {0.0, arm_projector(other)}}};
}

inline SpectralObservable sigma_z_observable() {
    std::array<Complex, kDim> plus{1.0, 0.0, 1.0, 0.0};
    std::array<Complex, kDim> minus{0.0, 1.0, 0.0, 1.0};
    return SpectralObservable{"sigma_z",
                              {{1.0, Operator::diagonal(plus)}, {-1.0, Operator::diagonal(minus)}}};
}

/// Pi_arm * sigma_z: angular momentum found in the given arm. Eigenvalue 0 is the
/// rank-2 subspace of the other arm.
inline SpectralObservable arm_sigma_z_observable(Arm arm) {
    Arm other = arm == Arm::One ? Arm::Two : Arm::One;
    return SpectralObservable{arm == Arm::One ? "sigma_z1" : "sigma_z2",
                              {{1.0, basis_projector({arm, Polarisation::Plus})},
                               {-1.0, basis_projector({arm, Polarisation::Minus})},
                               {0.0, arm_projector(other)}}};
}

/// Keys: Pi1, Pi2, sigma_z, sigma_z1, sigma_z2.
inline std::map<std::string, SpectralObservable> canonical_observables() {
    std::map<std::string, SpectralObservable> out;
    for (auto obs : {arm_observable(Arm::One), arm_observable(Arm::Two), sigma_z_observable(),
                     arm_sigma_z_observable(Arm::One), arm_sigma_z_observable(Arm::Two)}) {
        out.emplace(obs.name, std::move(obs));
    }
    return out;
}

}  // namespace cheshire
