#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfe {

// Error hierarchy. The CLI maps ValidationError to exit code 2 and
// NumericalError to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class AlignmentError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IoError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class ResolutionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InstabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateFrameError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EnvelopeExpiredError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    Vec3& operator*=(double a) {
        x *= a;
        y *= a;
        z *= a;
        return *this;
    }
    bool operator==(const Vec3&) const = default;
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double max_abs(const Vec3& a) {
    return std::fmax(std::fabs(a.x), std::fmax(std::fabs(a.y), std::fabs(a.z)));
}
inline bool is_finite(const Vec3& a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

inline constexpr Vec3 e1{1.0, 0.0, 0.0};
inline constexpr Vec3 e2{0.0, 1.0, 0.0};
inline constexpr Vec3 e3{0.0, 0.0, 1.0};

using Field3 = std::vector<Vec3>;
using Field1 = std::vector<double>;

// Pointwise field algebra, found by ADL on std::vector<vfe::Vec3>.
inline Field3& operator+=(Field3& a, const Field3& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}
inline Field3& operator-=(Field3& a, const Field3& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}
inline Field3 operator+(Field3 a, const Field3& b) { return a += b; }
inline Field3 operator-(Field3 a, const Field3& b) { return a -= b; }
inline Field3 operator*(double s, Field3 a) {
    for (auto& x : a) x *= s;
    return a;
}

inline Field3 cross(const Field3& a, const Field3& b) {
    Field3 out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = cross(a[i], b[i]);
    return out;
}

inline Field1 dot(const Field3& a, const Field3& b) {
    Field1 out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = dot(a[i], b[i]);
    return out;
}

inline Field3 mul(const Field1& s, const Field3& a) {
    Field3 out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = s[i] * a[i];
    return out;
}

inline Field3 normalized(Field3 v) {
    for (auto& x : v) x = x / norm(x);
    return v;
}

inline double max_abs(const Field3& f) {
    double m = 0.0;
    for (const auto& x : f) m = std::fmax(m, max_abs(x));
    return m;
}

inline double max_abs_diff(const Field3& a, const Field3& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::fmax(m, max_abs(a[i] - b[i]));
    return m;
}

inline bool all_finite(const Field3& f) {
    for (const auto& x : f)
        if (!is_finite(x)) return false;
    return true;
}

inline Field3 constant_field(std::size_t n, const Vec3& c) { return Field3(n, c); }

enum class Boundary { HalfLine, Periodic };

// Uniform grid on [0, L]. On the half-line the last node sits at s = L;
// the periodic variant identifies s = L with s = 0.
class GridSpec {
public:
    static GridSpec half_line(std::size_t n, double length) {
        return GridSpec(n, length, Boundary::HalfLine);
    }
    static GridSpec periodic(std::size_t n, double length) {
        return GridSpec(n, length, Boundary::Periodic);
    }

    std::size_t n() const { return n_; }
    double length() const { return length_; }
    double h() const { return h_; }
    Boundary boundary() const { return boundary_; }
    bool is_periodic() const { return boundary_ == Boundary::Periodic; }
    double s(std::size_t i) const { return static_cast<double>(i) * h_; }

    std::vector<double> nodes() const {
        std::vector<double> s(n_);
        for (std::size_t i = 0; i < n_; ++i) s[i] = this->s(i);
        return s;
    }

    // Grid with spacing h/2 whose even nodes coincide with this grid.
    GridSpec refined() const {
        return is_periodic() ? periodic(2 * n_, length_) : half_line(2 * n_ - 1, length_);
    }

    bool operator==(const GridSpec&) const = default;

private:
    GridSpec(std::size_t n, double length, Boundary b) : n_(n), length_(length), boundary_(b) {
        if (n < 16) throw ValidationError("grid.n must be >= 16 (got " + std::to_string(n) + ")");
        if (!(length > 0.0) || !std::isfinite(length))
            throw ValidationError("grid.length must be a positive finite number");
        h_ = is_periodic() ? length / static_cast<double>(n) : length / static_cast<double>(n - 1);
    }

    std::size_t n_;
    double length_;
    Boundary boundary_;
    double h_ = 0.0;
};

enum class Regime { NegAlpha, PosAlpha };

struct SimParams {
    double alpha = -1.0;
    double delta = 0.0;
    int stencil_order = 4;
    double cfl_safety = 0.5;

    Regime regime() const { return alpha > 0.0 ? Regime::PosAlpha : Regime::NegAlpha; }

    void validate() const {
        if (alpha == 0.0 || !std::isfinite(alpha))
            throw ValidationError("params.alpha must be a non-zero constant");
        if (!(delta >= 0.0) || !std::isfinite(delta))
            throw ValidationError("params.delta must be >= 0");
        if (stencil_order != 2 && stencil_order != 4 && stencil_order != 6)
            throw ValidationError("grid.stencil_order must be 2, 4 or 6");
        if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
            throw ValidationError("params.cfl_safety must lie in (0, 1]");
    }
};

inline void require_aligned(std::size_t size, const GridSpec& g, const char* what) {
    if (size != g.n())
        throw AlignmentError(std::string(what) + ": field has " + std::to_string(size) +
                             " nodes, grid has " + std::to_string(g.n()));
}

// Pairwise summation; the split points depend only on the length, so the
// result is reproducible for a given input order.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double quadrature_weight(std::size_t i, const GridSpec& g) {
    if (g.is_periodic()) return g.h();
    return (i == 0 || i + 1 == g.n()) ? 0.5 * g.h() : g.h();
}

// Trapezoidal integral of a scalar field.
inline double integrate(const Field1& f, const GridSpec& g) {
    require_aligned(f.size(), g, "integrate");
    Field1 terms(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) terms[i] = f[i] * quadrature_weight(i, g);
    return pairwise_sum(terms);
}

inline double inner_product(const Field3& f, const Field3& f2, const GridSpec& g) {
    require_aligned(f.size(), g, "inner_product");
    require_aligned(f2.size(), g, "inner_product");
    return integrate(dot(f, f2), g);
}

inline double inner_product(const Field1& f, const Field1& f2, const GridSpec& g) {
    require_aligned(f.size(), g, "inner_product");
    require_aligned(f2.size(), g, "inner_product");
    Field1 p(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) p[i] = f[i] * f2[i];
    return integrate(p, g);
}

inline double l2_norm(const Field3& f, const GridSpec& g) {
    return std::sqrt(inner_product(f, f, g));
}

inline double l2_norm(const Field1& f, const GridSpec& g) {
    return std::sqrt(inner_product(f, f, g));
}

inline double sup_norm_unit_drift(const Field3& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::fmax(m, std::fabs(norm(x) - 1.0));
    return m;
}

// Smooth cutoff: 1 for s <= support, 0 for s >= 2 support, C-infinity in
// between (exp-based bridge).
inline double cutoff(double s, double support = 1.0) {
    const double x = s / support - 1.0;
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - x));
    const double b = std::exp(-1.0 / x);
    return a / (a + b);
}

// Evolving state: unit tangent v, optional reconstructed curve x (empty when
// not tracked), and the far-field value held by the right-end clamp.
struct SimState {
    double t = 0.0;
    Field3 v;
    Field3 x;
    long step_count = 0;
    Vec3 far_field = e3;
};

}  // namespace vfe
