#pragma once
#include <array>
#include <cmath>

namespace splitloci {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

// Covectors share the component representation; the pairing is dot(w, v).
using Covec = Vec2;

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double norm(Vec2 v) { return std::sqrt(norm2(v)); }
inline Vec2 normalized(Vec2 v) { double n = norm(v); return n > 0 ? v / n : Vec2{}; }
inline Vec2 rot90ccw(Vec2 v) { return {-v.y, v.x}; }
inline Vec2 rot90cw(Vec2 v) { return {v.y, -v.x}; }
inline bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }
inline double angle_between(Vec2 a, Vec2 b) {
    double c = dot(a, b) / (norm(a) * norm(b));
    c = std::fmin(1.0, std::fmax(-1.0, c));
    return std::acos(c);
}

// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

    Mat2() = default;
    Mat2(double m11, double m12, double m21, double m22)
        : a11(m11), a12(m12), a21(m21), a22(m22) {}

    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 from_columns(Vec2 c1, Vec2 c2) { return {c1.x, c2.x, c1.y, c2.y}; }
    static Mat2 outer(Vec2 a, Vec2 b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

    Vec2 col(int j) const { return j == 0 ? Vec2{a11, a21} : Vec2{a12, a22}; }
    Vec2 row(int i) const { return i == 0 ? Vec2{a11, a12} : Vec2{a21, a22}; }
    double det() const { return a11 * a22 - a12 * a21; }

    Vec2 operator*(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    Mat2 operator*(Mat2 o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator+(Mat2 o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
    Mat2 operator-(Mat2 o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }
};

// Singular values, descending. Closed form via the eigenvalues of A^T A.
inline std::array<double, 2> singular_values(const Mat2& m) {
    double e = (m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22) / 2.0;
    double d = m.det();
    double f = std::sqrt(std::fmax(0.0, e * e - d * d));
    double s1 = std::sqrt(std::fmax(0.0, e + f));
    double s2 = std::sqrt(std::fmax(0.0, e - f));
    return {s1, s2};
}

// Eigenvalues of a symmetric 2x2, ascending.
inline std::array<double, 2> symmetric_eigenvalues(const Mat2& m) {
    double tr = m.a11 + m.a22;
    double disc = std::sqrt(std::fmax(0.0, (m.a11 - m.a22) * (m.a11 - m.a22) + 4 * m.a12 * m.a21));
    return {(tr - disc) / 2, (tr + disc) / 2};
}

}  // namespace splitloci
