#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace liefloq {

/// Coordinate vector in R^3. Both supported algebras are three dimensional,
/// so this is the coordinate type for algebra and coalgebra elements alike.
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
    Vec3 operator/(double c) const { return {x / c, y / c, z / c}; }
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
    Vec3& operator*=(double c) {
        x *= c;
        y *= c;
        z *= c;
        return *this;
    }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline Vec3 operator*(double c, const Vec3& v) { return v * c; }

inline double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Dense real matrix of runtime dimension 2 or 3, stored inline. Covers the
/// 2x2 / 3x3 matrices of SL(2,R) / SO(3) and their algebras with value
/// semantics and no allocation.
class Mat {
  public:
    Mat() : n_(0) { a_.fill(0.0); }
    explicit Mat(int n) : n_(n) { a_.fill(0.0); }

    static Mat identity(int n) {
        Mat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return n_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i * n_ + j)]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i * n_ + j)]; }

    Mat operator+(const Mat& o) const {
        Mat r(n_);
        for (int k = 0; k < n_ * n_; ++k) r.a_[static_cast<size_t>(k)] = a_[static_cast<size_t>(k)] + o.a_[static_cast<size_t>(k)];
        return r;
    }
    Mat operator-(const Mat& o) const {
        Mat r(n_);
        for (int k = 0; k < n_ * n_; ++k) r.a_[static_cast<size_t>(k)] = a_[static_cast<size_t>(k)] - o.a_[static_cast<size_t>(k)];
        return r;
    }
    Mat operator*(double c) const {
        Mat r(n_);
        for (int k = 0; k < n_ * n_; ++k) r.a_[static_cast<size_t>(k)] = c * a_[static_cast<size_t>(k)];
        return r;
    }
    Mat operator*(const Mat& o) const {
        Mat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                const double aik = (*this)(i, k);
                for (int j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }
    Mat& operator+=(const Mat& o) {
        for (int k = 0; k < n_ * n_; ++k) a_[static_cast<size_t>(k)] += o.a_[static_cast<size_t>(k)];
        return *this;
    }

    Mat transpose() const {
        Mat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double det() const {
        if (n_ == 2) return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
        const Mat& m = *this;
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }

    /// Inverse by adjugate; the matrices this library inverts have
    /// determinant pinned to 1, so no pivoting is needed.
    Mat inverse() const {
        const double d = det();
        Mat r(n_);
        if (n_ == 2) {
            r(0, 0) = (*this)(1, 1) / d;
            r(0, 1) = -(*this)(0, 1) / d;
            r(1, 0) = -(*this)(1, 0) / d;
            r(1, 1) = (*this)(0, 0) / d;
            return r;
        }
        const Mat& m = *this;
        r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / d;
        r(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / d;
        r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / d;
        r(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / d;
        r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / d;
        r(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / d;
        r(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / d;
        r(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / d;
        r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / d;
        return r;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (int k = 0; k < n_ * n_; ++k) s += a_[static_cast<size_t>(k)] * a_[static_cast<size_t>(k)];
        return std::sqrt(s);
    }

    bool operator==(const Mat& o) const { return n_ == o.n_ && a_ == o.a_; }

  private:
    int n_;
    std::array<double, 9> a_;
};

inline Mat operator*(double c, const Mat& m) { return m * c; }

inline double frobenius_distance(const Mat& a, const Mat& b) {
    return (a - b).frobenius_norm();
}

/// 3x3 linear operator on coordinate vectors (Ad / ad and their duals in
/// the fixed basis).
class CoordMat {
  public:
    CoordMat() { a_.fill(0.0); }

    static CoordMat identity() {
        CoordMat m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i * 3 + j)]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i * 3 + j)]; }

    Vec3 operator*(const Vec3& v) const {
        return {(*this)(0, 0) * v.x + (*this)(0, 1) * v.y + (*this)(0, 2) * v.z,
                (*this)(1, 0) * v.x + (*this)(1, 1) * v.y + (*this)(1, 2) * v.z,
                (*this)(2, 0) * v.x + (*this)(2, 1) * v.y + (*this)(2, 2) * v.z};
    }

    CoordMat operator*(const CoordMat& o) const {
        CoordMat r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    CoordMat operator+(const CoordMat& o) const {
        CoordMat r;
        for (size_t k = 0; k < 9; ++k) r.a_[k] = a_[k] + o.a_[k];
        return r;
    }
    CoordMat operator-(const CoordMat& o) const {
        CoordMat r;
        for (size_t k = 0; k < 9; ++k) r.a_[k] = a_[k] - o.a_[k];
        return r;
    }
    CoordMat operator*(double c) const {
        CoordMat r;
        for (size_t k = 0; k < 9; ++k) r.a_[k] = c * a_[k];
        return r;
    }

    CoordMat transpose() const {
        CoordMat r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (size_t k = 0; k < 9; ++k) s += a_[k] * a_[k];
        return std::sqrt(s);
    }

  private:
    std::array<double, 9> a_;
};

}  // namespace liefloq
