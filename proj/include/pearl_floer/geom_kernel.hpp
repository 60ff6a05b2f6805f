/**
 * Linear symplectic geometry of C^n with the standard conventions.
 *
 *   omega = sum_j dx_j ^ dy_j
 *   sigma = 1/2 sum_j (x_j dy_j - y_j dx_j)      (d sigma = omega)
 *   Omega = dz_1 ^ ... ^ dz_n
 *
 * With the Hermitian product <a, b> = sum_j conj(a_j) b_j these become
 * omega(u, v) = Im <u, v> and sigma_z(v) = 1/2 Im <z, v>.  A Lagrangian
 * plane is represented by a unitary frame whose real column span is the
 * plane; any two frames of one plane differ by a real orthogonal matrix.
 */
#ifndef PEARL_FLOER_GEOM_KERNEL_HPP
#define PEARL_FLOER_GEOM_KERNEL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace pearl {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kTolFrame = 1e-10;
inline constexpr double kTolTransverse = 1e-8;

class AmbientSpace
{
public:
    explicit AmbientSpace(int n) : n_(n)
    {
        if (n < 1)
            throw Error(ErrorKind::InvalidArgument, "complex dimension must be >= 1");
    }

    int dim() const noexcept { return n_; }

    static double omega(const CVector& u, const CVector& v) { return u.dot(v).imag(); }

    // sigma evaluated at the point z on the tangent vector v.
    static double sigma(const CVector& z, const CVector& v) { return 0.5 * z.dot(v).imag(); }

private:
    int n_;
};

class LagrangianFrame
{
public:
    // Wraps an already unitary matrix; throws InvalidFrame otherwise.
    static LagrangianFrame from_unitary(CMatrix columns, double tol = kTolFrame)
    {
        if (columns.rows() != columns.cols() || columns.rows() == 0)
            throw Error(ErrorKind::InvalidFrame, "frame must be a non-empty square matrix");
        const auto n = columns.rows();
        const double defect = (columns.adjoint() * columns - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
        if (defect > tol)
            throw Error(ErrorKind::InvalidFrame, "frame is not unitary", defect);
        return LagrangianFrame(std::move(columns));
    }

    int dim() const noexcept { return static_cast<int>(columns_.rows()); }
    const CMatrix& matrix() const noexcept { return columns_; }

    // Same plane, different frame: right multiplication by a real orthogonal matrix.
    LagrangianFrame rotated(const RMatrix& orthogonal) const
    {
        return from_unitary(columns_ * orthogonal.cast<Complex>(), 1e-9);
    }

    // Image of the plane under a unitary map of C^n.
    LagrangianFrame transformed(const CMatrix& unitary) const
    {
        return from_unitary(unitary * columns_, 1e-9);
    }

private:
    explicit LagrangianFrame(CMatrix columns) : columns_(std::move(columns)) {}

    CMatrix columns_;
};

struct KahlerAngles
{
    std::vector<double> alphas; // sorted, each in (0, 1/2)
    double total = 0.0;
};

struct IndexValue
{
    double raw = 0.0;
    int rounded = 0;
    double residual = 0.0;
};

/**
 * Orthonormalizes n real-independent vectors (the columns of `vectors`)
 * with respect to Re<.,.> and verifies that the result is unitary.  The
 * imaginary part of the Gram matrix of the orthonormal frame is the
 * omega-pairing, so unitarity is exactly the Lagrangian condition.
 */
inline LagrangianFrame make_unitary_frame(const CMatrix& vectors, double tol = kTolFrame)
{
    const auto n = vectors.rows();
    if (n == 0 || vectors.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "need exactly n spanning vectors in C^n");

    CMatrix u = vectors;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double original = vectors.col(k).norm();
        if (!(original > 0.0))
            throw Error(ErrorKind::Degenerate, "zero spanning vector", static_cast<double>(k));
        // Two passes of modified Gram-Schmidt.
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j < k; ++j)
                u.col(k) -= u.col(j).dot(u.col(k)).real() * u.col(j);
        const double len = u.col(k).norm();
        if (len <= tol * original)
            throw Error(ErrorKind::Degenerate, "spanning vectors are real-linearly dependent",
                        static_cast<double>(k));
        u.col(k) /= len;
    }

    double residual = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            residual = std::max(residual, std::abs(u.col(i).dot(u.col(j)).imag()));
    if (residual > tol)
        throw Error(ErrorKind::NotLagrangian, "omega does not vanish on the span", residual);
    return LagrangianFrame::from_unitary(std::move(u), std::max(tol, 1e-12) * 10.0);
}

/**
 * Kahler angles of the pair (F1, F2).  With M = F1^H F2 the complex
 * symmetric unitary matrix S = M M^T has eigenvalues exp(4 pi i alpha_j);
 * the angles are read off with arg taken in (0, 2 pi).
 */
inline KahlerAngles kahler_angles(const LagrangianFrame& f1, const LagrangianFrame& f2,
                                  double tol = kTolTransverse)
{
    if (f1.dim() != f2.dim())
        throw Error(ErrorKind::DimensionMismatch, "frames of different dimension");
    const CMatrix m = f1.matrix().adjoint() * f2.matrix();
    const CMatrix s = m * m.transpose();
    Eigen::ComplexEigenSolver<CMatrix> solver(s, false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::Degenerate, "eigenvalue solver failed");

    KahlerAngles out;
    out.alphas.reserve(static_cast<std::size_t>(f1.dim()));
    for (Eigen::Index j = 0; j < s.rows(); ++j) {
        const Complex lambda = solver.eigenvalues()(j);
        const double gap = std::abs(lambda - Complex(1.0, 0.0));
        if (gap < tol)
            throw Error(ErrorKind::NotTransverse, "planes share a real direction", gap);
        double arg = std::arg(lambda);
        if (arg <= 0.0)
            arg += 2.0 * std::numbers::pi;
        out.alphas.push_back(arg / (4.0 * std::numbers::pi));
    }
    std::sort(out.alphas.begin(), out.alphas.end());
    for (double a : out.alphas)
        out.total += a;
    return out;
}

// arg(det(F)^2) / 2 pi in [0, 1).
inline double det_squared_phase(const LagrangianFrame& frame)
{
    const Complex det = frame.matrix().determinant();
    double phase = std::arg(det * det) / (2.0 * std::numbers::pi);
    if (phase < 0.0)
        phase += 1.0;
    if (phase >= 1.0)
        phase -= 1.0;
    return phase;
}

// ind(p, q) = n + theta(q) - theta(p) - 2 Angle.
inline IndexValue index_of_pair(double theta_p, double theta_q, const KahlerAngles& angles, int n)
{
    if (angles.alphas.size() != static_cast<std::size_t>(n))
        throw Error(ErrorKind::DimensionMismatch, "angle count does not match n");
    IndexValue v;
    v.raw = n + theta_q - theta_p - 2.0 * angles.total;
    v.rounded = static_cast<int>(std::lround(v.raw));
    v.residual = std::abs(v.raw - v.rounded);
    return v;
}

inline bool transversality_check(const LagrangianFrame& f1, const LagrangianFrame& f2,
                                 double tol = kTolTransverse)
{
    if (f1.dim() != f2.dim())
        throw Error(ErrorKind::DimensionMismatch, "frames of different dimension");
    try {
        kahler_angles(f1, f2, tol);
        return true;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotTransverse)
            return false;
        throw;
    }
}

// exp(i phi) * Identity, a convenient frame for rotated copies of R^n.
inline LagrangianFrame phase_frame(int n, double phi)
{
    return LagrangianFrame::from_unitary(CMatrix::Identity(n, n) * std::polar(1.0, phi));
}

} // namespace pearl

#endif
