#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "ssflab/errors.hpp"

namespace ssflab {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
inline constexpr bool is_complex_v = Eigen::NumTraits<Scalar>::IsComplex;

// ---------------------------------------------------------------------------
// Spectrum

/// Ascending sequence of real eigenvalues, repeated by multiplicity.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(Eigen::VectorXd values) : values_(std::move(values)) {
    for (Index i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw DomainError("Spectrum: non-finite eigenvalue at position " + std::to_string(i));
      }
    }
    std::sort(values_.data(), values_.data() + values_.size());
  }

  const Eigen::VectorXd& values() const { return values_; }
  Index size() const { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }
  double min() const { return values_.size() ? values_[0] : 0.0; }
  double max() const { return values_.size() ? values_[values_.size() - 1] : 0.0; }

  auto begin() const { return values_.data(); }
  auto end() const { return values_.data() + values_.size(); }

 private:
  Eigen::VectorXd values_;
};

// ---------------------------------------------------------------------------
// HermitianOperator

/// Dense self-adjoint matrix. The constructor symmetrizes its input by
/// (M + M*)/2 and keeps the largest pre-symmetrization deviation
/// |M_ij - conj(M_ji)| for diagnostics.
template <typename Scalar>
class HermitianOperator {
  static_assert(std::is_same_v<typename Eigen::NumTraits<Scalar>::Real, double>,
                "HermitianOperator supports double and std::complex<double>");

 public:
  using MatrixType = Matrix<Scalar>;

  template <typename Derived>
  explicit HermitianOperator(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) {
      throw DomainError("HermitianOperator: matrix is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", expected square");
    }
    if (m.rows() < 1) throw DomainError("HermitianOperator: dimension must be >= 1");
    MatrixType in = m.template cast<Scalar>();
    if (!in.allFinite()) throw DomainError("HermitianOperator: non-finite entry");
    asymmetry_ = (in - in.adjoint()).cwiseAbs().maxCoeff();
    entries_ = (in + in.adjoint()) / 2.0;
  }

  static HermitianOperator zero(Index dim) { return HermitianOperator(MatrixType::Zero(dim, dim)); }
  static HermitianOperator identity(Index dim) {
    return HermitianOperator(MatrixType::Identity(dim, dim));
  }
  static HermitianOperator diagonal(const Eigen::VectorXd& d) {
    return HermitianOperator(d.cast<Scalar>().asDiagonal().toDenseMatrix());
  }

  Index dim() const { return entries_.rows(); }
  const MatrixType& matrix() const { return entries_; }
  Scalar operator()(Index i, Index j) const { return entries_(i, j); }

  double input_asymmetry() const { return asymmetry_; }
  double max_abs() const { return entries_.cwiseAbs().maxCoeff(); }
  double trace() const { return std::real(entries_.trace()); }

  friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    check_same_dim(a, b, "operator+");
    return HermitianOperator(a.entries_ + b.entries_);
  }
  friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
    check_same_dim(a, b, "operator-");
    return HermitianOperator(a.entries_ - b.entries_);
  }
  friend HermitianOperator operator-(const HermitianOperator& a) {
    return HermitianOperator(-a.entries_);
  }
  friend HermitianOperator operator*(double s, const HermitianOperator& a) {
    return HermitianOperator(s * a.entries_);
  }
  friend bool operator==(const HermitianOperator& a, const HermitianOperator& b) {
    return a.dim() == b.dim() && a.entries_ == b.entries_;
  }

  static void check_same_dim(const HermitianOperator& a, const HermitianOperator& b,
                             std::string_view where) {
    if (a.dim() != b.dim()) {
      throw DomainError(std::string(where) + ": dimension mismatch (" + std::to_string(a.dim()) +
                        " vs " + std::to_string(b.dim()) + ")");
    }
  }

 private:
  MatrixType entries_;
  double asymmetry_ = 0.0;
};

using RealOperator = HermitianOperator<double>;
using ComplexOperator = HermitianOperator<Complex>;

// ---------------------------------------------------------------------------
// Eigendecomposition and functional calculus

template <typename Scalar>
struct SpectralDecomposition {
  Spectrum eigenvalues;
  Matrix<Scalar> eigenvectors;  // columns orthonormal, ordered like eigenvalues
};

namespace detail {

template <typename Scalar>
std::string fingerprint(const HermitianOperator<Scalar>& a) {
  // FNV-1a over the raw entry bytes.
  std::uint64_t h = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(a.matrix().data());
  const std::size_t n = sizeof(Scalar) * static_cast<std::size_t>(a.matrix().size());
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << "dim=" << a.dim() << " fro=" << a.matrix().norm() << " tr=" << a.trace() << " hash=" << std::hex
     << h;
  return os.str();
}

}  // namespace detail

template <typename Scalar>
SpectralDecomposition<Scalar> eigendecompose(const HermitianOperator<Scalar>& a) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecompose: eigensolver did not converge (" + detail::fingerprint(a) + ")");
  }
  return {Spectrum(solver.eigenvalues()), solver.eigenvectors()};
}

/// Eigenvalues only; cheaper than a full decomposition.
template <typename Scalar>
Spectrum spectrum(const HermitianOperator<Scalar>& a) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectrum: eigensolver did not converge (" + detail::fingerprint(a) + ")");
  }
  return Spectrum(solver.eigenvalues());
}

/// max |U diag(lambda) U* - A|.
template <typename Scalar>
double reconstruction_residual(const SpectralDecomposition<Scalar>& d, const HermitianOperator<Scalar>& a) {
  const auto& u = d.eigenvectors;
  Matrix<Scalar> r = u * d.eigenvalues.values().template cast<Scalar>().asDiagonal() * u.adjoint();
  return (r - a.matrix()).cwiseAbs().maxCoeff();
}

template <typename Scalar, typename Fn>
HermitianOperator<Scalar> apply_function(const SpectralDecomposition<Scalar>& d, Fn&& f) {
  const auto& lam = d.eigenvalues.values();
  Eigen::VectorXd fl(lam.size());
  for (Index j = 0; j < lam.size(); ++j) {
    fl[j] = f(lam[j]);
    if (!std::isfinite(fl[j])) {
      std::ostringstream os;
      os << "apply_function: function is not finite at eigenvalue " << lam[j];
      throw DomainError(os.str());
    }
  }
  const auto& u = d.eigenvectors;
  return HermitianOperator<Scalar>(u * fl.cast<Scalar>().asDiagonal() * u.adjoint());
}

/// F(A) = U diag(F(lambda_j)) U*.
template <typename Scalar, typename Fn>
HermitianOperator<Scalar> apply_function(const HermitianOperator<Scalar>& a, Fn&& f) {
  return apply_function(eigendecompose(a), std::forward<Fn>(f));
}

/// (A + a)^{-p}; requires a > -min spec(A).
template <typename Scalar>
HermitianOperator<Scalar> resolvent_power(const HermitianOperator<Scalar>& a, double shift, double p) {
  if (!(p >= 1.0)) throw DomainError("resolvent_power: exponent p must be >= 1");
  auto d = eigendecompose(a);
  if (!(shift > -d.eigenvalues.min())) {
    std::ostringstream os;
    os << "resolvent_power: shift too small, need a > " << -d.eigenvalues.min()
       << " (min spec = " << d.eigenvalues.min() << "), got a = " << shift;
    throw DomainError(os.str());
  }
  return apply_function(d, [shift, p](double x) { return std::pow(x + shift, -p); });
}

/// Trace norm of A - B (sum of |eigenvalues| of the Hermitian difference).
template <typename Scalar>
double trace_norm_diff(const HermitianOperator<Scalar>& a, const HermitianOperator<Scalar>& b) {
  HermitianOperator<Scalar>::check_same_dim(a, b, "trace_norm_diff");
  return spectrum(a - b).values().cwiseAbs().sum();
}

/// Minimum eigenvalue; A is positive semidefinite iff psd_gap(A) >= -psd_tolerance(A).
template <typename Scalar>
double psd_gap(const HermitianOperator<Scalar>& a) {
  return spectrum(a).min();
}

template <typename Scalar>
double psd_tolerance(const HermitianOperator<Scalar>& a) {
  return 1e-10 * (1.0 + a.max_abs());
}

/// P_n W P_n for the coordinate projection onto the first n basis vectors.
template <typename Scalar>
HermitianOperator<Scalar> compress_by_projection(const HermitianOperator<Scalar>& w, Index n) {
  if (n < 0 || n > w.dim()) {
    throw DomainError("compress_by_projection: n = " + std::to_string(n) + " outside [0, " +
                      std::to_string(w.dim()) + "]");
  }
  Matrix<Scalar> m = Matrix<Scalar>::Zero(w.dim(), w.dim());
  m.topLeftCorner(n, n) = w.matrix().topLeftCorner(n, n);
  return HermitianOperator<Scalar>(m);
}

// ---------------------------------------------------------------------------
// Builders

/// Dirichlet finite-difference Laplacian on n grid points (spacing 1) plus a
/// diagonal potential: 2 + v_i on the diagonal, -1 next to it.
template <typename Scalar = double>
HermitianOperator<Scalar> build_discrete_schrodinger(Index n, std::span<const double> potential) {
  if (n < 2) throw DomainError("build_discrete_schrodinger: need n >= 2, got " + std::to_string(n));
  if (static_cast<Index>(potential.size()) != n) {
    throw DomainError("build_discrete_schrodinger: potential has " + std::to_string(potential.size()) +
                      " entries, expected " + std::to_string(n));
  }
  Matrix<Scalar> m = Matrix<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    m(i, i) = 2.0 + potential[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      m(i, i + 1) = -1.0;
      m(i + 1, i) = -1.0;
    }
  }
  return HermitianOperator<Scalar>(m);
}

enum class Ensemble { goe, gue, diagonal };

inline Ensemble parse_ensemble(std::string_view tag) {
  if (tag == "goe") return Ensemble::goe;
  if (tag == "gue") return Ensemble::gue;
  if (tag == "diagonal") return Ensemble::diagonal;
  throw DomainError("unknown ensemble '" + std::string(tag) + "' (expected goe, gue or diagonal)");
}

inline std::string_view to_string(Ensemble e) {
  switch (e) {
    case Ensemble::goe: return "goe";
    case Ensemble::gue: return "gue";
    case Ensemble::diagonal: return "diagonal";
  }
  return "?";
}

/// Independent seed for task `index` of a run seeded with `master`.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

/// Gaussian ensembles scaled so that off-diagonal entries have variance
/// scale^2/dim. The diagonal ensemble draws N(0, scale^2) on the diagonal.
template <typename Scalar>
HermitianOperator<Scalar> build_random_hermitian(Index dim, Ensemble ensemble, std::uint64_t seed,
                                                 double scale = 1.0) {
  if (dim < 1) throw DomainError("build_random_hermitian: dim must be >= 1");
  if (!(scale > 0.0)) throw DomainError("build_random_hermitian: scale must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<Scalar> m = Matrix<Scalar>::Zero(dim, dim);
  const double sd = scale * std::sqrt(2.0 / static_cast<double>(dim));
  switch (ensemble) {
    case Ensemble::diagonal:
      for (Index i = 0; i < dim; ++i) m(i, i) = scale * normal(rng);
      break;
    case Ensemble::goe:
      for (Index j = 0; j < dim; ++j)
        for (Index i = 0; i < dim; ++i) m(i, j) = sd * normal(rng);
      break;
    case Ensemble::gue:
      if constexpr (is_complex_v<Scalar>) {
        const double part = sd / std::sqrt(2.0);
        for (Index j = 0; j < dim; ++j)
          for (Index i = 0; i < dim; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = Scalar(part * re, part * im);
          }
      } else {
        throw DomainError("build_random_hermitian: gue needs a complex scalar type");
      }
      break;
  }
  return HermitianOperator<Scalar>(m);
}

// ---------------------------------------------------------------------------
// Coupling families

/// Either the segment {alpha V1 + (1 - alpha) V2 : alpha in [0,1]} or the
/// quadratic path V(alpha) = B0 + alpha B1 - alpha^2 B2 with B2 >= 0, which
/// is operator concave in alpha. Both are attached to a base operator A0.
template <typename Scalar>
class CouplingFamily {
 public:
  using Op = HermitianOperator<Scalar>;

  static CouplingFamily segment(Op base, Op v1, Op v2) {
    Op::check_same_dim(base, v1, "CouplingFamily::segment");
    Op::check_same_dim(base, v2, "CouplingFamily::segment");
    return CouplingFamily(false, std::move(base), {std::move(v1), std::move(v2)}, 0.0, 1.0);
  }

  static CouplingFamily path(Op base, Op b0, Op b1, Op b2, double lo, double hi) {
    Op::check_same_dim(base, b0, "CouplingFamily::path");
    Op::check_same_dim(base, b1, "CouplingFamily::path");
    Op::check_same_dim(base, b2, "CouplingFamily::path");
    if (!(lo < hi)) throw DomainError("CouplingFamily::path: empty parameter interval");
    const double gap = psd_gap(b2);
    if (gap < -psd_tolerance(b2)) {
      std::ostringstream os;
      os << "CouplingFamily::path: B2 is not positive semidefinite (min eigenvalue " << gap << ")";
      throw DomainError(os.str());
    }
    return CouplingFamily(true, std::move(base), {std::move(b0), std::move(b1), std::move(b2)}, lo, hi);
  }

  bool is_path() const { return path_; }
  const Op& base() const { return base_; }
  Index dim() const { return base_.dim(); }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  /// V1, V2 for a segment; B0, B1, B2 for a path.
  const std::vector<Op>& terms() const { return terms_; }

  Op member(double alpha) const {
    if (!path_) {
      if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw DomainError("convex_combination: alpha = " + std::to_string(alpha) + " outside [0, 1]");
      }
      if (alpha == 1.0) return terms_[0];
      if (alpha == 0.0) return terms_[1];
      return Op(alpha * terms_[0].matrix() + (1.0 - alpha) * terms_[1].matrix());
    }
    return Op(terms_[0].matrix() + alpha * terms_[1].matrix() - alpha * alpha * terms_[2].matrix());
  }

 private:
  CouplingFamily(bool path, Op base, std::vector<Op> terms, double lo, double hi)
      : path_(path), base_(std::move(base)), terms_(std::move(terms)), lo_(lo), hi_(hi) {}

  bool path_;
  Op base_;
  std::vector<Op> terms_;
  double lo_;
  double hi_;
};

template <typename Scalar>
HermitianOperator<Scalar> convex_combination(const CouplingFamily<Scalar>& family, double alpha) {
  return family.member(alpha);
}

}  // namespace ssflab
