#include "vecproc/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vecproc {

namespace {

void require_finite(std::span<const double> coords) {
  for (double c : coords) {
    if (!std::isfinite(c)) throw std::invalid_argument("HPoint: non-finite coordinate");
  }
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a) + " vs " +
                                std::to_string(b));
  }
}

}  // namespace

HPoint::HPoint(std::initializer_list<double> coords) : coords_(coords) {
  require_finite(coords_);
}

HPoint::HPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  require_finite(coords_);
}

HPoint::HPoint(std::span<const double> coords) : coords_(coords.begin(), coords.end()) {
  require_finite(coords_);
}

HPoint HPoint::unit(std::size_t dim, std::size_t k) {
  if (k >= dim) throw std::invalid_argument("HPoint::unit: index out of range");
  HPoint e(dim);
  e[k] = 1.0;
  return e;
}

HPoint& HPoint::operator+=(const HPoint& other) {
  require_same_dim(dim(), other.dim());
  for (std::size_t k = 0; k < coords_.size(); ++k) coords_[k] += other.coords_[k];
  return *this;
}

HPoint& HPoint::operator-=(const HPoint& other) {
  require_same_dim(dim(), other.dim());
  for (std::size_t k = 0; k < coords_.size(); ++k) coords_[k] -= other.coords_[k];
  return *this;
}

HPoint& HPoint::operator*=(double s) noexcept {
  for (double& c : coords_) c *= s;
  return *this;
}

HPoint& HPoint::axpy(double s, const HPoint& other) {
  require_same_dim(dim(), other.dim());
  for (std::size_t k = 0; k < coords_.size(); ++k) coords_[k] += s * other.coords_[k];
  return *this;
}

double inner(std::span<const double> u, std::span<const double> v) {
  require_same_dim(u.size(), v.size());
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s;
}

double inner(const HPoint& u, const HPoint& v) { return inner(u.coords(), v.coords()); }

double norm(std::span<const double> u) noexcept {
  double s = 0.0;
  for (double c : u) s += c * c;
  return std::sqrt(s);
}

double norm(const HPoint& u) noexcept { return norm(u.coords()); }

double distance(std::span<const double> u, std::span<const double> v) {
  require_same_dim(u.size(), v.size());
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double diff = u[k] - v[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

OrthonormalBasis::OrthonormalBasis(std::vector<HPoint> columns) : columns_(std::move(columns)) {
  const std::size_t n = columns_.size();
  for (std::size_t i = 0; i < n; ++i) {
    require_same_dim(columns_[i].dim(), n);
    for (std::size_t j = i; j < n; ++j) {
      const double expected = (i == j) ? 1.0 : 0.0;
      if (std::abs(inner(columns_[i], columns_[j]) - expected) > kOrthonormalTol) {
        throw std::invalid_argument("OrthonormalBasis: columns " + std::to_string(i) + ", " +
                                    std::to_string(j) + " violate orthonormality");
      }
    }
  }
}

OrthonormalBasis OrthonormalBasis::identity(std::size_t dim) {
  OrthonormalBasis basis;
  basis.columns_.reserve(dim);
  for (std::size_t k = 0; k < dim; ++k) basis.columns_.push_back(HPoint::unit(dim, k));
  return basis;
}

OrthonormalBasis OrthonormalBasis::gram_schmidt(std::vector<HPoint> vectors) {
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      vectors[i].axpy(-inner(vectors[i], vectors[j]), vectors[j]);
    }
    // second pass keeps the result orthonormal to ~1e-15
    for (std::size_t j = 0; j < i; ++j) {
      vectors[i].axpy(-inner(vectors[i], vectors[j]), vectors[j]);
    }
    const double len = norm(vectors[i]);
    if (len < 1e-10) throw std::invalid_argument("gram_schmidt: vectors are linearly dependent");
    vectors[i] *= 1.0 / len;
  }
  return OrthonormalBasis(std::move(vectors));
}

HPoint change_basis(const HPoint& u, const OrthonormalBasis& basis) {
  require_same_dim(u.dim(), basis.dim());
  HPoint out(basis.dim());
  for (std::size_t k = 0; k < basis.dim(); ++k) out[k] = inner(u, basis[k]);
  return out;
}

HPoint from_basis(const HPoint& coords, const OrthonormalBasis& basis) {
  require_same_dim(coords.dim(), basis.dim());
  HPoint out(basis.dim());
  for (std::size_t k = 0; k < basis.dim(); ++k) out.axpy(coords[k], basis[k]);
  return out;
}

}  // namespace vecproc
