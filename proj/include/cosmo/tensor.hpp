#pragma once

#include <array>
#include <initializer_list>
#include <string>
#include <vector>

#include "cosmo/canonical.hpp"
#include "cosmo/expr.hpp"

namespace cosmo {

constexpr int kDim = 4;

enum class Valence { Up, Down };

/// Dense component array over {0..3}^rank; components are kept in canonical form.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::string name, std::vector<Valence> valence);

  const std::string& name() const { return name_; }
  int rank() const { return static_cast<int>(valence_.size()); }
  const std::vector<Valence>& valence() const { return valence_; }
  const std::vector<Canonical>& components() const { return comps_; }

  const Canonical& at(std::initializer_list<int> idx) const { return comps_[offset(idx)]; }
  Canonical& at(std::initializer_list<int> idx) { return comps_[offset(idx)]; }
  const Canonical& at(const std::vector<int>& idx) const { return comps_[offset(idx)]; }
  Canonical& at(const std::vector<int>& idx) { return comps_[offset(idx)]; }
  const Canonical& flat(std::size_t i) const { return comps_[i]; }
  Canonical& flat(std::size_t i) { return comps_[i]; }
  Expr expr(std::initializer_list<int> idx) const { return at(idx).to_expr(); }
  /// Multi-index of a flat position.
  std::vector<int> index_of(std::size_t flat) const;

  /// True when every component is zero in canonical form.
  bool is_zero() const;
  Tensor operator+(const Tensor& o) const;
  Tensor operator-(const Tensor& o) const;
  Tensor scaled(const Canonical& c) const;
  Tensor renamed(std::string name) const;
  /// Swaps the two slots of a rank-2 tensor.
  Tensor transposed() const;

 private:
  template <class Seq>
  std::size_t offset(const Seq& idx) const {
    std::size_t o = 0;
    for (int i : idx) o = o * kDim + static_cast<std::size_t>(i);
    return o;
  }

  std::string name_;
  std::vector<Valence> valence_;
  std::vector<Canonical> comps_;
};

/// Symmetric 4x4 metric with cached inverse and determinant.
class Metric {
 public:
  /// Throws DomainError when the metric is not symmetric or det is zero.
  Metric(std::array<std::string, kDim> coords, const std::array<std::array<Expr, kDim>, kDim>& g);

  /// FRW line element in (t, r, theta, varphi) with scale factor R(t).
  static Metric frw(const Expr& c = Expr::symbol("c"), const Expr& k = Expr::symbol("k"),
                    const std::string& scale_factor = "R");
  /// diag(-c^2, 1, 1, 1) in Cartesian (t, x, y, z).
  static Metric minkowski(const Expr& c = Expr::symbol("c"));
  static Metric diagonal(std::array<std::string, kDim> coords, const std::array<Expr, kDim>& diag);

  const std::array<std::string, kDim>& coords() const { return coords_; }
  const Kernel& coord(int i) const { return coord_kernels_[static_cast<std::size_t>(i)]; }
  const Tensor& g() const { return g_; }
  const Tensor& inverse() const { return ginv_; }
  const Canonical& det() const { return det_; }
  const Canonical& g(int i, int j) const { return g_.at({i, j}); }
  const Canonical& ginv(int i, int j) const { return ginv_.at({i, j}); }
  /// Partial derivative along coordinate i.
  Canonical d(const Canonical& f, int i) const { return f.derivative(coord(i)); }

 private:
  std::array<std::string, kDim> coords_;
  std::array<Kernel, kDim> coord_kernels_;
  Tensor g_;
  Tensor ginv_;
  Canonical det_;
};

/// Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_bd - d_d g_bc).
Tensor christoffel(const Metric& g);
/// R_ij = d_a Gamma^a_ij - d_j Gamma^a_ia + Gamma^a_ab Gamma^b_ij - Gamma^a_ib Gamma^b_aj.
Tensor ricci_tensor(const Metric& g);
Tensor ricci_tensor(const Metric& g, const Tensor& gamma);
Canonical ricci_scalar(const Metric& g, const Tensor& ricci);
Canonical ricci_scalar(const Metric& g);
/// G_ij = R_ij - 1/2 g_ij R + lambda g_ij.
Tensor einstein_tensor(const Metric& g, const Canonical& lambda = Canonical());

/// Throws UnsupportedError for a bad slot or valence.
Tensor raise_index(const Tensor& t, int slot, const Metric& g);
Tensor lower_index(const Tensor& t, int slot, const Metric& g);

/// Covariant divergence of a rank-2 tensor over `slot` (raised first when
/// down); the result carries the valence of the other slot.
Tensor covariant_divergence(const Tensor& t, const Metric& g, int slot = 1);
Tensor covariant_divergence(const Tensor& t, const Metric& g, const Tensor& gamma, int slot = 1);
/// nabla_k g_ij as a (down, down, down) tensor indexed [k][i][j].
Tensor metric_covariant_derivative(const Metric& g, const Tensor& gamma);
/// Scalar d'Alembertian (1/sqrt|g|) d_i(sqrt|g| g^ij d_j f).
Canonical box_scalar(const Canonical& f, const Metric& g);

/// Product g^{ij} a_i b_j of two covector component lists.
Canonical contract_covectors(const Metric& g, const std::array<Canonical, kDim>& a,
                             const std::array<Canonical, kDim>& b);

}  // namespace cosmo
