#include "cosmo/tensor.hpp"

#include <utility>

#include "cosmo/errors.hpp"

namespace cosmo {

namespace {

std::size_t ipow4(int rank) {
  std::size_t n = 1;
  for (int i = 0; i < rank; ++i) n *= kDim;
  return n;
}

}  // namespace

Tensor::Tensor(std::string name, std::vector<Valence> valence)
    : name_(std::move(name)), valence_(std::move(valence)), comps_(ipow4(rank())) {
  if (rank() > 4) throw UnsupportedError("tensor rank above 4");
}

std::vector<int> Tensor::index_of(std::size_t flat) const {
  std::vector<int> idx(valence_.size());
  for (int s = rank() - 1; s >= 0; --s) {
    idx[static_cast<std::size_t>(s)] = static_cast<int>(flat % kDim);
    flat /= kDim;
  }
  return idx;
}

bool Tensor::is_zero() const {
  for (const auto& c : comps_)
    if (!c.is_zero()) return false;
  return true;
}

Tensor Tensor::operator+(const Tensor& o) const {
  if (valence_ != o.valence_) throw UnsupportedError("tensor valence mismatch");
  Tensor out(name_, valence_);
  for (std::size_t i = 0; i < comps_.size(); ++i) out.comps_[i] = comps_[i] + o.comps_[i];
  return out;
}

Tensor Tensor::operator-(const Tensor& o) const {
  if (valence_ != o.valence_) throw UnsupportedError("tensor valence mismatch");
  Tensor out(name_, valence_);
  for (std::size_t i = 0; i < comps_.size(); ++i) out.comps_[i] = comps_[i] - o.comps_[i];
  return out;
}

Tensor Tensor::scaled(const Canonical& c) const {
  Tensor out(name_, valence_);
  for (std::size_t i = 0; i < comps_.size(); ++i) out.comps_[i] = comps_[i] * c;
  return out;
}

Tensor Tensor::renamed(std::string name) const {
  Tensor out = *this;
  out.name_ = std::move(name);
  return out;
}

Tensor Tensor::transposed() const {
  if (rank() != 2) throw UnsupportedError("transpose needs a rank-2 tensor");
  Tensor out(name_, {valence_[1], valence_[0]});
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out.at({i, j}) = at({j, i});
  return out;
}

// ---------------------------------------------------------------------------

Metric::Metric(std::array<std::string, kDim> coords, const std::array<std::array<Expr, kDim>, kDim>& g)
    : coords_(std::move(coords)), g_("g", {Valence::Down, Valence::Down}), ginv_("ginv", {Valence::Up, Valence::Up}) {
  for (int i = 0; i < kDim; ++i) coord_kernels_[static_cast<std::size_t>(i)] = symbol_kernel(coords_[static_cast<std::size_t>(i)]);
  bool diagonal = true;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      g_.at({i, j}) = Canonical::of(g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      if (i != j && !g_.at({i, j}).is_zero()) diagonal = false;
    }
  for (int i = 0; i < kDim; ++i)
    for (int j = i + 1; j < kDim; ++j)
      if (g_.at({i, j}) != g_.at({j, i})) throw DomainError("metric is not symmetric");

  if (diagonal) {
    det_ = Canonical(1);
    for (int i = 0; i < kDim; ++i) {
      if (g_.at({i, i}).is_zero()) throw DomainError("metric is degenerate");
      det_ = det_ * g_.at({i, i});
      ginv_.at({i, i}) = g_.at({i, i}).inverse();
    }
    return;
  }
  // Gauss-Jordan on [g | I].
  std::array<std::array<Canonical, 2 * kDim>, kDim> m;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      m[i][j] = g_.at({i, j});
      m[i][j + kDim] = Canonical(i == j ? 1 : 0);
    }
  det_ = Canonical(1);
  for (int col = 0; col < kDim; ++col) {
    int pivot = col;
    while (pivot < kDim && m[pivot][col].is_zero()) ++pivot;
    if (pivot == kDim) throw DomainError("metric is degenerate");
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det_ = -det_;
    }
    det_ = det_ * m[col][col];
    Canonical inv = m[col][col].inverse();
    for (auto& x : m[col]) x = x * inv;
    for (int r = 0; r < kDim; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      Canonical f = m[r][col];
      for (int j = 0; j < 2 * kDim; ++j) m[r][j] = m[r][j] - f * m[col][j];
    }
  }
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) ginv_.at({i, j}) = m[i][j + kDim];
}

Metric Metric::diagonal(std::array<std::string, kDim> coords, const std::array<Expr, kDim>& diag) {
  std::array<std::array<Expr, kDim>, kDim> g;
  for (std::size_t i = 0; i < kDim; ++i) g[i][i] = diag[i];
  return Metric(std::move(coords), g);
}

Metric Metric::frw(const Expr& c, const Expr& k, const std::string& scale_factor) {
  Expr t = sym("t"), r = sym("r"), theta = sym("theta");
  Expr R = fn(scale_factor, t);
  return diagonal({"t", "r", "theta", "varphi"},
                  {-(c * c), R * R / (1 - k * r * r), R * R * r * r, R * R * r * r * Expr::sin(theta) * Expr::sin(theta)});
}

Metric Metric::minkowski(const Expr& c) { return diagonal({"t", "x", "y", "z"}, {-(c * c), 1, 1, 1}); }

// ---------------------------------------------------------------------------

Tensor christoffel(const Metric& g) {
  // dg[c][a][b] = d_c g_ab
  std::array<std::array<std::array<Canonical, kDim>, kDim>, kDim> dg;
  for (int c = 0; c < kDim; ++c)
    for (int a = 0; a < kDim; ++a)
      for (int b = a; b < kDim; ++b) {
        dg[c][a][b] = g.d(g.g(a, b), c);
        dg[c][b][a] = dg[c][a][b];
      }
  Tensor gamma("Gamma", {Valence::Up, Valence::Down, Valence::Down});
  for (int b = 0; b < kDim; ++b)
    for (int c = b; c < kDim; ++c) {
      std::array<Canonical, kDim> lowered;  // Gamma_{d b c}
      for (int d = 0; d < kDim; ++d) lowered[d] = dg[b][d][c] + dg[c][b][d] - dg[d][b][c];
      for (int a = 0; a < kDim; ++a) {
        Canonical s;
        for (int d = 0; d < kDim; ++d) {
          if (g.ginv(a, d).is_zero() || lowered[d].is_zero()) continue;
          s = s + g.ginv(a, d) * lowered[d];
        }
        s = s * Canonical(Rational(1, 2));
        gamma.at({a, b, c}) = s;
        gamma.at({a, c, b}) = s;
      }
    }
  return gamma;
}

Tensor ricci_tensor(const Metric& g, const Tensor& gamma) {
  Tensor ric("Ric", {Valence::Down, Valence::Down});
  std::array<Canonical, kDim> trace;  // Gamma^a_{ia}
  for (int i = 0; i < kDim; ++i)
    for (int a = 0; a < kDim; ++a) trace[i] = trace[i] + gamma.at({a, i, a});
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) {
      Canonical s;
      for (int a = 0; a < kDim; ++a) s = s + g.d(gamma.at({a, i, j}), a);
      s = s - g.d(trace[i], j);
      for (int b = 0; b < kDim; ++b) {
        if (!trace[b].is_zero() && !gamma.at({b, i, j}).is_zero()) s = s + trace[b] * gamma.at({b, i, j});
        for (int a = 0; a < kDim; ++a) {
          const Canonical& x = gamma.at({a, i, b});
          const Canonical& y = gamma.at({b, a, j});
          if (!x.is_zero() && !y.is_zero()) s = s - x * y;
        }
      }
      ric.at({i, j}) = s;
      ric.at({j, i}) = s;
    }
  return ric;
}

Tensor ricci_tensor(const Metric& g) { return ricci_tensor(g, christoffel(g)); }

Canonical ricci_scalar(const Metric& g, const Tensor& ricci) {
  Canonical s;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      if (!g.ginv(i, j).is_zero()) s = s + g.ginv(i, j) * ricci.at({i, j});
  return s;
}

Canonical ricci_scalar(const Metric& g) { return ricci_scalar(g, ricci_tensor(g)); }

Tensor einstein_tensor(const Metric& g, const Canonical& lambda) {
  Tensor ric = ricci_tensor(g);
  Canonical scalar = ricci_scalar(g, ric);
  Canonical coeff = lambda - scalar * Canonical(Rational(1, 2));
  Tensor out("G", {Valence::Down, Valence::Down});
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out.at({i, j}) = ric.at({i, j}) + g.g(i, j) * coeff;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Tensor move_index(const Tensor& t, int slot, const Metric& g, Valence from) {
  if (slot < 0 || slot >= t.rank()) throw UnsupportedError("slot out of range");
  if (t.valence()[static_cast<std::size_t>(slot)] != from) throw UnsupportedError("wrong valence for index operation");
  std::vector<Valence> val = t.valence();
  val[static_cast<std::size_t>(slot)] = from == Valence::Down ? Valence::Up : Valence::Down;
  Tensor out(t.name(), val);
  const Tensor& m = from == Valence::Down ? g.inverse() : g.g();
  for (std::size_t f = 0; f < out.components().size(); ++f) {
    std::vector<int> idx = out.index_of(f);
    int a = idx[static_cast<std::size_t>(slot)];
    Canonical s;
    for (int b = 0; b < kDim; ++b) {
      const Canonical& mab = m.at({a, b});
      if (mab.is_zero()) continue;
      idx[static_cast<std::size_t>(slot)] = b;
      s = s + mab * t.at(idx);
    }
    out.flat(f) = s;
  }
  return out;
}

}  // namespace

Tensor raise_index(const Tensor& t, int slot, const Metric& g) { return move_index(t, slot, g, Valence::Down); }
Tensor lower_index(const Tensor& t, int slot, const Metric& g) { return move_index(t, slot, g, Valence::Up); }

Tensor covariant_divergence(const Tensor& t, const Metric& g, const Tensor& gamma, int slot) {
  if (t.rank() != 2) throw UnsupportedError("covariant divergence needs a rank-2 tensor");
  if (slot != 0 && slot != 1) throw UnsupportedError("slot out of range");
  Tensor m = slot == 0 ? t.transposed() : t;
  if (m.valence()[1] == Valence::Down) m = raise_index(m, 1, g);
  Valence other = m.valence()[0];
  Tensor out("div", {other});
  std::array<Canonical, kDim> trace;  // Gamma^j_{jk}
  for (int k = 0; k < kDim; ++k)
    for (int j = 0; j < kDim; ++j) trace[k] = trace[k] + gamma.at({j, j, k});
  for (int i = 0; i < kDim; ++i) {
    Canonical s;
    for (int j = 0; j < kDim; ++j) s = s + g.d(m.at({i, j}), j);
    for (int k = 0; k < kDim; ++k) {
      if (!trace[k].is_zero()) s = s + trace[k] * m.at({i, k});
      for (int j = 0; j < kDim; ++j) {
        if (other == Valence::Down) {
          const Canonical& c = gamma.at({k, j, i});
          if (!c.is_zero()) s = s - c * m.at({k, j});
        } else {
          const Canonical& c = gamma.at({i, j, k});
          if (!c.is_zero()) s = s + c * m.at({k, j});
        }
      }
    }
    out.at({i}) = s;
  }
  return out;
}

Tensor covariant_divergence(const Tensor& t, const Metric& g, int slot) {
  return covariant_divergence(t, g, christoffel(g), slot);
}

Tensor metric_covariant_derivative(const Metric& g, const Tensor& gamma) {
  Tensor out("nabla_g", {Valence::Down, Valence::Down, Valence::Down});
  for (int k = 0; k < kDim; ++k)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        Canonical s = g.d(g.g(i, j), k);
        for (int l = 0; l < kDim; ++l) {
          if (!gamma.at({l, k, i}).is_zero()) s = s - gamma.at({l, k, i}) * g.g(l, j);
          if (!gamma.at({l, k, j}).is_zero()) s = s - gamma.at({l, k, j}) * g.g(i, l);
        }
        out.at({k, i, j}) = s;
      }
  return out;
}

// sqrt|g| enters only through d_i sqrt|g| / sqrt|g| = d_i det / (2 det).
Canonical box_scalar(const Canonical& f, const Metric& g) {
  std::array<Canonical, kDim> df;
  for (int j = 0; j < kDim; ++j) df[j] = g.d(f, j);
  Canonical s;
  Canonical two_det = g.det() * Canonical(2);
  for (int i = 0; i < kDim; ++i) {
    Canonical x;
    for (int j = 0; j < kDim; ++j)
      if (!g.ginv(i, j).is_zero() && !df[j].is_zero()) x = x + g.ginv(i, j) * df[j];
    if (x.is_zero()) continue;
    s = s + g.d(x, i) + x * g.d(g.det(), i) / two_det;
  }
  return s;
}

Canonical contract_covectors(const Metric& g, const std::array<Canonical, kDim>& a,
                             const std::array<Canonical, kDim>& b) {
  Canonical s;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      if (!g.ginv(i, j).is_zero() && !a[i].is_zero() && !b[j].is_zero()) s = s + g.ginv(i, j) * a[i] * b[j];
  return s;
}

}  // namespace cosmo
