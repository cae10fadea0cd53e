#include "cosmo/poly.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <unordered_map>

#include "cosmo/canonical.hpp"

namespace cosmo {

// ---------------------------------------------------------------------------
// Kernels

namespace {

std::string kernel_key(KernelKind kind, const std::string& name, int order, const Canonical* arg) {
  char ord[16];
  std::snprintf(ord, sizeof ord, "%04d", order);
  const std::string a = arg ? arg->str() : std::string();
  switch (kind) {
    case KernelKind::Function:
      return "f:" + name + "(" + a + "):" + "0000";
    case KernelKind::Derivative:
      return "f:" + name + "(" + a + "):" + ord;
    case KernelKind::Symbol:
      return "s:" + name;
    case KernelKind::Root:
      return "r:" + std::string(ord) + ":" + a;
    case KernelKind::Log:
      return "u:ln(" + a + ")";
    case KernelKind::Sin:
      return "v:sin(" + a + ")";
    case KernelKind::Cos:
      return "v:cos(" + a + ")";
    case KernelKind::Exp:
      return "x:exp(" + a + ")";
  }
  return {};
}

class KernelTable {
 public:
  Kernel intern(KernelData data) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = table_.find(data.key);
    if (it != table_.end()) {
      if (auto live = it->second.lock()) return live;
    }
    auto k = std::make_shared<const KernelData>(std::move(data));
    table_[k->key] = k;
    if (++inserts_ % 4096 == 0) prune();
    return k;
  }

 private:
  void prune() {
    for (auto it = table_.begin(); it != table_.end();) {
      if (it->second.expired())
        it = table_.erase(it);
      else
        ++it;
    }
  }

  std::mutex mutex_;
  std::unordered_map<std::string, std::weak_ptr<const KernelData>> table_;
  std::size_t inserts_ = 0;
};

KernelTable& kernel_table() {
  static KernelTable table;
  return table;
}

}  // namespace

Kernel symbol_kernel(const std::string& name) {
  KernelData d{KernelKind::Symbol, name, 0, nullptr, kernel_key(KernelKind::Symbol, name, 0, nullptr)};
  return kernel_table().intern(std::move(d));
}

Kernel make_kernel(KernelKind kind, const std::string& name, int order, const Canonical& arg) {
  auto shared = std::make_shared<const Canonical>(arg);
  KernelData d{kind, name, order, shared, kernel_key(kind, name, order, shared.get())};
  return kernel_table().intern(std::move(d));
}

// ---------------------------------------------------------------------------
// Monomials

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      if (a[i].second != b[j].second) return a[i].second < b[j].second;
      ++i;
      ++j;
    } else if (kernel_less(a[i].first, b[j].first)) {
      return false;  // a carries a more significant variable
    } else {
      return true;
    }
  }
  return i == a.size() && j < b.size();
}

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && kernel_less(a[i].first, b[j].first))) {
      out.push_back(a[i++]);
    } else if (i == a.size() || kernel_less(b[j].first, a[i].first)) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

std::optional<Monomial> monomial_div(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0, j = 0;
  while (j < b.size()) {
    if (i == a.size()) return std::nullopt;
    if (a[i].first == b[j].first) {
      int e = a[i].second - b[j].second;
      if (e < 0) return std::nullopt;
      if (e > 0) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    } else if (kernel_less(a[i].first, b[j].first)) {
      out.push_back(a[i++]);
    } else {
      return std::nullopt;
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  return out;
}

Monomial monomial_gcd(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      out.emplace_back(a[i].first, std::min(a[i].second, b[j].second));
      ++i;
      ++j;
    } else if (kernel_less(a[i].first, b[j].first)) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

int monomial_degree(const Monomial& m, const Kernel& x) {
  for (const auto& [k, e] : m)
    if (k == x) return e;
  return 0;
}

// ---------------------------------------------------------------------------
// Poly

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::of_kernel(const Kernel& k, int exponent) {
  Poly p;
  if (exponent == 0)
    p.terms_.emplace(Monomial{}, Rational(1));
  else
    p.terms_.emplace(Monomial{{k, exponent}}, Rational(1));
  return p;
}

Poly Poly::of_monomial(const Monomial& m, const Rational& c) {
  Poly p;
  if (c != 0) p.terms_.emplace(m, c);
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Poly::constant_value() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

int Poly::degree(const Kernel& x) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, monomial_degree(m, x));
  return d;
}

Poly Poly::coefficient(const Kernel& x, int d) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    if (monomial_degree(m, x) != d) continue;
    Monomial rest;
    for (const auto& f : m)
      if (f.first != x) rest.push_back(f);
    out.add_term(rest, c);
  }
  return out;
}

std::map<int, Poly> Poly::coefficients(const Kernel& x) const {
  std::map<int, Poly> out;
  for (const auto& [m, c] : terms_) {
    int d = 0;
    Monomial rest;
    for (const auto& f : m) {
      if (f.first == x)
        d = f.second;
      else
        rest.push_back(f);
    }
    out[d].add_term(rest, c);
  }
  return out;
}

std::vector<Kernel> Poly::kernels() const {
  std::vector<Kernel> out;
  for (const auto& [m, c] : terms_)
    for (const auto& f : m) out.push_back(f.first);
  std::sort(out.begin(), out.end(), KernelLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Poly Poly::partial(const Kernel& x) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    int d = monomial_degree(m, x);
    if (d == 0) continue;
    Monomial rest;
    for (const auto& f : m) {
      if (f.first != x)
        rest.push_back(f);
      else if (d > 1)
        rest.emplace_back(x, d - 1);
    }
    out.add_term(rest, c * d);
  }
  return out;
}

Monomial Poly::monomial_content() const {
  if (terms_.empty()) return {};
  auto it = terms_.begin();
  Monomial g = it->first;
  for (++it; it != terms_.end() && !g.empty(); ++it) g = monomial_gcd(g, it->first);
  return g;
}

Poly Poly::operator+(const Poly& o) const {
  Poly out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

Poly Poly::operator-(const Poly& o) const {
  Poly out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, -c);
  return out;
}

Poly Poly::operator-() const { return scaled(Rational(-1)); }

Poly Poly::operator*(const Poly& o) const {
  Poly out;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) out.add_term(monomial_mul(ma, mb), ca * cb);
  return out;
}

Poly Poly::scaled(const Rational& c) const {
  Poly out;
  if (c == 0) return out;
  for (const auto& [m, v] : terms_) out.terms_.emplace_hint(out.terms_.end(), m, v * c);
  return out;
}

Poly Poly::times_monomial(const Monomial& mono) const {
  Poly out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(monomial_mul(m, mono), c);
  return out;
}

Poly Poly::pow(unsigned n) const {
  Poly result(Rational(1));
  Poly base = *this;
  while (n) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n) base = base * base;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Division and gcd

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  if (b.is_zero()) return std::nullopt;
  Poly rem = a;
  Poly quot;
  const Monomial& lb = b.leading_monomial();
  const Rational& cb = b.leading_coeff();
  while (!rem.is_zero()) {
    auto m = monomial_div(rem.leading_monomial(), lb);
    if (!m) return std::nullopt;
    Rational c = rem.leading_coeff() / cb;
    quot.add_term(*m, c);
    rem = rem - b.times_monomial(*m).scaled(c);
  }
  return quot;
}

Poly monic(const Poly& p) {
  if (p.is_zero()) return p;
  return p.scaled(1 / p.leading_coeff());
}

Rational rational_content(const Poly& p) {
  mpz_class num = 0, den = 1;
  for (const auto& [m, c] : p.terms()) {
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  }
  if (num == 0) return Rational(1);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

namespace {

Poly gcd_impl(Poly a, Poly b);

/// gcd of the coefficients of p viewed as a polynomial in x.
Poly content_in(const Poly& p, const Kernel& x) {
  auto coeffs = p.coefficients(x);
  Poly g;
  for (auto& [d, c] : coeffs) {
    g = g.is_zero() ? monic(c) : gcd_impl(g, c);
    if (g.is_constant()) return Poly(Rational(1));
  }
  return g;
}

Poly primitive_part(const Poly& p, const Kernel& x) {
  Poly c = content_in(p, x);
  if (c.is_constant()) return p;
  return *divide_exact(p, c);
}

Poly pseudo_remainder(Poly r, const Poly& b, const Kernel& x) {
  const int m = b.degree(x);
  const Poly lb = b.coefficient(x, m);
  int dr = r.degree(x);
  while (!r.is_zero() && dr >= m) {
    Poly lr = r.coefficient(x, dr);
    Poly shifted = dr > m ? (lr * b).times_monomial(Monomial{{x, dr - m}}) : lr * b;
    r = lb * r - shifted;
    dr = r.degree(x);
  }
  return r;
}

Poly gcd_impl(Poly a, Poly b) {
  if (a.is_zero()) return monic(b);
  if (b.is_zero()) return monic(a);
  if (a.is_constant() || b.is_constant()) return Poly(Rational(1));
  if (a == b) return monic(a);

  Monomial ma = a.monomial_content();
  Monomial mb = b.monomial_content();
  Monomial mg = monomial_gcd(ma, mb);
  if (a.is_single_term() || b.is_single_term()) return Poly::of_monomial(mg, Rational(1));
  if (!ma.empty()) a = *divide_exact(a, Poly::of_monomial(ma, Rational(1)));
  if (!mb.empty()) b = *divide_exact(b, Poly::of_monomial(mb, Rational(1)));
  Poly mono = Poly::of_monomial(mg, Rational(1));

  // Variables present in only one argument can only enter through the content.
  {
    auto ka = a.kernels();
    auto kb = b.kernels();
    for (const auto& x : ka)
      if (!std::binary_search(kb.begin(), kb.end(), x, KernelLess{}))
        return monic(mono * gcd_impl(content_in(a, x), b));
    for (const auto& x : kb)
      if (!std::binary_search(ka.begin(), ka.end(), x, KernelLess{}))
        return monic(mono * gcd_impl(a, content_in(b, x)));
  }

  if (b.size() <= a.size()) {
    if (divide_exact(a, b)) return monic(mono * b);
  } else if (divide_exact(b, a)) {
    return monic(mono * a);
  }

  // Main variable: the common kernel of lowest degree.
  auto ks = a.kernels();
  Kernel x = ks.front();
  int best = 1 << 30;
  for (const auto& k : ks) {
    int d = std::max(a.degree(k), b.degree(k));
    if (d < best) {
      best = d;
      x = k;
    }
  }

  Poly ca = content_in(a, x);
  Poly cb = content_in(b, x);
  Poly pa = ca.is_constant() ? a : *divide_exact(a, ca);
  Poly pb = cb.is_constant() ? b : *divide_exact(b, cb);
  Poly c = gcd_impl(ca, cb);

  if (pa.degree(x) < pb.degree(x)) std::swap(pa, pb);
  while (!pb.is_zero()) {
    Poly r = pseudo_remainder(pa, pb, x);
    pa = std::move(pb);
    pb = r.is_zero() ? r : primitive_part(r, x);
    if (!pb.is_zero() && pb.degree(x) == 0) {
      pa = Poly(Rational(1));
      break;
    }
  }
  Poly g = pa.degree(x) == 0 ? Poly(Rational(1)) : primitive_part(pa, x);
  return monic(mono * c * g);
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) { return gcd_impl(a, b); }

}  // namespace cosmo
