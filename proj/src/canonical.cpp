#include "cosmo/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "cosmo/errors.hpp"

namespace cosmo {

namespace {

Rational floor_q(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

long to_long(const Rational& integral) {
  if (!integral.get_num().fits_slong_p()) throw UnsupportedError("exponent too large");
  return integral.get_num().get_si();
}

Poly unit_monomial(const Monomial& m) { return Poly::of_monomial(m, Rational(1)); }

// Apply sin^2 = 1 - cos^2 and root^n = radicand until no reducible power is left.
Poly reduce_relations(const Poly& p) {
  Poly cur = p;
  for (int pass = 0; pass < 32; ++pass) {
    bool changed = false;
    Poly out;
    for (const auto& [m, c] : cur.terms()) {
      bool needs = false;
      for (const auto& [k, e] : m) {
        if ((k->kind == KernelKind::Sin && e >= 2) || (k->kind == KernelKind::Root && e >= k->order))
          needs = true;
      }
      if (!needs) {
        out.add_term(m, c);
        continue;
      }
      changed = true;
      Poly factor(c);
      Monomial rest;
      for (const auto& [k, e] : m) {
        if (k->kind == KernelKind::Sin && e >= 2) {
          Kernel cosk = make_kernel(KernelKind::Cos, "", 0, *k->arg);
          Poly one_minus = Poly(Rational(1)) - Poly::of_kernel(cosk, 2);
          factor = factor * one_minus.pow(static_cast<unsigned>(e / 2));
          if (e % 2) rest.emplace_back(k, 1);
        } else if (k->kind == KernelKind::Root && e >= k->order) {
          factor = factor * k->arg->num().pow(static_cast<unsigned>(e / k->order));
          if (e % k->order) rest.emplace_back(k, e % k->order);
        } else {
          rest.emplace_back(k, e);
        }
      }
      Poly expanded = factor.times_monomial(rest);
      for (const auto& [mm, cc] : expanded.terms()) out.add_term(mm, cc);
    }
    cur = std::move(out);
    if (!changed) break;
  }
  return cur;
}

// Clears sin and square-root kernels from the denominator by conjugates.
void rationalize(Poly& num, Poly& den) {
  std::set<Kernel, KernelLess> skip;
  for (int iter = 0; iter < 64; ++iter) {
    Kernel y;
    for (const auto& k : den.kernels()) {
      if ((k->kind == KernelKind::Sin || k->kind == KernelKind::Root) && !skip.count(k)) {
        y = k;
        break;
      }
    }
    if (!y) return;
    if (y->kind == KernelKind::Sin || y->order == 2) {
      Poly d0 = den.coefficient(y, 0);
      Poly d1 = den.coefficient(y, 1);
      Poly conj = d0 - d1 * Poly::of_kernel(y);
      num = reduce_relations(num * conj);
      den = reduce_relations(den * conj);
    } else {
      auto cs = den.coefficients(y);
      if (cs.size() != 1) {
        skip.insert(y);
        continue;
      }
      int j = cs.begin()->first;
      Poly lift = Poly::of_kernel(y, y->order - j);
      num = reduce_relations(num * lift);
      den = reduce_relations(den * lift);
    }
  }
}

// Roots of one radicand, the indices in use and the exponents seen.
struct RootGroup {
  std::shared_ptr<const Canonical> radicand;
  std::set<int> indices;
  std::vector<int> exponents;
};

std::vector<RootGroup> root_groups(std::initializer_list<const Poly*> polys) {
  std::vector<RootGroup> groups;
  for (const Poly* p : polys)
    for (const auto& [m, c] : p->terms())
      for (const auto& [k, e] : m) {
        if (k->kind != KernelKind::Root) continue;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const RootGroup& g) { return *g.radicand == *k->arg; });
        if (it == groups.end()) it = groups.insert(groups.end(), RootGroup{k->arg, {}, {}});
        it->indices.insert(k->order);
        it->exponents.push_back(e);
      }
  return groups;
}

// Rewrites every Root kernel of `radicand` as a power of the index-`to` root.
Poly reindex_roots(const Poly& p, const Canonical& radicand, int to) {
  Kernel target;
  Poly out;
  for (const auto& [m, c] : p.terms()) {
    Monomial rest;
    int lifted = 0;
    for (const auto& [k, e] : m) {
      if (k->kind == KernelKind::Root && *k->arg == radicand) {
        lifted += e * to / k->order;
      } else {
        rest.emplace_back(k, e);
      }
    }
    if (lifted && !target) target = make_kernel(KernelKind::Root, "", to, radicand);
    Monomial mm = lifted ? monomial_mul(rest, Monomial{{target, lifted}}) : rest;
    out.add_term(mm, c);
  }
  return out;
}

// Brings all roots of one radicand to a common index (the lcm).
void unify_root_indices(Poly& num, Poly& den) {
  bool changed = false;
  for (const RootGroup& g : root_groups({&num, &den})) {
    if (g.indices.size() < 2) continue;
    int L = 1;
    for (int n : g.indices) L = std::lcm(L, n);
    num = reindex_roots(num, *g.radicand, L);
    den = reindex_roots(den, *g.radicand, L);
    changed = true;
  }
  if (changed) {
    num = reduce_relations(num);
    den = reduce_relations(den);
  }
}

// Lowers each root index by the gcd of the exponents it carries, so that
// x^(3/6) and x^(1/2) share a representation.
void lower_root_indices(Poly& num, Poly& den) {
  for (const RootGroup& g : root_groups({&num, &den})) {
    int n = *g.indices.begin();
    int d = n;
    for (int e : g.exponents) d = std::gcd(d, e);
    if (d <= 1 || d == n) continue;
    num = reindex_roots(num, *g.radicand, n / d);
    den = reindex_roots(den, *g.radicand, n / d);
  }
}

// Exp kernels and roots of them are units. Num and den are shifted by the
// common power of each exp(m) (counting exp(m)^(1/n) as 1/n), so that the
// representation does not depend on which unit was cleared last.
void strip_exp_content(Poly& num, Poly& den) {
  struct Family {
    Kernel exp;
    Kernel root;
    int index = 1;
  };
  std::vector<Family> families;
  auto family_of = [&](const Kernel& k) -> Family* {
    Kernel e;
    if (k->kind == KernelKind::Exp)
      e = k;
    else if (k->kind == KernelKind::Root && k->arg->den().is_constant() && k->arg->num().is_single_term() &&
             k->arg->num().leading_coeff() == 1 && k->arg->num().leading_monomial().size() == 1 &&
             k->arg->num().leading_monomial().front().second == 1 &&
             k->arg->num().leading_monomial().front().first->kind == KernelKind::Exp)
      e = k->arg->num().leading_monomial().front().first;
    else
      return nullptr;
    auto it = std::find_if(families.begin(), families.end(), [&](const Family& f) { return f.exp == e; });
    if (it == families.end()) it = families.insert(families.end(), Family{e, nullptr, 1});
    if (k->kind == KernelKind::Root) {
      if (it->root && it->root != k) return nullptr;
      it->root = k;
      it->index = k->order;
    }
    return &*it;
  };
  for (const Poly* p : {&num, &den})
    for (const auto& [m, c] : p->terms())
      for (const auto& f : m) family_of(f.first);
  if (families.empty()) return;
  for (const Family& fam : families) {
    // Mixed root indices are left to unify_root_indices.
    bool mixed = false;
    for (const Poly* p : {&num, &den})
      for (const auto& [m, c] : p->terms())
        for (const auto& [k, e] : m)
          if (k->kind == KernelKind::Root && k != fam.root && k->arg->num().is_single_term() &&
              k->arg->num().leading_monomial().size() == 1 && k->arg->num().leading_monomial().front().first == fam.exp)
            mixed = true;
    if (mixed) continue;
    auto weight = [&](const Monomial& m) {
      long w = 0;
      for (const auto& [k, e] : m) {
        if (k == fam.exp) w += static_cast<long>(e) * fam.index;
        if (fam.root && k == fam.root) w += e;
      }
      return w;
    };
    long low = -1;
    for (const Poly* p : {&num, &den})
      for (const auto& [m, c] : p->terms()) {
        long w = weight(m);
        low = low < 0 ? w : std::min(low, w);
      }
    if (low <= 0) continue;
    Kernel root = fam.root;
    if (!root && low % fam.index != 0) continue;
    auto shift = [&](const Poly& p) {
      Poly out;
      for (const auto& [m, c] : p.terms()) {
        long w = weight(m) - low;
        Monomial rest;
        for (const auto& f : m)
          if (f.first != fam.exp && f.first != root) rest.push_back(f);
        Monomial add;
        if (w / fam.index) add.emplace_back(fam.exp, static_cast<int>(w / fam.index));
        if (w % fam.index) add.emplace_back(root, static_cast<int>(w % fam.index));
        std::sort(add.begin(), add.end(), [](const auto& a, const auto& b) { return kernel_less(a.first, b.first); });
        out.add_term(monomial_mul(rest, add), c);
      }
      return out;
    };
    num = shift(num);
    den = shift(den);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction and normalization

Canonical Canonical::fraction(const Poly& num_in, const Poly& den_in) {
  if (den_in.is_zero()) throw DomainError("division by zero");
  Canonical out;
  if (num_in.is_zero()) return out;
  Poly num = reduce_relations(num_in);
  Poly den = reduce_relations(den_in);
  unify_root_indices(num, den);
  if (den.is_zero()) throw DomainError("division by zero");
  rationalize(num, den);
  if (den.is_zero()) throw DomainError("division by zero");
  if (num.is_zero()) return out;
  if (!den.is_constant()) {
    Poly g = gcd(num, den);
    if (!g.is_constant()) {
      num = *divide_exact(num, g);
      den = *divide_exact(den, g);
    }
  }
  strip_exp_content(num, den);
  lower_root_indices(num, den);
  Rational lc = den.leading_coeff();
  if (lc != 1) {
    num = num.scaled(1 / lc);
    den = den.scaled(1 / lc);
  }
  out.num_ = std::move(num);
  out.den_ = std::move(den);
  return out;
}

Canonical Canonical::of_poly(const Poly& p) {
  Canonical out;
  Poly num = reduce_relations(p);
  Poly den(Rational(1));
  unify_root_indices(num, den);
  lower_root_indices(num, den);
  out.num_ = std::move(num);
  return out;
}

Canonical Canonical::of_kernel(const Kernel& k, int exponent) {
  if (exponent >= 0) return of_poly(Poly::of_kernel(k, exponent));
  return fraction(Poly(Rational(1)), Poly::of_kernel(k, -exponent));
}

std::optional<Rational> Canonical::constant_value() const {
  if (!is_constant()) return std::nullopt;
  return num_.constant_value() / den_.constant_value();
}

int Canonical::leading_sign() const {
  if (num_.is_zero()) return 0;
  return sgn(num_.leading_coeff());
}

// ---------------------------------------------------------------------------
// Arithmetic

Canonical Canonical::operator+(const Canonical& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  if (den_ == o.den_) {
    if (den_.is_constant()) return of_poly(num_ + o.num_);
    return fraction(num_ + o.num_, den_);
  }
  Poly g = gcd(den_, o.den_);
  if (g.is_constant()) return fraction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  Poly d1 = *divide_exact(den_, g);
  Poly d2 = *divide_exact(o.den_, g);
  return fraction(num_ * d2 + o.num_ * d1, d1 * o.den_);
}

Canonical Canonical::operator-() const {
  Canonical out = *this;
  out.num_ = -num_;
  return out;
}

Canonical Canonical::operator-(const Canonical& o) const { return *this + (-o); }

Canonical Canonical::operator*(const Canonical& o) const {
  if (is_zero() || o.is_zero()) return Canonical();
  if (den_.is_constant() && o.den_.is_constant()) return of_poly(num_ * o.num_);
  if (auto c = o.constant_value()) {
    Canonical out = *this;
    out.num_ = num_.scaled(*c);
    return out;
  }
  if (auto c = constant_value()) {
    Canonical out = o;
    out.num_ = o.num_.scaled(*c);
    return out;
  }
  return fraction(num_ * o.num_, den_ * o.den_);
}

Canonical Canonical::inverse() const {
  if (is_zero()) throw DomainError("division by zero");
  return fraction(den_, num_);
}

Canonical Canonical::operator/(const Canonical& o) const {
  if (o.is_zero()) throw DomainError("division by zero");
  return *this * o.inverse();
}

Canonical Canonical::pow(long n) const {
  if (n == 0) return Canonical(1);
  if (n < 0) return inverse().pow(-n);
  if (n == 1) return *this;
  Canonical result(1);
  Canonical base = *this;
  unsigned long e = static_cast<unsigned long>(n);
  while (e) {
    if (e & 1ul) result = result * base;
    e >>= 1ul;
    if (e) base = base * base;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Rational powers

namespace {

Canonical pow_kernel(const Kernel& k, const Rational& r);
Canonical pow_poly(const Poly& p, const Rational& q);

std::map<mpz_class, int> factor_integer(mpz_class n) {
  std::map<mpz_class, int> out;
  if (n <= 1) return out;
  for (unsigned long p = 2; p < 100000; p += (p == 2 ? 1 : 2)) {
    if (mpz_cmp_ui(n.get_mpz_t(), p * p) < 0) break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
      ++out[mpz_class(p)];
    }
  }
  if (n > 1) ++out[n];
  return out;
}

Canonical root_of(const Canonical& radicand, const Rational& frac) {
  // frac in (0, 1)
  Kernel root = make_kernel(KernelKind::Root, "", static_cast<int>(frac.get_den().get_si()), radicand);
  return Canonical::of_kernel(root, static_cast<int>(frac.get_num().get_si()));
}

// c^q for a positive rational c.
Canonical pow_positive_number(const Rational& c, const Rational& q) {
  Rational plain = 1;
  Canonical roots(1);
  auto account = [&](const std::map<mpz_class, int>& fs, int sign) {
    for (const auto& [p, e] : fs) {
      Rational total = q * e * sign;
      Rational n = floor_q(total);
      Rational f = total - n;
      long ni = to_long(n);
      Rational pp(p);
      Rational pn = 1;
      for (long i = 0; i < std::labs(ni); ++i) pn *= pp;
      plain *= ni >= 0 ? pn : 1 / pn;
      if (f != 0) roots = roots * root_of(Canonical(pp), f);
    }
  };
  account(factor_integer(c.get_num()), 1);
  account(factor_integer(c.get_den()), -1);
  return Canonical(plain) * roots;
}

// p^q for a polynomial p treated as an indivisible radicand.
Canonical pow_composite(const Poly& p, const Rational& q) {
  Rational n = floor_q(q);
  Rational f = q - n;
  Canonical out = Canonical::of_poly(p).pow(to_long(n));
  if (f != 0) out = out * root_of(Canonical::of_poly(p), f);
  return out;
}

Canonical pow_kernel(const Kernel& k, const Rational& r) {
  if (r.get_den() == 1) return Canonical::of_kernel(k, static_cast<int>(to_long(r)));
  if (k->kind == KernelKind::Root) return pow_poly(k->arg->num(), r / k->order);
  Rational n = floor_q(r);
  Rational f = r - n;
  return Canonical::of_kernel(k, static_cast<int>(to_long(n))) * root_of(Canonical::of_kernel(k), f);
}

Canonical pow_poly(const Poly& p, const Rational& q) {
  if (p.is_zero()) {
    if (q > 0) return Canonical();
    throw DomainError("division by zero");
  }
  if (p.is_single_term()) {
    const auto& [m, c] = *p.terms().begin();
    if (c < 0) {
      if (q.get_den() % 2 == 1) {
        Canonical mag = pow_poly(Poly::of_monomial(m, -c), q);
        return q.get_num() % 2 == 0 ? mag : -mag;
      }
      Canonical out = pow_positive_number(-c, q);
      return out * pow_composite(Poly::of_monomial(m, Rational(-1)), q);
    }
    Canonical out = pow_positive_number(c, q);
    for (const auto& [k, e] : m) out = out * pow_kernel(k, q * e);
    return out;
  }
  Rational cont = rational_content(p);
  Monomial mc = p.monomial_content();
  Poly rest = p.scaled(1 / cont);
  if (!mc.empty()) rest = *divide_exact(rest, unit_monomial(mc));
  Canonical out = pow_positive_number(cont, q);
  for (const auto& [k, e] : mc) out = out * pow_kernel(k, q * e);
  return out * pow_composite(rest, q);
}

}  // namespace

Canonical Canonical::pow(const Rational& q) const {
  if (q.get_den() == 1) return pow(to_long(q));
  if (is_zero()) {
    if (q > 0) return Canonical();
    throw DomainError("division by zero");
  }
  Canonical top = pow_poly(num_, q);
  if (den_.is_constant() && den_.constant_value() == 1) return top;
  return top / pow_poly(den_, q);
}

// ---------------------------------------------------------------------------
// Elementary functions

namespace {

const Kernel& exp_one() {
  static const Kernel k = make_kernel(KernelKind::Exp, "", 0, Canonical(1));
  return k;
}

/// Splits a/b of monomials into coprime numerator and denominator monomials.
std::pair<Monomial, Monomial> laurent(const Monomial& a, const Monomial& b) {
  Monomial g = monomial_gcd(a, b);
  return {*monomial_div(a, g), *monomial_div(b, g)};
}

bool is_exp_like(const Kernel& k) {
  if (k->kind == KernelKind::Exp) return true;
  if (k->kind != KernelKind::Root) return false;
  const Poly& r = k->arg->num();
  if (!r.is_single_term()) return false;
  const auto& [m, c] = *r.terms().begin();
  return c == 1 && m.size() == 1 && m.front().second == 1 && m.front().first->kind == KernelKind::Exp;
}

/// log of an exp-like kernel raised to e.
Canonical log_of_exp_like(const Kernel& k, int e) {
  if (k->kind == KernelKind::Exp) return *k->arg * Canonical(e);
  const Kernel& inner = k->arg->num().terms().begin()->first.front().first;
  return *inner->arg * Canonical(Rational(e, k->order));
}

}  // namespace

Canonical make_exp(const Canonical& arg) {
  if (arg.is_zero()) return Canonical(1);
  if (!arg.den().is_single_term()) return Canonical::of_kernel(make_kernel(KernelKind::Exp, "", 0, arg));
  const auto& [dm, dc] = *arg.den().terms().begin();
  Canonical out(1);
  for (const auto& [m, c] : arg.num().terms()) {
    Rational q = c / dc;
    auto [mn, md] = laurent(m, dm);
    if (md.empty() && mn.size() == 1 && mn.front().second == 1 &&
        mn.front().first->kind == KernelKind::Log) {
      out = out * mn.front().first->arg->pow(q);
    } else if (mn.empty() && md.empty()) {
      out = out * pow_kernel(exp_one(), q);
    } else {
      Canonical base = Canonical::fraction(unit_monomial(mn), unit_monomial(md));
      out = out * pow_kernel(make_kernel(KernelKind::Exp, "", 0, base), q);
    }
  }
  return out;
}

Canonical make_log(const Canonical& arg) {
  if (arg.is_zero()) throw DomainError("log of zero");
  if (auto c = arg.constant_value(); c && *c == 1) return Canonical();
  if (arg.num().is_single_term() && arg.den().is_single_term() &&
      arg.num().leading_coeff() == 1 && arg.den().leading_coeff() == 1) {
    const Monomial& mn = arg.num().leading_monomial();
    const Monomial& md = arg.den().leading_monomial();
    bool all = true;
    for (const auto& [k, e] : mn) all = all && is_exp_like(k);
    for (const auto& [k, e] : md) all = all && is_exp_like(k);
    if (all && !(mn.empty() && md.empty())) {
      Canonical out;
      for (const auto& [k, e] : mn) out = out + log_of_exp_like(k, e);
      for (const auto& [k, e] : md) out = out - log_of_exp_like(k, e);
      return out;
    }
  }
  return Canonical::of_kernel(make_kernel(KernelKind::Log, "", 0, arg));
}

Canonical make_sin(const Canonical& arg) {
  if (arg.is_zero()) return Canonical();
  if (arg.leading_sign() < 0) return -Canonical::of_kernel(make_kernel(KernelKind::Sin, "", 0, -arg));
  return Canonical::of_kernel(make_kernel(KernelKind::Sin, "", 0, arg));
}

Canonical make_cos(const Canonical& arg) {
  if (arg.is_zero()) return Canonical(1);
  if (arg.leading_sign() < 0) return Canonical::of_kernel(make_kernel(KernelKind::Cos, "", 0, -arg));
  return Canonical::of_kernel(make_kernel(KernelKind::Cos, "", 0, arg));
}

Canonical make_function(const std::string& name, const Canonical& arg) {
  return Canonical::of_kernel(make_kernel(KernelKind::Function, name, 0, arg));
}

Canonical make_derivative(const std::string& name, const Canonical& arg, int order) {
  if (order == 0) return make_function(name, arg);
  return Canonical::of_kernel(make_kernel(KernelKind::Derivative, name, order, arg));
}

// ---------------------------------------------------------------------------
// Expr <-> Canonical

Canonical Canonical::of(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      return Canonical(e.value());
    case Kind::Symbol:
      return of_kernel(symbol_kernel(e.name()));
    case Kind::Function:
      return make_function(e.name(), of(e.arg()));
    case Kind::Derivative:
      return make_derivative(e.name(), of(e.arg()), e.order());
    case Kind::Add: {
      Canonical acc;
      for (const auto& t : e.operands()) acc = acc + of(t);
      return acc;
    }
    case Kind::Mul: {
      Canonical acc(1);
      for (const auto& f : e.operands()) acc = acc * of(f);
      return acc;
    }
    case Kind::Pow:
      return of(e.base()).pow(e.exponent());
    case Kind::Exp:
      return make_exp(of(e.arg()));
    case Kind::Log:
      return make_log(of(e.arg()));
    case Kind::Sin:
      return make_sin(of(e.arg()));
    case Kind::Cos:
      return make_cos(of(e.arg()));
  }
  throw UnsupportedError("unknown expression kind");
}

namespace {

Expr poly_expr(const Poly& p);

Expr kernel_power_expr(const Kernel& k, int e) {
  switch (k->kind) {
    case KernelKind::Symbol:
      return pow(Expr::symbol(k->name), Rational(e));
    case KernelKind::Function:
      return pow(Expr::function(k->name, k->arg->to_expr()), Rational(e));
    case KernelKind::Derivative:
      return pow(Expr::derivative(k->name, k->arg->to_expr(), k->order), Rational(e));
    case KernelKind::Exp:
      return Expr::exp(Expr(e) * k->arg->to_expr());
    case KernelKind::Log:
      return pow(Expr::log(k->arg->to_expr()), Rational(e));
    case KernelKind::Sin:
      return pow(Expr::sin(k->arg->to_expr()), Rational(e));
    case KernelKind::Cos:
      return pow(Expr::cos(k->arg->to_expr()), Rational(e));
    case KernelKind::Root: {
      Rational q(e, k->order);
      const Poly& r = k->arg->num();
      if (r.is_single_term() && r.leading_coeff() == 1 && r.leading_monomial().size() == 1 &&
          r.leading_monomial().front().second == 1 &&
          r.leading_monomial().front().first->kind == KernelKind::Exp) {
        const Kernel& ek = r.leading_monomial().front().first;
        return Expr::exp(Expr(q) * ek->arg->to_expr());
      }
      return pow(poly_expr(r), q);
    }
  }
  return {};
}

// c times the kernel powers, with exp(a)^e and its roots folded into one exp.
Expr term_expr(const Monomial& powers, const Rational& c) {
  std::vector<Expr> fs{Expr(c)};
  std::vector<std::pair<Kernel, Rational>> exps;
  auto add_exp = [&](const Kernel& ek, const Rational& q) {
    auto it = std::find_if(exps.begin(), exps.end(), [&](const auto& x) { return x.first == ek; });
    if (it == exps.end()) exps.emplace_back(ek, q);
    else it->second += q;
  };
  for (const auto& [k, e] : powers) {
    if (e == 0) continue;
    if (k->kind == KernelKind::Exp) {
      add_exp(k, Rational(e));
    } else if (is_exp_like(k)) {
      add_exp(k->arg->num().leading_monomial().front().first, Rational(e, k->order));
    } else {
      fs.push_back(kernel_power_expr(k, e));
    }
  }
  for (auto& [ek, q] : exps) {
    q.canonicalize();
    if (q != 0) fs.push_back(Expr::exp(Expr(q) * ek->arg->to_expr()));
  }
  return Expr::product(std::move(fs));
}

Expr poly_expr(const Poly& p) {
  std::vector<Expr> ts;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) ts.push_back(term_expr(it->first, it->second));
  return Expr::sum(std::move(ts));
}

}  // namespace

Expr Canonical::to_expr() const {
  Expr top = poly_expr(num_);
  if (den_.is_constant()) return top;
  if (den_.is_single_term()) {
    // Distribute the monomial denominator over the terms as negative powers.
    const Rational& dc = den_.leading_coeff();
    std::vector<Expr> ts;
    for (auto it = num_.terms().rbegin(); it != num_.terms().rend(); ++it) {
      std::map<Kernel, int, KernelLess> powers;
      for (const auto& [k, e] : it->first) powers[k] += e;
      for (const auto& [k, e] : den_.leading_monomial()) powers[k] -= e;
      ts.push_back(term_expr(Monomial(powers.begin(), powers.end()), it->second / dc));
    }
    return Expr::sum(std::move(ts));
  }
  return Expr::product({top, cosmo::pow(poly_expr(den_), Rational(-1))});
}

// ---------------------------------------------------------------------------
// Calculus on canonical forms

namespace {

Canonical kernel_derivative(const Kernel& k, const Kernel& var) {
  switch (k->kind) {
    case KernelKind::Symbol:
      return k == var ? Canonical(1) : Canonical();
    case KernelKind::Function:
    case KernelKind::Derivative: {
      Canonical du = k->arg->derivative(var);
      if (du.is_zero()) return du;
      int next = k->kind == KernelKind::Function ? 1 : k->order + 1;
      return make_derivative(k->name, *k->arg, next) * du;
    }
    case KernelKind::Exp:
      return Canonical::of_kernel(k) * k->arg->derivative(var);
    case KernelKind::Log:
      return k->arg->derivative(var) / *k->arg;
    case KernelKind::Sin:
      return Canonical::of_kernel(make_kernel(KernelKind::Cos, "", 0, *k->arg)) * k->arg->derivative(var);
    case KernelKind::Cos:
      return -(Canonical::of_kernel(make_kernel(KernelKind::Sin, "", 0, *k->arg)) * k->arg->derivative(var));
    case KernelKind::Root: {
      Canonical dr = k->arg->derivative(var);
      if (dr.is_zero()) return dr;
      return Canonical::of_kernel(k) * dr / (*k->arg * Canonical(k->order));
    }
  }
  return {};
}

Canonical poly_derivative(const Poly& p, const Kernel& var,
                          std::map<Kernel, Canonical, KernelLess>& memo) {
  Poly acc;
  Canonical extra;
  for (const auto& k : p.kernels()) {
    auto it = memo.find(k);
    if (it == memo.end()) it = memo.emplace(k, kernel_derivative(k, var)).first;
    const Canonical& dk = it->second;
    if (dk.is_zero()) continue;
    Poly part = p.partial(k);
    if (dk.den().is_constant())
      acc = acc + part * dk.num().scaled(1 / dk.den().constant_value());
    else
      extra = extra + Canonical::of_poly(part) * dk;
  }
  return Canonical::of_poly(acc) + extra;
}

}  // namespace

Canonical Canonical::derivative(const Kernel& var) const {
  std::map<Kernel, Canonical, KernelLess> memo;
  Canonical dn = poly_derivative(num_, var, memo);
  if (den_.is_constant()) return dn;
  Canonical dd = poly_derivative(den_, var, memo);
  Canonical d = of_poly(den_);
  return (dn * d - of_poly(num_) * dd) / (d * d);
}

std::vector<Kernel> Canonical::all_kernels() const {
  std::set<Kernel, KernelLess> seen;
  std::vector<Kernel> stack;
  for (const auto& k : num_.kernels()) stack.push_back(k);
  for (const auto& k : den_.kernels()) stack.push_back(k);
  while (!stack.empty()) {
    Kernel k = stack.back();
    stack.pop_back();
    if (!seen.insert(k).second) continue;
    if (k->arg) {
      for (const auto& kk : k->arg->num().kernels()) stack.push_back(kk);
      for (const auto& kk : k->arg->den().kernels()) stack.push_back(kk);
    }
  }
  return {seen.begin(), seen.end()};
}

bool Canonical::depends_on(const Kernel& var) const {
  for (const auto& k : all_kernels())
    if (k == var) return true;
  return false;
}

bool Canonical::in_rational_fragment() const {
  auto ks = all_kernels();
  std::vector<Canonical> trig_args;
  std::map<std::string, int> root_index;
  for (const auto& k : ks) {
    switch (k->kind) {
      case KernelKind::Root: {
        const Canonical& r = *k->arg;
        if (!r.is_constant() && !(r.num().is_single_term() && r.num().leading_coeff() == 1 &&
                                  r.num().leading_monomial().size() == 1 &&
                                  r.num().leading_monomial().front().second == 1))
          return false;
        auto [it, fresh] = root_index.emplace(r.str(), k->order);
        if (!fresh && it->second != k->order) return false;
        if (k->order > 2 && den_.contains(k)) return false;
        break;
      }
      case KernelKind::Exp:
        if (!k->arg->num().is_single_term() || !k->arg->den().is_single_term()) return false;
        break;
      case KernelKind::Log: {
        const Canonical& a = *k->arg;
        if (!(a.den().is_constant() && a.num().is_single_term() && a.num().leading_coeff() == 1 &&
              a.num().leading_monomial().size() == 1 && a.num().leading_monomial().front().second == 1))
          return false;
        KernelKind inner = a.num().leading_monomial().front().first->kind;
        if (inner != KernelKind::Symbol && inner != KernelKind::Function && inner != KernelKind::Derivative)
          return false;
        break;
      }
      case KernelKind::Sin:
      case KernelKind::Cos: {
        const Canonical& a = *k->arg;
        if (!a.num().is_single_term() || !a.den().is_single_term()) return false;
        for (const auto& other : trig_args) {
          if (other == a) continue;
          if ((a / other).is_constant()) return false;
        }
        trig_args.push_back(a);
        break;
      }
      default:
        break;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Numeric evaluation and zero testing

double evaluate(const Canonical& c, const std::function<double(const Kernel&)>& leaf) {
  std::unordered_map<const KernelData*, double> memo;
  std::function<double(const Canonical&)> value;
  std::function<double(const Kernel&)> kernel_value = [&](const Kernel& k) -> double {
    auto it = memo.find(k.get());
    if (it != memo.end()) return it->second;
    double v = 0;
    switch (k->kind) {
      case KernelKind::Symbol:
        v = k->name == "Pi" ? M_PI : leaf(k);
        break;
      case KernelKind::Function:
      case KernelKind::Derivative:
        v = leaf(k);
        break;
      case KernelKind::Exp:
        v = std::exp(value(*k->arg));
        break;
      case KernelKind::Log: {
        double x = value(*k->arg);
        if (!(x > 0)) throw DomainError("log of non-positive value");
        v = std::log(x);
        break;
      }
      case KernelKind::Sin:
        v = std::sin(value(*k->arg));
        break;
      case KernelKind::Cos:
        v = std::cos(value(*k->arg));
        break;
      case KernelKind::Root: {
        double x = value(*k->arg);
        if (x < 0) {
          if (k->order % 2 == 0) throw DomainError("even root of negative value");
          v = -std::pow(-x, 1.0 / k->order);
        } else {
          v = k->order == 2 ? std::sqrt(x) : std::pow(x, 1.0 / k->order);
        }
        break;
      }
    }
    memo.emplace(k.get(), v);
    return v;
  };
  auto poly_value = [&](const Poly& p) {
    double s = 0;
    for (const auto& [m, coef] : p.terms()) {
      double t = coef.get_d();
      for (const auto& [k, e] : m) t *= std::pow(kernel_value(k), e);
      s += t;
    }
    return s;
  };
  value = [&](const Canonical& x) {
    double n = poly_value(x.num());
    if (x.den().is_constant()) return n / x.den().constant_value().get_d();
    double d = poly_value(x.den());
    if (d == 0) throw DomainError("division by zero");
    return n / d;
  };
  double v = value(c);
  if (!std::isfinite(v)) throw DomainError("non-finite value");
  return v;
}

unsigned long long SplitMix64::next() {
  unsigned long long z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ZeroTest zero_test(const Canonical& c, const SamplingPolicy& policy) {
  ZeroTest out;
  if (c.is_zero()) {
    out.zero = true;
    return out;
  }
  if (c.in_rational_fragment()) return out;
  out.path = ZeroPath::Sampling;
  std::vector<Kernel> leaves;
  for (const auto& k : c.all_kernels()) {
    if ((k->kind == KernelKind::Symbol && k->name != "Pi") || k->kind == KernelKind::Function ||
        k->kind == KernelKind::Derivative)
      leaves.push_back(k);
  }
  SplitMix64 rng(policy.seed);
  int ok = 0;
  for (int i = 0; i < policy.points; ++i) {
    std::map<Kernel, double, KernelLess> values;
    for (const auto& k : leaves) values[k] = rng.uniform(policy.lo, policy.hi);
    try {
      double v = evaluate(c, [&](const Kernel& k) { return values.at(k); });
      ++ok;
      if (std::fabs(v) >= policy.threshold) {
        out.points_evaluated = ok;
        return out;
      }
    } catch (const DomainError&) {
    }
  }
  if (ok == 0) throw UndecidableError("expression could not be evaluated at any sample point");
  out.zero = true;
  out.points_evaluated = ok;
  return out;
}

ZeroTest zero_test(const Expr& e, const SamplingPolicy& policy) {
  return zero_test(Canonical::of(e), policy);
}

bool is_zero(const Expr& e) { return zero_test(e).zero; }
bool is_zero(const Canonical& c) { return zero_test(c).zero; }

Expr simplify(const Expr& e) { return Canonical::of(e).to_expr(); }

bool equivalent(const Expr& a, const Expr& b) { return is_zero(Canonical::of(a) - Canonical::of(b)); }

}  // namespace cosmo
