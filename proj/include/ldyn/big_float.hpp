#ifndef LDYN_BIG_FLOAT_HPP
#define LDYN_BIG_FLOAT_HPP

// Thin RAII wrapper over MPFR used for high-fidelity orbit evaluation.
//
// Every arithmetic result is rounded to the thread's working precision,
// which is set with a PrecisionScope. Conversions from double are exact
// whenever the working precision is at least 53 bits.

#include <mpfr.h>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>

namespace ldyn {

namespace detail {
inline mpfr_prec_t& working_precision_slot() {
  thread_local mpfr_prec_t prec = 256;
  return prec;
}
}  // namespace detail

/// Sets the working precision (in bits) of the current thread for its lifetime.
class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits) : saved_(detail::working_precision_slot()) {
    detail::working_precision_slot() = bits < 53 ? 53 : bits;
  }
  ~PrecisionScope() { detail::working_precision_slot() = saved_; }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

class BigFloat {
 public:
  static mpfr_prec_t working_precision() { return detail::working_precision_slot(); }

  BigFloat() {
    mpfr_init2(v_, working_precision());
    mpfr_set_zero(v_, 1);
  }
  BigFloat(double d) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, working_precision());
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  BigFloat(int i) : BigFloat(static_cast<double>(i)) {}  // NOLINT(google-explicit-constructor)
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  [[nodiscard]] double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  [[nodiscard]] mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  [[nodiscard]] bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  [[nodiscard]] int sign() const { return mpfr_sgn(v_); }

  /// log2|x| as a double; -inf for zero. Valid far outside the double exponent range.
  [[nodiscard]] double log2_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    long exp = 0;
    const double mant = mpfr_get_d_2exp(&exp, v_, MPFR_RNDN);
    return std::log2(std::fabs(mant)) + static_cast<double>(exp);
  }

  mpfr_ptr raw() { return v_; }
  [[nodiscard]] mpfr_srcptr raw() const { return v_; }

  static BigFloat pi() {
    BigFloat r;
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }

#define LDYN_BIGFLOAT_BINOP(op, fn, fn_d, fn_d_rev)                          \
  friend BigFloat operator op(const BigFloat& a, const BigFloat& b) {        \
    BigFloat r;                                                              \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                         \
    return r;                                                                \
  }                                                                          \
  friend BigFloat operator op(const BigFloat& a, double b) {                 \
    BigFloat r;                                                              \
    fn_d(r.v_, a.v_, b, MPFR_RNDN);                                          \
    return r;                                                                \
  }                                                                          \
  friend BigFloat operator op(double a, const BigFloat& b) {                 \
    BigFloat r;                                                              \
    fn_d_rev(r.v_, a, b.v_, MPFR_RNDN);                                      \
    return r;                                                                \
  }                                                                          \
  BigFloat& operator op##=(const BigFloat& b) {                              \
    fn(v_, v_, b.v_, MPFR_RNDN);                                             \
    return *this;                                                            \
  }                                                                          \
  BigFloat& operator op##=(double b) {                                       \
    fn_d(v_, v_, b, MPFR_RNDN);                                              \
    return *this;                                                            \
  }

  LDYN_BIGFLOAT_BINOP(+, mpfr_add, mpfr_add_d, add_d_rev)
  LDYN_BIGFLOAT_BINOP(-, mpfr_sub, mpfr_sub_d, mpfr_d_sub)
  LDYN_BIGFLOAT_BINOP(*, mpfr_mul, mpfr_mul_d, mul_d_rev)
  LDYN_BIGFLOAT_BINOP(/, mpfr_div, mpfr_div_d, mpfr_d_div)
#undef LDYN_BIGFLOAT_BINOP

  friend BigFloat operator-(const BigFloat& a) {
    BigFloat r;
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

  friend int compare(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_); }
  friend int compare(const BigFloat& a, double b) { return mpfr_cmp_d(a.v_, b); }

  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator==(const BigFloat& a, double b) { return compare(a, b) == 0; }
  friend auto operator<=>(const BigFloat& a, const BigFloat& b) { return compare(a, b) <=> 0; }
  friend auto operator<=>(const BigFloat& a, double b) { return compare(a, b) <=> 0; }

#define LDYN_BIGFLOAT_UNARY(name, fn)             \
  friend BigFloat name(const BigFloat& a) {       \
    BigFloat r;                                   \
    fn(r.v_, a.v_, MPFR_RNDN);                    \
    return r;                                     \
  }
  LDYN_BIGFLOAT_UNARY(sqrt, mpfr_sqrt)
  LDYN_BIGFLOAT_UNARY(sin, mpfr_sin)
  LDYN_BIGFLOAT_UNARY(cos, mpfr_cos)
  LDYN_BIGFLOAT_UNARY(asin, mpfr_asin)
  LDYN_BIGFLOAT_UNARY(acos, mpfr_acos)
  LDYN_BIGFLOAT_UNARY(log, mpfr_log)
  LDYN_BIGFLOAT_UNARY(abs, mpfr_abs)
#undef LDYN_BIGFLOAT_UNARY

 private:
  static int add_d_rev(mpfr_ptr r, double a, mpfr_srcptr b, mpfr_rnd_t rnd) { return mpfr_add_d(r, b, a, rnd); }
  static int mul_d_rev(mpfr_ptr r, double a, mpfr_srcptr b, mpfr_rnd_t rnd) { return mpfr_mul_d(r, b, a, rnd); }

  mpfr_t v_;
};

// Scalar traits shared by the templated evaluators.
template <class Real>
inline Real pi_as() {
  return Real(std::numbers::pi);
}
template <>
inline BigFloat pi_as<BigFloat>() {
  return BigFloat::pi();
}

inline double to_double(double x) { return x; }
inline double to_double(const BigFloat& x) { return x.to_double(); }

inline double log2_abs(double x) { return std::log2(std::fabs(x)); }
inline double log2_abs(const BigFloat& x) { return x.log2_abs(); }

/// Natural log of |x| rounded to double, well defined for |x| far below DBL_MIN.
inline double log_abs(double x) { return std::log(std::fabs(x)); }
inline double log_abs(const BigFloat& x) { return x.log2_abs() * std::numbers::ln2; }

/// Exact accumulator for sums of doubles.
///
/// Backed by a 2400-bit MPFR value, wide enough to hold any sum of up to
/// 2^200 finite doubles of magnitude below 2^1000 without rounding.
class ExactSum {
 public:
  static constexpr mpfr_prec_t kBits = 2400;

  ExactSum() {
    mpfr_init2(v_, kBits);
    mpfr_set_zero(v_, 1);
  }
  ExactSum(const ExactSum& o) {
    mpfr_init2(v_, kBits);
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  ExactSum& operator=(const ExactSum& o) {
    if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  ~ExactSum() { mpfr_clear(v_); }

  ExactSum& operator+=(double term) {
    mpfr_add_d(v_, v_, term, MPFR_RNDN);
    return *this;
  }
  ExactSum& operator+=(const ExactSum& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  friend ExactSum operator+(ExactSum a, const ExactSum& b) { return a += b; }
  friend bool operator==(const ExactSum& a, const ExactSum& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

  [[nodiscard]] double value() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

}  // namespace ldyn

#endif  // LDYN_BIG_FLOAT_HPP
