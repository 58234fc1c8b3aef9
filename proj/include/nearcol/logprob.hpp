#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nearcol {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// log2 of a positive big integer, accurate to a few ulps of long double.
/// The top 128 bits are converted exactly and the bit length is added back,
/// so the absolute error stays near 2^-60 regardless of magnitude.
long double log2_bigint(const BigInt& v);

/// log2 of a positive rational.
long double log2_rational(const BigRat& r);

/// Nonnegative real carried as log2(value), with an explicit flag for exact zero.
/// Probabilities and counts both use this carrier; a probability has
/// log2_value() <= 0 unless it is zero.
class LogProb {
 public:
  LogProb() : lg_(0.0L), zero_(true) {}

  static LogProb zero() { return LogProb(); }
  static LogProb one() { return from_log2(0.0L); }

  static LogProb from_log2(long double lg) {
    LogProb p;
    p.lg_ = lg;
    p.zero_ = false;
    return p;
  }

  static LogProb from_linear(long double v) {
    if (v < 0.0L) throw std::domain_error("LogProb: negative value");
    if (v == 0.0L) return zero();
    return from_log2(std::log2(v));
  }

  static LogProb from_rational(const BigRat& r) {
    if (r < 0) throw std::domain_error("LogProb: negative rational");
    if (r == 0) return zero();
    return from_log2(log2_rational(r));
  }

  static LogProb from_ratio(const BigInt& num, const BigInt& den) {
    if (num < 0 || den <= 0) throw std::domain_error("LogProb: bad ratio");
    if (num == 0) return zero();
    return from_log2(log2_bigint(num) - log2_bigint(den));
  }

  bool is_zero() const { return zero_; }

  /// -inf for the zero element.
  long double log2_value() const {
    return zero_ ? -std::numeric_limits<long double>::infinity() : lg_;
  }

  long double linear() const { return zero_ ? 0.0L : std::exp2(lg_); }

  LogProb operator*(const LogProb& o) const {
    if (zero_ || o.zero_) return zero();
    return from_log2(lg_ + o.lg_);
  }

  LogProb operator/(const LogProb& o) const {
    if (o.zero_) throw std::domain_error("LogProb: division by zero");
    if (zero_) return zero();
    return from_log2(lg_ - o.lg_);
  }

  /// value^m in log domain; 0^0 = 1.
  LogProb pow(long double m) const {
    if (zero_) return m == 0.0L ? one() : zero();
    return from_log2(lg_ * m);
  }

  /// Natural log of (1 - value); requires value <= 1. Stable at both ends.
  long double ln_one_minus() const;

  /// 1 - value for value in [0, 1].
  LogProb complement() const;

  /// 1 - (1 - p)^m, the success probability over m independent trials.
  /// Evaluated as expm1/log1p compositions so m up to ~1e16 stays meaningful.
  static LogProb one_minus_pow(const LogProb& p, long double m);

  bool operator==(const LogProb& o) const {
    return zero_ ? o.zero_ : (!o.zero_ && lg_ == o.lg_);
  }

 private:
  long double lg_;
  bool zero_;
};

/// LogProb for ln(1-q) given q as a probability; helper shared by the
/// product-form bounds.
inline long double ln1m_exp2(long double lg_q) {
  // ln(1 - 2^lg_q)
  if (lg_q > 0.0L) throw std::domain_error("ln1m_exp2: probability above 1");
  if (lg_q == 0.0L) return -std::numeric_limits<long double>::infinity();
  if (lg_q < -1.0L) return std::log1p(-std::exp2(lg_q));
  // q near 1: 1 - q = -expm1(lg_q * ln 2)
  return std::log(-std::expm1(lg_q * static_cast<long double>(M_LN2)));
}

}  // namespace nearcol
