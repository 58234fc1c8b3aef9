#include "nearcol/logprob.hpp"

namespace nearcol {

long double log2_bigint(const BigInt& v) {
  if (v <= 0) throw std::domain_error("log2_bigint: nonpositive value");
  const std::size_t bits = boost::multiprecision::msb(v) + 1;
  if (bits <= 128) return std::log2(v.convert_to<long double>());
  const std::size_t shift = bits - 128;
  const BigInt top = v >> shift;
  return std::log2(top.convert_to<long double>()) + static_cast<long double>(shift);
}

long double log2_rational(const BigRat& r) {
  if (r <= 0) throw std::domain_error("log2_rational: nonpositive value");
  return log2_bigint(boost::multiprecision::numerator(r)) -
         log2_bigint(boost::multiprecision::denominator(r));
}

long double LogProb::ln_one_minus() const {
  if (zero_) return 0.0L;
  return ln1m_exp2(lg_);
}

LogProb LogProb::complement() const {
  if (zero_) return one();
  if (lg_ == 0.0L) return zero();
  if (lg_ > 0.0L) throw std::domain_error("LogProb::complement: value above 1");
  return from_log2(ln_one_minus() / static_cast<long double>(M_LN2));
}

LogProb LogProb::one_minus_pow(const LogProb& p, long double m) {
  if (m == 0.0L || p.is_zero()) return zero();
  const long double t = m * p.ln_one_minus();  // ln((1-p)^m), <= 0
  if (t == -std::numeric_limits<long double>::infinity()) return one();
  // 1 - e^t = -expm1(t)
  const long double u = -std::expm1(t);  // no cancellation: expm1 is exact near 0
  if (u <= 0.0L) return zero();
  if (u >= 1.0L) return one();
  return from_log2(std::log(u) / static_cast<long double>(M_LN2));
}

}  // namespace nearcol
