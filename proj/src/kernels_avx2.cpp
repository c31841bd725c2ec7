// AVX2 + FMA variants of the elementwise kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; it is entered through avx2_table() only
// after the dispatcher has confirmed CPU support.

#include "bose/kernels.hpp"

#include <immintrin.h>

#include <array>
#include <cstdint>

namespace bose::kernels {
namespace {

using Vec = __m256d;
constexpr std::size_t kLanes = 4;

inline Vec splat(double v) { return _mm256_set1_pd(v); }

// int64 lanes (|i| < 2^51) -> double, via the 1.5*2^52 magic constant.
inline Vec int64_to_double(__m256i i) {
  const Vec magic = splat(0x1.8p52);
  return _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_add_epi64(i, _mm256_castpd_si256(magic))), magic);
}

// integral-valued double lanes (|k| < 2^51) -> int64.
inline __m256i double_to_int64(Vec k) {
  const Vec magic = splat(0x1.8p52);
  return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)),
                          _mm256_castpd_si256(magic));
}

inline Vec pow2(Vec k) {
  const __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(double_to_int64(k), _mm256_set1_epi64x(1023)), 52);
  return _mm256_castsi256_pd(bits);
}

// exp(x): Cody-Waite reduction by ln 2, degree-13 Taylor polynomial on
// |r| <= ln(2)/2, and a two-step scale so that 2^k never leaves the normal
// range before the final (single) rounding.
inline Vec exp_pd(Vec x) {
  const Vec lo = splat(-745.2);
  const Vec hi = splat(709.78);
  const Vec under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  const Vec over = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
  const Vec nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  const Vec xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const Vec k = _mm256_round_pd(_mm256_mul_pd(xc, splat(0x1.71547652b82fep+0)),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  Vec r = _mm256_fnmadd_pd(k, splat(6.93147180369123816490e-01), xc);
  r = _mm256_fnmadd_pd(k, splat(1.90821492927058770002e-10), r);

  static constexpr std::array<double, 14> inv_fact = {
      1.0,
      1.0,
      1.0 / 2.0,
      1.0 / 6.0,
      1.0 / 24.0,
      1.0 / 120.0,
      1.0 / 720.0,
      1.0 / 5040.0,
      1.0 / 40320.0,
      1.0 / 362880.0,
      1.0 / 3628800.0,
      1.0 / 39916800.0,
      1.0 / 479001600.0,
      1.0 / 6227020800.0,
  };
  Vec p = splat(inv_fact[13]);
  for (int i = 12; i >= 0; --i) {
    p = _mm256_fmadd_pd(p, r, splat(inv_fact[static_cast<std::size_t>(i)]));
  }

  const Vec k1 = _mm256_floor_pd(_mm256_mul_pd(k, splat(0.5)));
  const Vec k2 = _mm256_sub_pd(k, k1);
  Vec result = _mm256_mul_pd(_mm256_mul_pd(p, pow2(k1)), pow2(k2));

  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), under);
  result = _mm256_blendv_pd(result, splat(__builtin_inf()), over);
  result = _mm256_blendv_pd(result, _mm256_add_pd(x, x), nan);
  return result;
}

// log(u) for positive normal u (and +inf), fdlibm's reduction to
// [sqrt(2)/2, sqrt(2)) and its degree-14 odd polynomial in s = f/(2+f).
inline Vec log_pd(Vec u) {
  const __m256i bits = _mm256_castpd_si256(u);
  __m256i e = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1023));
  const __m256i mant = _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                                       _mm256_set1_epi64x(0x3FF0000000000000LL));
  Vec m = _mm256_castsi256_pd(mant);
  const Vec big = _mm256_cmp_pd(m, splat(0x1.6a09e667f3bcdp+0), _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, splat(0.5)), big);
  e = _mm256_sub_epi64(e, _mm256_castpd_si256(big));  // mask lanes are -1
  const Vec dk = int64_to_double(e);

  const Vec f = _mm256_sub_pd(m, splat(1.0));
  const Vec s = _mm256_div_pd(f, _mm256_add_pd(splat(2.0), f));
  const Vec z = _mm256_mul_pd(s, s);
  const Vec w = _mm256_mul_pd(z, z);
  const Vec t1 = _mm256_mul_pd(
      w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, splat(1.531383769920937332e-01),
                                            splat(2.222219843214978396e-01)),
                         splat(3.999999999940941908e-01)));
  const Vec t2 = _mm256_mul_pd(
      z, _mm256_fmadd_pd(
             w,
             _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, splat(1.479819860511658591e-01),
                                                splat(1.818357216161805012e-01)),
                             splat(2.857142874366239149e-01)),
             splat(6.666666666666735130e-01)));
  const Vec R = _mm256_add_pd(t2, t1);
  const Vec hfsq = _mm256_mul_pd(splat(0.5), _mm256_mul_pd(f, f));
  const Vec inner = _mm256_add_pd(_mm256_mul_pd(s, _mm256_add_pd(hfsq, R)),
                                  _mm256_mul_pd(dk, splat(1.90821492927058770002e-10)));
  return _mm256_sub_pd(_mm256_mul_pd(dk, splat(6.93147180369123816490e-01)),
                       _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));
}

// -log1p(-z) for z in [0, 1), using log(u) * z / (1 - u) with u = fl(1 - z).
inline Vec neg_log1m(Vec z) {
  const Vec one = splat(1.0);
  const Vec u = _mm256_sub_pd(one, z);
  const Vec d = _mm256_sub_pd(one, u);
  const Vec exact = _mm256_cmp_pd(u, one, _CMP_EQ_OQ);
  const Vec safe_u = _mm256_blendv_pd(u, splat(0.5), exact);
  const Vec safe_d = _mm256_blendv_pd(d, splat(0.5), exact);
  const Vec val = _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), log_pd(safe_u)), z),
                                safe_d);
  return _mm256_blendv_pd(val, z, exact);
}

// expm1(y) via Kahan's (u - 1) * y / log(u); accurate for y >= -ln 2.
inline Vec expm1_pd(Vec y) {
  const Vec one = splat(1.0);
  const Vec u = exp_pd(y);
  const Vec exact = _mm256_cmp_pd(u, one, _CMP_EQ_OQ);
  const Vec safe_u = _mm256_blendv_pd(u, splat(2.0), exact);
  const Vec val = _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(safe_u, one), y), log_pd(safe_u));
  const Vec inf = _mm256_cmp_pd(u, splat(__builtin_inf()), _CMP_EQ_OQ);
  return _mm256_blendv_pd(_mm256_blendv_pd(val, y, exact), u, inf);
}

// Applies `op` to full vectors and to a zero-padded copy of the tail, so that
// every element goes through the same vector code path.
template <class Op>
void map_lanes(std::span<const double> in, std::span<double> out, double pad, Op op) {
  std::size_t i = 0;
  for (; i + kLanes <= in.size(); i += kLanes) {
    _mm256_storeu_pd(out.data() + i, op(_mm256_loadu_pd(in.data() + i)));
  }
  if (i < in.size()) {
    alignas(32) std::array<double, kLanes> buf;
    buf.fill(pad);
    for (std::size_t j = i; j < in.size(); ++j) buf[j - i] = in[j];
    _mm256_store_pd(buf.data(), op(_mm256_load_pd(buf.data())));
    for (std::size_t j = i; j < in.size(); ++j) out[j] = buf[j - i];
  }
}

void bose_log_terms(std::span<const double> energy, double beta, double mu,
                    std::span<double> out) {
  const Vec vb = splat(beta);
  const Vec vmu = splat(mu);
  const Vec split = splat(-0.693147180559945309);
  map_lanes(energy, out, mu + 1.0, [&](Vec lam) {
    const Vec x = _mm256_mul_pd(vb, _mm256_sub_pd(vmu, lam));
    // Same split as the scalar reference: -log(-expm1(x)) near 0, where
    // 1 - e^x would cancel, and -log1p(-e^x) further out.
    const Vec near = _mm256_cmp_pd(x, split, _CMP_GT_OQ);
    const Vec xn = _mm256_blendv_pd(split, x, near);
    const Vec a = _mm256_sub_pd(_mm256_setzero_pd(),
                                log_pd(_mm256_sub_pd(_mm256_setzero_pd(), expm1_pd(xn))));
    const Vec b = neg_log1m(exp_pd(x));
    return _mm256_blendv_pd(b, a, near);
  });
}

void bose_occupation_terms(std::span<const double> energy, double beta, double mu,
                           std::span<double> out) {
  const Vec vb = splat(beta);
  const Vec vmu = splat(mu);
  const Vec one = splat(1.0);
  map_lanes(energy, out, mu + 1.0, [&](Vec lam) {
    return _mm256_div_pd(one, expm1_pd(_mm256_mul_pd(vb, _mm256_sub_pd(lam, vmu))));
  });
}

void exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  const Vec vs = splat(shift);
  map_lanes(x, out, shift, [&](Vec v) { return exp_pd(_mm256_sub_pd(v, vs)); });
}

void sqrt_source_exponents(std::size_t first, double beta, double mu, double c,
                           std::span<double> out) {
  const Vec vb = splat(beta);
  const Vec vmu = splat(mu);
  const Vec vc = splat(c);
  const Vec one = splat(1.0);
  const Vec step = splat(static_cast<double>(kLanes));
  Vec n = _mm256_add_pd(splat(static_cast<double>(first)), _mm256_setr_pd(0.0, 1.0, 2.0, 3.0));
  // Same operation sequence as the scalar reference, without contraction,
  // so both variants produce identical bits.
  auto eval = [&](Vec nv) {
    return _mm256_mul_pd(vb, _mm256_add_pd(_mm256_mul_pd(vmu, nv),
                                           _mm256_mul_pd(vc, _mm256_sqrt_pd(_mm256_add_pd(nv, one)))));
  };
  std::size_t k = 0;
  for (; k + kLanes <= out.size(); k += kLanes) {
    _mm256_storeu_pd(out.data() + k, eval(n));
    n = _mm256_add_pd(n, step);
  }
  if (k < out.size()) {
    alignas(32) std::array<double, kLanes> buf;
    _mm256_store_pd(buf.data(), eval(n));
    for (std::size_t j = k; j < out.size(); ++j) out[j] = buf[j - k];
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::avx2, "avx2", bose_log_terms, bose_occupation_terms,
                                 exp_shifted, sqrt_source_exponents};
  return &table;
}

}  // namespace bose::kernels
