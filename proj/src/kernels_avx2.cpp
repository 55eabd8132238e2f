#include "bivadj/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <limits>

// AVX2+FMA variants of the reduction kernels. Compiled with per-function
// target attributes so the rest of the build stays generic; selected at
// runtime via __builtin_cpu_supports.

namespace bivadj::kernels {
namespace {

#define BIVADJ_AVX2 __attribute__((target("avx2,fma")))

BIVADJ_AVX2 double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

BIVADJ_AVX2 double v_dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

BIVADJ_AVX2 void v_bracket(double alpha, const double* hx, const double* hy, double* out,
                           std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(hx + i), _mm256_loadu_pd(hy + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, prod, one));
  }
  for (; i < n; ++i) out[i] = 1.0 + alpha * hx[i] * hy[i];
}

// log(x) for positive normal doubles: reduce to m in [sqrt(1/2), sqrt(2)),
// then log(m) = 2*atanh(r) with r = (m-1)/(m+1), |r| <= 0.1716, summed as an
// odd polynomial with exact rational coefficients. ln2 is split hi/lo so the
// exponent contribution stays accurate.
BIVADJ_AVX2 __m256d v_log(__m256d x) {
  const __m256d sqrt2 = _mm256_set1_pd(1.4142135623730951);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256i expo_mask = _mm256_set1_epi64x(0x7ff0000000000000LL);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3ff0000000000000LL);
  const __m256i bias = _mm256_set1_epi64x(1023);

  __m256i bits = _mm256_castpd_si256(x);
  __m256i e_i = _mm256_sub_epi64(_mm256_srli_epi64(_mm256_and_si256(bits, expo_mask), 52), bias);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  // fold m >= sqrt(2) down one octave
  __m256d ge = _mm256_cmp_pd(m, sqrt2, _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, half), ge);
  // int64 exponents are small; emulate +1 via subtraction of the mask (-1)
  e_i = _mm256_sub_epi64(e_i, _mm256_castpd_si256(ge));

  // convert exponent lanes to double (values are tiny, truncation is exact)
  alignas(32) long long ei[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(ei), e_i);
  __m256d e = _mm256_set_pd(static_cast<double>(ei[3]), static_cast<double>(ei[2]),
                            static_cast<double>(ei[1]), static_cast<double>(ei[0]));

  __m256d r = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  __m256d r2 = _mm256_mul_pd(r, r);
  __m256d poly = _mm256_set1_pd(1.0 / 21.0);
  poly = _mm256_fmadd_pd(poly, r2, _mm256_set1_pd(1.0 / 19.0));
  poly = _mm256_fmadd_pd(poly, r2, _mm256_set1_pd(1.0 / 17.0));
  poly = _mm256_fmadd_pd(poly, r2, _mm256_set1_pd(1.0 / 15.0));
  poly = _mm256_fmadd_pd(poly, r2, _mm256_set1_pd(1.0 / 13.0));
  poly = _mm256_fmadd_pd(poly, r2, _mm256_set1_pd(1.0 / 11.0));
  poly = _mm256_fmadd_pd(poly, r2, _mm256_set1_pd(1.0 / 9.0));
  poly = _mm256_fmadd_pd(poly, r2, _mm256_set1_pd(1.0 / 7.0));
  poly = _mm256_fmadd_pd(poly, r2, _mm256_set1_pd(1.0 / 5.0));
  poly = _mm256_fmadd_pd(poly, r2, _mm256_set1_pd(1.0 / 3.0));
  poly = _mm256_fmadd_pd(poly, r2, one);
  __m256d logm = _mm256_mul_pd(_mm256_add_pd(r, r), poly);

  const __m256d ln2_hi = _mm256_set1_pd(0.693359375);
  const __m256d ln2_lo = _mm256_set1_pd(-2.121944400546905827679e-4);
  return _mm256_add_pd(_mm256_fmadd_pd(e, ln2_lo, logm), _mm256_mul_pd(e, ln2_hi));
}

BIVADJ_AVX2 double v_weighted_log_sum(const double* w, const double* v, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = _mm256_setzero_pd();
  __m256d ok = _mm256_castsi256_pd(_mm256_set1_epi64x(-1LL));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vv = _mm256_loadu_pd(v + i);
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(vv, zero, _CMP_GT_OQ));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), v_log(vv), acc);
  }
  if (_mm256_movemask_pd(ok) != 0xf) return -std::numeric_limits<double>::infinity();
  double sum = hsum(acc);
  for (; i < n; ++i) {
    if (!(v[i] > 0.0)) return -std::numeric_limits<double>::infinity();
    sum += w[i] * std::log(v[i]);
  }
  return sum;
}

BIVADJ_AVX2 double v_min_value(const double* v, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_loadu_pd(v);
    for (i = 4; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(v + i));
    __m128d lo = _mm_min_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    m = std::min(_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
  }
  for (; i < n; ++i) m = std::min(m, v[i]);
  return m;
}

BIVADJ_AVX2 double v_max_abs_dev(const double* v, double center, std::size_t n) {
  const __m256d c = _mm256_set1_pd(center);
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_and_pd(_mm256_sub_pd(_mm256_loadu_pd(v + i), c), absmask);
    acc = _mm256_max_pd(acc, d);
  }
  __m128d lo = _mm_max_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
  double m = std::max(_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) m = std::max(m, std::abs(v[i] - center));
  return m;
}

BIVADJ_AVX2 PairMoments v_pair_moments(const double* x, const double* y, std::size_t n) {
  __m256d sx = _mm256_setzero_pd(), sy = sx, sxx = sx, syy = sx, sxy = sx;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    sx = _mm256_add_pd(sx, vx);
    sy = _mm256_add_pd(sy, vy);
    sxx = _mm256_fmadd_pd(vx, vx, sxx);
    syy = _mm256_fmadd_pd(vy, vy, syy);
    sxy = _mm256_fmadd_pd(vx, vy, sxy);
  }
  PairMoments m{hsum(sx), hsum(sy), hsum(sxx), hsum(syy), hsum(sxy)};
  for (; i < n; ++i) {
    m.sx += x[i];
    m.sy += y[i];
    m.sxx += x[i] * x[i];
    m.syy += y[i] * y[i];
    m.sxy += x[i] * y[i];
  }
  return m;
}

#undef BIVADJ_AVX2

const detail::Ops kAvx2Ops = {v_dot,       v_bracket,     v_weighted_log_sum,
                              v_min_value, v_max_abs_dev, v_pair_moments,
                              "avx2"};

}  // namespace

namespace detail {
const Ops* avx2_ops() {
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2Ops : nullptr;
}
}  // namespace detail

}  // namespace bivadj::kernels

#else  // non-x86: scalar only

namespace bivadj::kernels::detail {
const Ops* avx2_ops() { return nullptr; }
}  // namespace bivadj::kernels::detail

#endif
