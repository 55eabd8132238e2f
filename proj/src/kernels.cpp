#include "bivadj/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

namespace bivadj::kernels {

namespace {

double s_dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void s_bracket(double alpha, const double* hx, const double* hy, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 + alpha * hx[i] * hy[i];
}

double s_weighted_log_sum(const double* w, const double* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(v[i] > 0.0)) return -std::numeric_limits<double>::infinity();
    acc += w[i] * std::log(v[i]);
  }
  return acc;
}

double s_min_value(const double* v, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::min(m, v[i]);
  return m;
}

double s_max_abs_dev(const double* v, double center, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i] - center));
  return m;
}

PairMoments s_pair_moments(const double* x, const double* y, std::size_t n) {
  PairMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    m.sx += x[i];
    m.sy += y[i];
    m.sxx += x[i] * x[i];
    m.syy += y[i] * y[i];
    m.sxy += x[i] * y[i];
  }
  return m;
}

const detail::Ops kScalarOps = {s_dot,       s_bracket,     s_weighted_log_sum,
                                s_min_value, s_max_abs_dev, s_pair_moments,
                                "scalar"};

std::atomic<const detail::Ops*> g_ops{nullptr};

const detail::Ops* resolve(Backend b) {
  if (b == Backend::Auto) {
    if (const char* env = std::getenv("BIVADJ_KERNELS")) {
      if (std::strcmp(env, "scalar") == 0) return &kScalarOps;
      if (std::strcmp(env, "avx2") == 0 && detail::avx2_ops()) return detail::avx2_ops();
    }
    if (const detail::Ops* ops = detail::avx2_ops()) return ops;
    return &kScalarOps;
  }
  if (b == Backend::Avx2 && detail::avx2_ops()) return detail::avx2_ops();
  return &kScalarOps;
}

const detail::Ops& ops() {
  const detail::Ops* p = g_ops.load(std::memory_order_acquire);
  if (!p) {
    p = resolve(Backend::Auto);
    g_ops.store(p, std::memory_order_release);
  }
  return *p;
}

}  // namespace

namespace detail {
const Ops& scalar_ops() { return kScalarOps; }
}  // namespace detail

bool avx2_available() { return detail::avx2_ops() != nullptr; }

void set_backend(Backend b) { g_ops.store(resolve(b), std::memory_order_release); }

Backend active_backend() {
  return &ops() == &kScalarOps ? Backend::Scalar : Backend::Avx2;
}

const char* backend_name() { return ops().name; }

double dot(std::span<const double> a, std::span<const double> b) {
  return ops().dot(a.data(), b.data(), std::min(a.size(), b.size()));
}

void bracket(double alpha, std::span<const double> hx, std::span<const double> hy,
             std::span<double> out) {
  ops().bracket(alpha, hx.data(), hy.data(), out.data(), hx.size());
}

double weighted_log_sum(std::span<const double> w, std::span<const double> v) {
  return ops().weighted_log_sum(w.data(), v.data(), v.size());
}

double min_value(std::span<const double> v) { return ops().min_value(v.data(), v.size()); }

double max_abs_dev(std::span<const double> v, double center) {
  return ops().max_abs_dev(v.data(), center, v.size());
}

PairMoments pair_moments(std::span<const double> x, std::span<const double> y) {
  return ops().pair_moments(x.data(), y.data(), std::min(x.size(), y.size()));
}

}  // namespace bivadj::kernels
