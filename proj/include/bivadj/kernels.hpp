#pragma once

#include <cstddef>
#include <span>

// Data-parallel reduction kernels used by the likelihood and summary paths.
// Scalar reference implementations are the source of truth; an AVX2+FMA
// variant is selected at runtime when the CPU supports it. The two backends
// are equivalence-tested against each other in tests/test_kernels.cpp.
//
// Backend selection can be pinned with set_backend() or the BIVADJ_KERNELS
// environment variable ("scalar" or "avx2"), checked once at first use.

namespace bivadj::kernels {

enum class Backend { Auto, Scalar, Avx2 };

bool avx2_available();
void set_backend(Backend b);
Backend active_backend();  // resolved: Scalar or Avx2
const char* backend_name();

struct PairMoments {
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
};

/// Sum a[i]*b[i].
double dot(std::span<const double> a, std::span<const double> b);

/// out[i] = 1 + alpha*hx[i]*hy[i].
void bracket(double alpha, std::span<const double> hx, std::span<const double> hy,
             std::span<double> out);

/// Sum w[i]*log(v[i]); returns -infinity if any v[i] <= 0 (or NaN).
/// v values must be normal doubles (no subnormals), which holds for the
/// likelihood brackets this is applied to.
double weighted_log_sum(std::span<const double> w, std::span<const double> v);

/// Minimum element; +infinity for an empty span.
double min_value(std::span<const double> v);

/// max |v[i] - center|; 0 for an empty span.
double max_abs_dev(std::span<const double> v, double center);

/// First and second moment sums of a pair sample.
PairMoments pair_moments(std::span<const double> x, std::span<const double> y);

namespace detail {

struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  void (*bracket)(double, const double*, const double*, double*, std::size_t);
  double (*weighted_log_sum)(const double*, const double*, std::size_t);
  double (*min_value)(const double*, std::size_t);
  double (*max_abs_dev)(const double*, double, std::size_t);
  PairMoments (*pair_moments)(const double*, const double*, std::size_t);
  const char* name;
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unsupported at build or run time

}  // namespace detail

}  // namespace bivadj::kernels
