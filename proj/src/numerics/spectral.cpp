#include <fftw3.h>

#include <cmath>
#include <cstring>

#include "dba/numerics.hpp"

namespace dba {

Grid Grid::make(int n, double length) {
  if (n < 16 || (n & (n - 1)) != 0) throw NumericError("grid size must be a power of two >= 16");
  if (!(length > 0)) throw NumericError("grid length must be positive");
  Grid g{n, length, Array(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) g.x[static_cast<std::size_t>(i)] = length * i / n;
  return g;
}

struct Spectral::Plans {
  int n;
  double* real;
  fftw_complex* half;
  fftw_complex* full;
  fftw_complex* full_out;
  fftw_plan r2c, c2r, fwd, bwd;

  explicit Plans(int n_) : n(n_) {
    real = fftw_alloc_real(static_cast<std::size_t>(n));
    half = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    full = fftw_alloc_complex(static_cast<std::size_t>(n));
    full_out = fftw_alloc_complex(static_cast<std::size_t>(n));
    r2c = fftw_plan_dft_r2c_1d(n, real, half, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_1d(n, half, real, FFTW_ESTIMATE);
    fwd = fftw_plan_dft_1d(n, full, full_out, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(n, full_out, full, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plans() {
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(half);
    fftw_free(full);
    fftw_free(full_out);
  }
};

Spectral::Spectral(const Grid& g) : grid_(g), plans_(std::make_unique<Plans>(g.n)) {}
Spectral::~Spectral() = default;

namespace {

// (ik)^order for mode index m of an n-point transform on length L.
std::complex<double> multiplier(int m, int n, double length, int order) {
  if (order == 0) return 1.0;
  int k = m <= n / 2 ? m : m - n;
  if (2 * k == n && order % 2 == 1) return 0.0;
  double w = 2 * M_PI * k / length;
  std::complex<double> ik(0.0, w), out(1.0, 0.0);
  for (int i = 0; i < order; ++i) out *= ik;
  return out;
}

bool truncated(int m, int n) {
  int k = m <= n / 2 ? m : n - m;
  return 3 * k > n;
}

}  // namespace

Array Spectral::derivative(const Array& f, int order, bool dealias) const {
  const int n = grid_.n;
  if (static_cast<int>(f.size()) != n) throw NumericError("array length does not match grid");
  if (order == 0 && !dealias) return f;
  Plans& p = *plans_;
  std::memcpy(p.real, f.data(), sizeof(double) * static_cast<std::size_t>(n));
  fftw_execute(p.r2c);
  for (int m = 0; m <= n / 2; ++m) {
    std::complex<double> c(p.half[m][0], p.half[m][1]);
    c *= multiplier(m, n, grid_.length, order) / static_cast<double>(n);
    if (dealias && truncated(m, n)) c = 0.0;
    p.half[m][0] = c.real();
    p.half[m][1] = c.imag();
  }
  fftw_execute(p.c2r);
  return Array(p.real, p.real + n);
}

void Spectral::dealias(Array& f) const { f = derivative(f, 0, true); }

std::vector<Spectral::Complex> Spectral::derivative(const std::vector<Complex>& f, int order) const {
  const int n = grid_.n;
  Plans& p = *plans_;
  std::memcpy(p.full, f.data(), sizeof(fftw_complex) * static_cast<std::size_t>(n));
  fftw_execute(p.fwd);
  for (int m = 0; m < n; ++m) {
    std::complex<double> mult = multiplier(m, n, grid_.length, order);
    std::complex<double> c(p.full_out[m][0], p.full_out[m][1]);
    c *= mult / static_cast<double>(n);
    p.full_out[m][0] = c.real();
    p.full_out[m][1] = c.imag();
  }
  fftw_execute(p.bwd);
  std::vector<Complex> out(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) out[static_cast<std::size_t>(m)] = Complex(p.full[m][0], p.full[m][1]);
  return out;
}

double integrate(const Array& f, const Grid& g) {
  double s = 0;
  for (double v : f) s += v;
  return s * g.dx();
}

Array periodic_sech(const Grid& g, double center, int power) {
  Array out(static_cast<std::size_t>(g.n), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int img = -1; img <= 1; ++img) out[i] += std::pow(1.0 / std::cosh(g.x[i] - center - img * g.length), power);
  return out;
}

}  // namespace dba
