#include "mmt/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace mmt {

namespace {

// FFTW plan creation is not thread-safe; execution on distinct buffers is.
// Plans are cached per (rows, cols, sign) and created UNALIGNED so they can
// run on any buffer via fftw_execute_dft.
class PlanCache {
 public:
  static fftw_plan get(std::size_t rows, std::size_t cols, int sign) {
    static PlanCache cache;
    std::lock_guard<std::mutex> lock(cache.mutex_);
    auto key = std::make_tuple(rows, cols, sign);
    auto it = cache.plans_.find(key);
    if (it != cache.plans_.end()) return it->second;
    std::vector<complexd> scratch(rows * cols);
    fftw_plan p = fftw_plan_dft_2d(
        static_cast<int>(rows), static_cast<int>(cols),
        reinterpret_cast<fftw_complex*>(scratch.data()),
        reinterpret_cast<fftw_complex*>(scratch.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

void run_fft(const Grid& g, const complexd* in, complexd* out, int sign) {
  fftw_plan p = PlanCache::get(g.rows, g.cols, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<complexd*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

SpectralField forward_transform(const ComplexField& f) {
  SpectralField s(f.grid);
  run_fft(f.grid, f.samples.data(), s.coeff.data(), FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(f.size());
  for (complexd& c : s.coeff) c *= scale;
  return s;
}

ComplexField inverse_transform(const SpectralField& s) {
  ComplexField f(s.grid);
  run_fft(s.grid, s.coeff.data(), f.samples.data(), FFTW_BACKWARD);
  return f;
}

namespace {

template <typename MultiplierFn>
ComplexField apply_multiplier(const ComplexField& f, MultiplierFn&& mult) {
  SpectralField s = forward_transform(f);
  const std::size_t rows = s.grid.rows, cols = s.grid.cols;
  for (std::size_t kr = 0; kr < rows; ++kr) {
    const long n = SpectralField::signed_freq(kr, rows);
    for (std::size_t kc = 0; kc < cols; ++kc) {
      const long m = SpectralField::signed_freq(kc, cols);
      s.at(kr, kc) *= mult(m, n);
    }
  }
  return inverse_transform(s);
}

}  // namespace

ComplexField d_z(const ComplexField& f) {
  return apply_multiplier(f, [](long m, long n) {
    return complexd(kPi * static_cast<double>(n), kPi * static_cast<double>(m));
  });
}

ComplexField d_zbar(const ComplexField& f) {
  return apply_multiplier(f, [](long m, long n) {
    return complexd(-kPi * static_cast<double>(n), kPi * static_cast<double>(m));
  });
}

ComplexField dbar_inverse(const ComplexField& f, double mean_tol) {
  const complexd mu = f.mean();
  if (std::abs(mu) > mean_tol) {
    throw std::invalid_argument(
        "dbar_inverse: field mean " + std::to_string(mu.real()) + (mu.imag() < 0 ? "" : "+") +
        std::to_string(mu.imag()) + "i exceeds tolerance " + std::to_string(mean_tol));
  }
  return apply_multiplier(f, [](long m, long n) {
    if (m == 0 && n == 0) return complexd(0.0, 0.0);
    return 1.0 / complexd(-kPi * static_cast<double>(n), kPi * static_cast<double>(m));
  });
}

ComplexField beurling(const ComplexField& f) {
  return apply_multiplier(f, [](long m, long n) {
    if (m == 0 && n == 0) return complexd(0.0, 0.0);  // zero mode dropped
    const complexd num(static_cast<double>(n), static_cast<double>(m));
    const complexd den(-static_cast<double>(n), static_cast<double>(m));
    return num / den;
  });
}

ComplexField remove_mean(const ComplexField& f) {
  const complexd mu = f.mean();
  ComplexField out = f;
  for (complexd& v : out.samples) v -= mu;
  return out;
}

namespace {

// Phase tables exp(2 pi i k x) in FFT index order, by incremental multiplication.
void fill_phases(std::vector<complexd>& table, std::size_t n, double x) {
  const complexd w = std::polar(1.0, kTwoPi * x);
  const complexd w_inv = std::conj(w);
  complexd acc(1.0, 0.0);
  for (std::size_t k = 0; k < n / 2; ++k) {
    table[k] = acc;
    acc *= w;
  }
  acc = complexd(1.0, 0.0);
  for (std::size_t k = n; k-- > n / 2;) {
    acc *= w_inv;
    table[k] = acc;
  }
}

complexd eval_with_phases(const SpectralField& s, const std::vector<complexd>& ex,
                          const std::vector<complexd>& ey) {
  const std::size_t rows = s.grid.rows, cols = s.grid.cols;
  complexd total(0.0, 0.0);
  for (std::size_t kr = 0; kr < rows; ++kr) {
    complexd row_acc(0.0, 0.0);
    const complexd* row = s.coeff.data() + kr * cols;
    for (std::size_t kc = 0; kc < cols; ++kc) row_acc += row[kc] * ex[kc];
    total += row_acc * ey[kr];
  }
  return total;
}

}  // namespace

void spectral_evaluate(const SpectralField& s, std::span<const double> xs,
                       std::span<const double> ys, std::span<complexd> out) {
  std::vector<complexd> ex(s.grid.cols), ey(s.grid.rows);
  for (std::size_t p = 0; p < xs.size(); ++p) {
    fill_phases(ex, s.grid.cols, xs[p]);
    fill_phases(ey, s.grid.rows, ys[p]);
    out[p] = eval_with_phases(s, ex, ey);
  }
}

void spectral_evaluate_shared(std::span<const SpectralField> fields, double x, double y,
                              std::span<complexd> out) {
  if (fields.empty()) return;
  std::vector<complexd> ex(fields[0].grid.cols), ey(fields[0].grid.rows);
  fill_phases(ex, fields[0].grid.cols, x);
  fill_phases(ey, fields[0].grid.rows, y);
  for (std::size_t f = 0; f < fields.size(); ++f) out[f] = eval_with_phases(fields[f], ex, ey);
}

complexd spectral_evaluate_one(const SpectralField& s, double x, double y) {
  complexd out;
  spectral_evaluate(s, std::span<const double>(&x, 1), std::span<const double>(&y, 1),
                    std::span<complexd>(&out, 1));
  return out;
}

}  // namespace mmt
