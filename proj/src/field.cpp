#include "mmt/field.hpp"

#include <cmath>

namespace mmt {

double l2_norm(const ComplexField& f) {
  double acc = 0.0;
  for (const complexd& v : f.samples) acc += std::norm(v);
  return std::sqrt(acc / static_cast<double>(f.size()));
}

double l2_norm(const RealField& f) {
  double acc = 0.0;
  for (double v : f.samples) acc += v * v;
  return std::sqrt(acc / static_cast<double>(f.size()));
}

double sup_norm(const ComplexField& f) {
  double m = 0.0;
  for (const complexd& v : f.samples) m = std::max(m, std::abs(v));
  return m;
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

}  // namespace mmt
