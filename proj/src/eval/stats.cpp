#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "argq/errors.hpp"
#include "argq/eval.hpp"

namespace argq::eval {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sum_sq_dev(std::span<const double> v, double m) {
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

double lower_tail(double t, double df) {
  const boost::math::students_t dist(df);
  return boost::math::cdf(dist, t);
}

double degenerate(double diff) {
  if (diff == 0.0) return 0.5;
  return diff < 0.0 ? 0.0 : 1.0;
}

}  // namespace

double mae(std::span<const double> predictions, std::span<const double> gold) {
  if (predictions.empty()) throw Error("MAE of an empty sample");
  if (predictions.size() != gold.size()) throw Error("MAE inputs differ in length");
  double s = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) s += std::abs(predictions[i] - gold[i]);
  return s / static_cast<double>(gold.size());
}

double macro_mae(std::span<const double> fold_maes) {
  if (fold_maes.empty()) throw Error("macro MAE needs at least one fold");
  return mean_of(fold_maes);
}

double t_test_one_tailed(std::span<const double> a, std::span<const double> b, bool paired) {
  if (a.size() < 2 || b.size() < 2) throw Error("t-test needs at least 2 values per sample");
  if (paired) {
    if (a.size() != b.size()) throw Error("paired t-test needs equal sample sizes");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double md = mean_of(d);
    const double n = static_cast<double>(d.size());
    const double var = sum_sq_dev(d, md) / (n - 1);
    if (var == 0.0) return degenerate(md);
    return lower_tail(md / std::sqrt(var / n), n - 1);
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double pooled = (sum_sq_dev(a, ma) + sum_sq_dev(b, mb)) / (na + nb - 2);
  if (pooled == 0.0) return degenerate(ma - mb);
  const double t = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  return lower_tail(t, na + nb - 2);
}

Significance significance_of(std::optional<double> p) {
  if (!p) return Significance::none;
  if (*p < 0.01) return Significance::p01;
  if (*p < 0.05) return Significance::p05;
  return Significance::none;
}

std::string_view mark(Significance s) {
  switch (s) {
    case Significance::p05:
      return "\xE2\x80\xA0";
    case Significance::p01:
      return "\xE2\x80\xA1";
    case Significance::none:
      break;
  }
  return "";
}

}  // namespace argq::eval
