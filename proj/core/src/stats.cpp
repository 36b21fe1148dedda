#include "lentparticle/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "lentparticle/error.hpp"

namespace lp {

Estimate mean_se(std::span<const double> x) {
  Estimate e;
  e.n = x.size();
  if (x.empty()) return e;
  double s = 0.0;
  for (double v : x) s += v;
  const double m = s / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  e.value = m;
  if (x.size() > 1) e.se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
  return e;
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean_se(x).value;
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

Estimate paired_difference(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorKind::Domain, "paired_difference: size mismatch");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  return mean_se(d);
}

double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.27) return 1.0;
  if (x < 1.0) {
    // small-x form: sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2))
    const double f = -std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    double s = 0.0;
    for (int k = 1; k <= 6; ++k) s += std::exp(f * (2 * k - 1) * (2 * k - 1));
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s;
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  KsResult r;
  r.n = x.size();
  if (x.empty()) return r;
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  r.statistic = d;
  const double sn = std::sqrt(n);
  r.p_value = kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  KsResult r;
  if (x.empty() || y.empty()) return r;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  r.statistic = d;
  r.n = x.size() + y.size();
  const double ne = std::sqrt(n * m / (n + m));
  r.p_value = kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

ChiSquareResult chi_square_counts(std::span<const int> counts, const std::function<double(int)>& pmf) {
  if (counts.empty()) fail(ErrorKind::Domain, "chi_square_counts: empty sample");
  const int kmax = *std::max_element(counts.begin(), counts.end());
  const double n = static_cast<double>(counts.size());
  std::vector<double> obs(kmax + 2, 0.0), expct(kmax + 2, 0.0);
  for (int c : counts) obs[c] += 1.0;
  double cum = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    expct[k] = n * pmf(k);
    cum += pmf(k);
  }
  expct[kmax + 1] = n * std::max(0.0, 1.0 - cum);
  // merge cells left to right until each expected count reaches 5
  std::vector<double> mo, me;
  double ao = 0.0, ae = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    ao += obs[k];
    ae += expct[k];
    if (ae >= 5.0) {
      mo.push_back(ao);
      me.push_back(ae);
      ao = ae = 0.0;
    }
  }
  if (ae > 0.0 || ao > 0.0) {
    if (me.empty()) {
      mo.push_back(ao);
      me.push_back(ae);
    } else {
      mo.back() += ao;
      me.back() += ae;
    }
  }
  ChiSquareResult r;
  for (std::size_t k = 0; k < mo.size(); ++k) r.statistic += (mo[k] - me[k]) * (mo[k] - me[k]) / me[k];
  r.dof = static_cast<int>(mo.size()) - 1;
  r.p_value = r.dof > 0 ? boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic) : 1.0;
  return r;
}

double quantile_sorted(std::span<const double> s, double q) {
  if (s.empty()) fail(ErrorKind::Domain, "quantile of empty sample");
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= s.size()) return s.back();
  const double f = pos - static_cast<double>(i);
  return s[i] + f * (s[i + 1] - s[i]);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || (!w.empty() && w.size() != n)) fail(ErrorKind::Domain, "linear_fit: bad input sizes");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
    syy += wi * (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.rss = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0 ? 1.0 - f.rss / syy : 1.0;
  return f;
}

}  // namespace lp
