#include "vesselaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "vesselaudit/raster.hpp"

namespace vaudit {
namespace {

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) {
    throw Error("correlation is undefined: zero rank variance");
  }
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

void check_paired(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("paired samples differ in length");
  for (double v : x) {
    if (!std::isfinite(v)) throw Error("sample contains a non-finite value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw Error("sample contains a non-finite value");
  }
}

std::vector<double> rank_vector(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the mean one-based rank
    double shared = static_cast<double>(i + j) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("sample contains a non-finite value");
  }
  return rank_vector(values);
}

StatTestResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y) {
  check_paired(x, y);

  std::vector<double> abs_diff;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d == 0.0) continue;
    abs_diff.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  const int m = static_cast<int>(abs_diff.size());

  StatTestResult res;
  res.method = PValueMethod::exact_enumeration;
  res.n = m;
  if (m == 0) {
    res.degenerate = true;
    res.p_value = 1.0;
    return res;
  }
  if (m > 20) {
    throw Error("exact signed-rank enumeration supports at most 20 nonzero differences");
  }

  // Midranks of |d| are multiples of 1/2; doubling keeps everything integral.
  const std::vector<double> ranks = rank_vector(abs_diff);
  std::vector<int> ranks2(m);
  for (int i = 0; i < m; ++i) ranks2[i] = static_cast<int>(std::lround(2.0 * ranks[i]));

  const int total2 = m * (m + 1);
  int w2 = 0;
  for (int i = 0; i < m; ++i) {
    if (positive[i]) w2 += ranks2[i];
  }

  // Null distribution of the doubled positive-rank sum over all 2^m sign
  // assignments, by subset-sum counting.
  std::vector<std::uint64_t> count(total2 + 1, 0);
  count[0] = 1;
  for (int i = 0; i < m; ++i) {
    for (int s = total2; s >= ranks2[i]; --s) {
      count[s] += count[s - ranks2[i]];
    }
  }

  const int lo2 = std::min(w2, total2 - w2);
  const int hi2 = std::max(w2, total2 - w2);
  std::uint64_t tail = 0;
  for (int s = 0; s <= lo2; ++s) tail += count[s];
  for (int s = hi2; s <= total2; ++s) tail += count[s];

  res.statistic = w2 / 2.0;
  res.p_value = std::min(1.0, static_cast<double>(tail) / std::ldexp(1.0, m));
  return res;
}

StatTestResult spearman(std::span<const double> x, std::span<const double> y) {
  check_paired(x, y);
  const int n = static_cast<int>(x.size());
  if (n < 3) throw Error("rank correlation requires at least 3 pairs");

  const std::vector<double> rx = rank_vector(x);
  const std::vector<double> ry = rank_vector(y);
  const double rho = pearson(rx, ry);

  StatTestResult res;
  res.statistic = rho;
  res.method = PValueMethod::t_approximation;
  res.n = n;
  const double denom = 1.0 - rho * rho;
  if (denom <= 0.0) {
    res.p_value = std::numeric_limits<double>::min();
    return res;
  }
  const double t = rho * std::sqrt(static_cast<double>(n - 2) / denom);
  res.p_value = std::max(student_t_two_sided_p(t, n - 2),
                         std::numeric_limits<double>::min());
  return res;
}

StatTestResult spearman_exact(std::span<const double> x, std::span<const double> y) {
  check_paired(x, y);
  const int n = static_cast<int>(x.size());
  if (n < 3) throw Error("rank correlation requires at least 3 pairs");
  if (n > 8) throw Error("exact permutation test supports at most 8 pairs");

  const std::vector<double> rx = rank_vector(x);
  const std::vector<double> ry = rank_vector(y);
  const double rho = pearson(rx, ry);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<double> permuted(n);
  std::uint64_t at_least = 0;
  std::uint64_t total = 0;
  const double cut = std::fabs(rho) - 1e-12;
  do {
    for (int i = 0; i < n; ++i) permuted[i] = ry[perm[i]];
    if (std::fabs(pearson(rx, permuted)) >= cut) ++at_least;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));

  StatTestResult res;
  res.statistic = rho;
  res.method = PValueMethod::exact_enumeration;
  res.n = n;
  res.p_value = static_cast<double>(at_least) / static_cast<double>(total);
  return res;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete beta requires positive shape");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, int dof) {
  if (dof < 1) throw Error("t distribution requires at least 1 degree of freedom");
  if (!std::isfinite(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return regularized_incomplete_beta(dof / 2.0, 0.5, x);
}

}  // namespace vaudit
