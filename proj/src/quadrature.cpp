#include "platehom/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include "platehom/errors.hpp"

namespace platehom {

namespace {

GaussRule compute_gauss(int n) {
  // Newton iteration on Legendre polynomials, standard Golub-Welsch-free way.
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  if (n < 1) fail(ErrKind::ValidationError, "gauss rule needs n >= 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
  return it->second;
}

namespace {

template <class T>
T pairwise_sum_impl(std::vector<T>& v) {
  if (v.empty()) return T(0);
  size_t n = v.size();
  while (n > 1) {
    size_t half = n / 2;
    for (size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (n % 2) {
      v[half] = v[n - 1];
      n = half + 1;
    } else {
      n = half;
    }
  }
  return v[0];
}

}  // namespace

double pairwise_sum(std::vector<double>& v) { return pairwise_sum_impl(v); }
std::complex<double> pairwise_sum(std::vector<std::complex<double>>& v) {
  return pairwise_sum_impl(v);
}

std::vector<double> build_breaks(double lo, double hi, double h_max,
                                 const std::vector<double>& must_hit) {
  if (!(hi > lo)) fail(ErrKind::ValidationError, "empty integration interval");
  std::vector<double> base{lo, hi};
  for (double b : must_hit)
    if (b > lo + 1e-14 && b < hi - 1e-14) base.push_back(b);
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-14; }),
             base.end());
  std::vector<double> out;
  out.reserve(size_t((hi - lo) / h_max) + base.size() + 2);
  for (size_t i = 0; i + 1 < base.size(); ++i) {
    double a = base[i], b = base[i + 1];
    int m = std::max(1, int(std::ceil((b - a) / h_max - 1e-12)));
    for (int k = 0; k < m; ++k) out.push_back(a + (b - a) * k / m);
  }
  out.push_back(base.back());
  return out;
}

namespace {

template <class T, class F>
T integrate_tiles_impl(const std::vector<double>& bt, const std::vector<double>& bs,
                       int nodes, const F& f, int threads) {
  const GaussRule& g = gauss_rule(nodes);
  size_t nt = bt.size() - 1, ns = bs.size() - 1;
  std::vector<T> tile(nt * ns, T(0));
  auto work = [&](size_t begin, size_t end) {
    for (size_t id = begin; id < end; ++id) {
      size_t i = id / ns, j = id % ns;
      double t0 = bt[i], t1 = bt[i + 1];
      double s0 = bs[j], s1 = bs[j + 1];
      double ht = 0.5 * (t1 - t0), hs = 0.5 * (s1 - s0);
      double ct = 0.5 * (t1 + t0), cs = 0.5 * (s1 + s0);
      T acc(0);
      for (int a = 0; a < nodes; ++a) {
        double t = ct + ht * g.nodes[a];
        T row(0);
        for (int b = 0; b < nodes; ++b) {
          double s = cs + hs * g.nodes[b];
          row += f(t, s) * g.weights[b];
        }
        acc += row * g.weights[a];
      }
      tile[id] = acc * (ht * hs);
    }
  };
  size_t total = nt * ns;
  if (threads <= 1 || total < 64) {
    work(0, total);
  } else {
    size_t nthreads = std::min<size_t>(threads, 64);
    std::vector<std::thread> pool;
    size_t chunk = (total + nthreads - 1) / nthreads;
    for (size_t k = 0; k < nthreads; ++k) {
      size_t b = k * chunk, e = std::min(total, b + chunk);
      if (b >= e) break;
      pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return pairwise_sum_impl(tile);
}

}  // namespace

double integrate_tiles(const std::vector<double>& breaks_t,
                       const std::vector<double>& breaks_s, int nodes,
                       const std::function<double(double, double)>& f, int threads) {
  return integrate_tiles_impl<double>(breaks_t, breaks_s, nodes, f, threads);
}

std::complex<double> integrate_tiles_complex(
    const std::vector<double>& breaks_t, const std::vector<double>& breaks_s,
    int nodes, const std::function<std::complex<double>(double, double)>& f,
    int threads) {
  return integrate_tiles_impl<std::complex<double>>(breaks_t, breaks_s, nodes, f,
                                                    threads);
}

double integrate_1d(const std::vector<double>& breaks, int nodes,
                    const std::function<double(double)>& f) {
  const GaussRule& g = gauss_rule(nodes);
  std::vector<double> parts(breaks.size() - 1, 0.0);
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    double h = 0.5 * (breaks[i + 1] - breaks[i]);
    double c = 0.5 * (breaks[i + 1] + breaks[i]);
    double acc = 0.0;
    for (int a = 0; a < nodes; ++a) acc += g.weights[a] * f(c + h * g.nodes[a]);
    parts[i] = acc * h;
  }
  return pairwise_sum(parts);
}

}  // namespace platehom
