#include "tpc/statistics.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "tpc/errors.hpp"

namespace tpc::stats {

double chi_square_sf(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(dof) / 2.0, statistic / 2.0);
}

ChiSquare chi_square_homogeneity(const std::map<std::string, std::size_t>& first,
                                 const std::map<std::string, std::size_t>& second, std::size_t min_pooled) {
  std::set<std::string> keys;
  for (const auto& [k, _] : first) keys.insert(k);
  for (const auto& [k, _] : second) keys.insert(k);

  auto count = [](const std::map<std::string, std::size_t>& m, const std::string& k) -> double {
    auto it = m.find(k);
    return it == m.end() ? 0.0 : static_cast<double>(it->second);
  };

  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> pooled{0.0, 0.0};
  for (const auto& k : keys) {
    double a = count(first, k);
    double b = count(second, k);
    if (a + b < static_cast<double>(min_pooled)) {
      pooled.first += a;
      pooled.second += b;
    } else {
      bins.emplace_back(a, b);
    }
  }
  if (pooled.first + pooled.second > 0) bins.push_back(pooled);

  double n1 = 0, n2 = 0;
  for (auto [a, b] : bins) {
    n1 += a;
    n2 += b;
  }
  ChiSquare out;
  if (bins.size() < 2 || n1 == 0 || n2 == 0) return out;
  const double total = n1 + n2;
  for (auto [a, b] : bins) {
    const double col = a + b;
    const double ea = col * n1 / total;
    const double eb = col * n2 / total;
    out.statistic += (a - ea) * (a - ea) / ea + (b - eb) * (b - eb) / eb;
  }
  out.dof = bins.size() - 1;
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

ChiSquare chi_square_gof(const std::vector<std::size_t>& observed, const std::vector<double>& expected_probs) {
  if (observed.size() != expected_probs.size() || observed.size() < 2)
    throw InvalidArgument("chi_square_gof: mismatched or too few bins");
  double n = 0;
  for (auto o : observed) n += static_cast<double>(o);
  ChiSquare out;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * expected_probs[i];
    if (e <= 0) throw InvalidArgument("chi_square_gof: expected count must be positive");
    const double d = static_cast<double>(observed[i]) - e;
    out.statistic += d * d / e;
  }
  out.dof = observed.size() - 1;
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

double Proportion::sigma_at(double p) const {
  if (trials == 0) return 0.0;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

std::pair<double, double> Proportion::wilson95() const {
  if (trials == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = rate();
  const double denom = 1 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
          next = count;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tpc::stats
