#include "oracles/moving_front.hpp"

#include <cmath>
#include <vector>

namespace wulffspread::oracle {

MovingFrontResult moving_front_speed(const std::function<double(double, double)>& f, double T,
                                     double h, double half_window) {
  const int n = 2 * static_cast<int>(std::lround(half_window / h)) + 1;
  const int mid = n / 2;
  // dt (2 / h^2 + 2) <= 0.9 is a monotone step for |f_u| <= 2.
  const double dt_max = 0.9 / (2.0 / (h * h) + 2.0);
  const long steps = static_cast<long>(std::ceil(T / dt_max));
  const double dt = T / steps;

  std::vector<double> u(n), next(n);
  for (int i = 0; i < n; ++i) u[i] = i <= mid ? 1.0 : 0.0;
  long shift = 0;  // cells the window has moved right

  auto position = [&]() {
    for (int i = n - 2; i >= 0; --i)
      if (u[i] >= 0.5) return (shift + i - mid) * h + h * (u[i] - 0.5) / (u[i] - u[i + 1]);
    return 0.0;
  };

  double st = 0, sx = 0, stt = 0, stx = 0;
  long samples = 0;
  const long every = std::max(1L, std::lround(0.5 / dt));
  for (long k = 1; k <= steps; ++k) {
    double t = (k - 1) * dt;
    next[0] = 1.0;
    next[n - 1] = 0.0;
    for (int i = 1; i < n - 1; ++i)
      next[i] = u[i] + dt * ((u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h) + f(t, u[i]));
    u.swap(next);
    // Keep the front within a few cells of the window centre.
    double x = position() - shift * h;
    int cells = static_cast<int>(std::floor(x / h));
    if (cells != 0) {
      std::vector<double> moved(n);
      for (int i = 0; i < n; ++i) {
        int src = i + cells;
        moved[i] = src < 0 ? 1.0 : (src >= n ? 0.0 : u[src]);
      }
      u.swap(moved);
      shift += cells;
    }
    double time = k * dt;
    if (time >= 0.5 * T && k % every == 0) {
      double X = position();
      st += time, sx += X, stt += time * time, stx += time * X;
      ++samples;
    }
  }
  MovingFrontResult r;
  double mt = st / samples, mx = sx / samples;
  r.average_speed = (stx / samples - mt * mx) / (stt / samples - mt * mt);
  r.final_position = position();
  return r;
}

}  // namespace wulffspread::oracle
