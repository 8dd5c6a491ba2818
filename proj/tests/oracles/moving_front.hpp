#pragma once

#include <functional>

namespace wulffspread::oracle {

struct MovingFrontResult {
  double average_speed = 0.0;  // least-squares slope of X(t) over [T/2, T]
  double final_position = 0.0;
};

/// u_t = u_xx + f(t, u) in 1D from a step datum, solved with its own explicit
/// scheme in a window of half width `half_window` that is shifted by whole
/// cells to keep the level-1/2 point centred. Independent of the simulator.
MovingFrontResult moving_front_speed(const std::function<double(double, double)>& f, double T,
                                     double h, double half_window = 50.0);

}  // namespace wulffspread::oracle
