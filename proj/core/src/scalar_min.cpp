#include "ftalloc/scalar_min.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ftalloc/error.hpp"

namespace ftalloc {

namespace {

constexpr double kGolden = 0.3819660112501051;  // (3 - sqrt(5)) / 2
const double kSqrtEps = std::sqrt(std::numeric_limits<double>::epsilon());
constexpr int kEndpointEvals = 2;
constexpr int kStagnationSteps = 3;

void check_args(double a, double b, double xtol, int max_eval) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::kInterval, "interval requires finite a < b");
  }
  if (!(xtol > 0.0)) throw Error(ErrorCode::kInterval, "xtol must be positive");
  if (max_eval < 1 + kEndpointEvals) {
    throw Error(ErrorCode::kInterval, "max_eval too small");
  }
}

// Counts evaluations and maps NaN to +inf.
class Counted {
 public:
  explicit Counted(const ScalarFunction& f) : f_(f) {}
  double operator()(double x) {
    ++count;
    const double y = f_(x);
    return std::isnan(y) ? std::numeric_limits<double>::infinity() : y;
  }
  int count = 0;

 private:
  const ScalarFunction& f_;
};

// Half-width tolerance; the final bracket satisfies max(x-a, b-x) <= 2*tol,
// so the error is at most xtol as long as the relative term stays small.
double step_tol(double x, double xtol) {
  return kSqrtEps * std::abs(x) * 0.25 + xtol / 3.0;
}

BracketResult finish(Counted& f, double a, double b, double x, double fx,
                     bool converged) {
  const double fa = f(a);
  if (fa <= fx) {
    x = a;
    fx = fa;
  }
  const double fb = f(b);
  if (fb < fx) {
    x = b;
    fx = fb;
  }
  return {x, fx, f.count, converged};
}

}  // namespace

BracketResult brent_minimize(const ScalarFunction& func, double a0, double b0,
                             double xtol, int max_eval) {
  check_args(a0, b0, xtol, max_eval);
  Counted f(func);
  const int budget = max_eval - kEndpointEvals;

  double a = a0, b = b0;
  double x = a + kGolden * (b - a);
  double w = x, v = x;
  double fx = f(x);
  double fw = fx, fv = fx;
  double d = 0.0, e = 0.0;

  int parabolic_streak = 0;
  double streak_width = b - a;
  bool converged = false;

  while (true) {
    const double m = 0.5 * (a + b);
    const double tol = step_tol(x, xtol);
    const double t2 = 2.0 * tol;
    if (std::abs(x - m) <= t2 - 0.5 * (b - a)) {
      converged = true;
      break;
    }
    if (f.count >= budget) break;

    const bool force_golden = parabolic_streak >= kStagnationSteps &&
                              (b - a) > (1.0 - kGolden) * streak_width;
    if (parabolic_streak >= kStagnationSteps) {
      parabolic_streak = 0;
      streak_width = b - a;
    }

    bool parabolic = false;
    if (!force_golden && std::abs(e) > tol && std::isfinite(fx) &&
        std::isfinite(fw) && std::isfinite(fv)) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) &&
          p < q * (b - x)) {
        e = d;
        d = p / q;
        const double u = x + d;
        if ((u - a) < t2 || (b - u) < t2) d = (x < m) ? tol : -tol;
        parabolic = true;
      }
    }
    if (!parabolic) {
      e = ((x < m) ? b : a) - x;
      d = kGolden * e;
      parabolic_streak = 0;
      streak_width = b - a;
    } else {
      if (parabolic_streak == 0) streak_width = b - a;
      ++parabolic_streak;
    }

    const double u = x + ((std::abs(d) >= tol) ? d : (d > 0.0 ? tol : -tol));
    const double fu = f(u);

    if (fu <= fx) {
      if (u < x) {
        b = x;
      } else {
        a = x;
      }
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return finish(f, a0, b0, x, fx, converged);
}

BracketResult golden_section_minimize(const ScalarFunction& func, double a0,
                                      double b0, double xtol, int max_eval) {
  check_args(a0, b0, xtol, max_eval);
  Counted f(func);
  const int budget = max_eval - kEndpointEvals;

  double a = a0, b = b0;
  double c = a + kGolden * (b - a);
  double d = b - kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  bool converged = false;
  while (true) {
    const double x = (fc <= fd) ? c : d;
    const double m = 0.5 * (a + b);
    if (std::abs(x - m) <= 2.0 * step_tol(x, xtol) - 0.5 * (b - a)) {
      converged = true;
      break;
    }
    if (f.count >= budget) break;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = a + kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = b - kGolden * (b - a);
      fd = f(d);
    }
  }
  const double x = (fc <= fd) ? c : d;
  return finish(f, a0, b0, x, std::min(fc, fd), converged);
}

}  // namespace ftalloc
