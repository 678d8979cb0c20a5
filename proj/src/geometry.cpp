#include "ptone/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace ptone {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

[[noreturn]] void fail_domain(const std::string& msg) {
  throw std::domain_error(msg);
}

[[noreturn]] void fail_arg(const std::string& msg) {
  throw std::invalid_argument(msg);
}

// log(sinh x) without overflow for large x.
double log_sinh(double x) {
  if (x <= 0.0) fail_domain("log_sinh: argument must be positive");
  if (x > 20.0) return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
  return std::log(std::sinh(x));
}

// Antiderivatives of sinh^m and sin^m vanishing at 0, m = 1..3.
double int_sinh_pow(int m, double x) {
  const double c = std::cosh(x);
  switch (m) {
    case 1: {
      const double s = std::sinh(0.5 * x);
      return 2.0 * s * s;  // cosh x - 1, stable near 0
    }
    case 2:
      return 0.5 * (std::sinh(x) * c - x);
    case 3:
      return (c - 1.0) * (c - 1.0) * (c + 2.0) / 3.0;
    default:
      fail_arg("int_sinh_pow: unsupported power");
  }
}

double int_sin_pow(int m, double x) {
  const double c = std::cos(x);
  switch (m) {
    case 1: {
      const double s = std::sin(0.5 * x);
      return 2.0 * s * s;  // 1 - cos x
    }
    case 2:
      return 0.5 * (x - std::sin(x) * c);
    case 3:
      return (1.0 - c) * (1.0 - c) * (c + 2.0) / 3.0;
    default:
      fail_arg("int_sin_pow: unsupported power");
  }
}

struct SimpsonPanel {
  double a, b, fa, fm, fb, estimate;
};

double simpson_estimate(const std::function<double(double)>& f, double a,
                        double b, double fa, double fb, double* fm) {
  const double m = 0.5 * (a + b);
  *fm = f(m);
  return (b - a) / 6.0 * (fa + 4.0 * (*fm) + fb);
}

double adaptive_step(const std::function<double(double)>& f,
                     const SimpsonPanel& panel, double tol, int depth) {
  if (depth > 60)
    throw std::runtime_error("adaptive_simpson: recursion limit reached");
  const double m = 0.5 * (panel.a + panel.b);
  double flm = 0.0, frm = 0.0;
  const double left =
      simpson_estimate(f, panel.a, m, panel.fa, panel.fm, &flm);
  const double right =
      simpson_estimate(f, m, panel.b, panel.fm, panel.fb, &frm);
  const double delta = left + right - panel.estimate;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  const SimpsonPanel lp{panel.a, m, panel.fa, flm, panel.fm, left};
  const SimpsonPanel rp{m, panel.b, panel.fm, frm, panel.fb, right};
  return adaptive_step(f, lp, 0.5 * tol, depth + 1) +
         adaptive_step(f, rp, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol) {
  if (!(b > a)) fail_arg("adaptive_simpson: empty interval");
  const double fa = f(a);
  const double fb = f(b);
  double fm = 0.0;
  const double whole = simpson_estimate(f, a, b, fa, fb, &fm);
  const double scale = std::max(std::abs(whole), 1e-300);
  const SimpsonPanel panel{a, b, fa, fm, fb, whole};
  return adaptive_step(f, panel, rel_tol * scale, 0);
}

double unit_sphere_area(int dim) {
  if (dim < 2) fail_arg("unit_sphere_area: dimension must be at least 2");
  return 2.0 * std::pow(pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

RadialDomain RadialDomain::ball(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    fail_arg("RadialDomain: ball radius must be positive and finite, got " +
             fmt(radius));
  return RadialDomain{Kind::ball, 0.0, radius};
}

RadialDomain RadialDomain::annulus(double inner, double outer) {
  if (!(inner > 0.0) || !std::isfinite(inner))
    fail_arg("RadialDomain: annulus inner radius must be positive, got " +
             fmt(inner));
  if (!(outer > inner) || !std::isfinite(outer))
    fail_arg("RadialDomain: annulus outer radius must exceed inner, got " +
             fmt(outer));
  return RadialDomain{Kind::annulus, inner, outer};
}

std::string RadialDomain::describe() const {
  if (kind == Kind::ball) return "ball(R=" + fmt(r1) + ")";
  return "annulus(" + fmt(r0) + "," + fmt(r1) + ")";
}

MonotoneCubic::MonotoneCubic(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 3)
    fail_arg("MonotoneCubic: need at least 3 samples, got " +
             std::to_string(samples.size()));
  std::sort(samples.begin(), samples.end());
  const int n = static_cast<int>(samples.size());
  x_.resize(n);
  y_.resize(n);
  for (int i = 0; i < n; ++i) {
    x_[i] = samples[i].first;
    y_[i] = samples[i].second;
    if (i > 0 && !(x_[i] > x_[i - 1]))
      fail_arg("MonotoneCubic: sample abscissae must be strictly increasing");
  }
  std::vector<double> d(n - 1);  // secant slopes
  for (int i = 0; i + 1 < n; ++i)
    d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  m_.resize(n);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (int i = 1; i + 1 < n; ++i)
    m_[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;
  // Fritsch-Carlson limiter keeps the interpolant monotone on each interval.
  for (int i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    const double a = m_[i] / d[i];
    const double b = m_[i + 1] / d[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      m_[i] = t * a * d[i];
      m_[i + 1] = t * b * d[i];
    }
  }
}

int MonotoneCubic::interval(double x) const {
  if (x < x_.front() || x > x_.back())
    fail_domain("MonotoneCubic: evaluation at " + fmt(x) +
                " outside table range [" + fmt(x_.front()) + "," +
                fmt(x_.back()) + "]");
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  int i = static_cast<int>(it - x_.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(x_.size()) - 2);
}

double MonotoneCubic::operator()(double x) const {
  const int i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
  const int i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double g00 = (6 * t2 - 6 * t) / h;
  const double g10 = 3 * t2 - 4 * t + 1;
  const double g01 = (-6 * t2 + 6 * t) / h;
  const double g11 = 3 * t2 - 2 * t;
  return g00 * y_[i] + g10 * m_[i] + g01 * y_[i + 1] + g11 * m_[i + 1];
}

WarpedModel WarpedModel::space_form(int dim, double curvature) {
  double r_max = 1e300;
  if (curvature > 0.0)
    r_max = pi / std::sqrt(curvature) * (1.0 - 1e-12);
  return space_form(dim, curvature, r_max);
}

WarpedModel WarpedModel::space_form(int dim, double curvature, double r_max) {
  if (dim < 2) fail_arg("WarpedModel: dimension must be at least 2");
  if (!std::isfinite(curvature)) fail_arg("WarpedModel: curvature not finite");
  if (!(r_max > 0.0)) fail_arg("WarpedModel: r_max must be positive");
  if (curvature > 0.0 && !(r_max < pi / std::sqrt(curvature)))
    fail_arg("WarpedModel: positive curvature requires r_max < pi/sqrt(k) = " +
             fmt(pi / std::sqrt(curvature)));
  WarpedModel m;
  m.dim_ = dim;
  m.omega_ = unit_sphere_area(dim);
  m.r_min_ = 0.0;
  m.r_max_ = r_max;
  m.space_form_ = true;
  m.pole_ = true;
  m.k_ = curvature;
  return m;
}

WarpedModel WarpedModel::custom(int dim, std::function<double(double)> f,
                                std::function<double(double)> f_prime,
                                double r_max,
                                std::function<double(double)> f_second,
                                bool pole) {
  if (dim < 2) fail_arg("WarpedModel: dimension must be at least 2");
  if (!f || !f_prime) fail_arg("WarpedModel: custom warp needs f and f'");
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    fail_arg("WarpedModel: r_max must be positive and finite");
  WarpedModel m;
  m.dim_ = dim;
  m.omega_ = unit_sphere_area(dim);
  m.r_min_ = 0.0;
  m.r_max_ = r_max;
  m.pole_ = pole;
  m.f_ = std::move(f);
  m.fp_ = std::move(f_prime);
  m.fpp_ = std::move(f_second);
  return m;
}

WarpedModel WarpedModel::from_table(
    int dim, std::vector<std::pair<double, double>> rows) {
  if (dim < 2) fail_arg("WarpedModel: dimension must be at least 2");
  if (rows.size() < 3)
    fail_arg("WarpedModel: warp table needs at least 3 rows, got " +
             std::to_string(rows.size()));
  for (const auto& [r, f] : rows) {
    if (!(r >= 0.0) || !std::isfinite(r) || !std::isfinite(f))
      fail_arg("WarpedModel: warp table entries must be finite, r >= 0");
  }
  std::sort(rows.begin(), rows.end());
  const bool pole = rows.front().first == 0.0 && rows.front().second == 0.0;
  for (size_t i = pole ? 1 : 0; i < rows.size(); ++i) {
    if (!(rows[i].second > 0.0))
      fail_arg("WarpedModel: warp table values must be positive away from "
               "the pole (row r=" + fmt(rows[i].first) + ")");
  }
  auto table = std::make_shared<MonotoneCubic>(std::move(rows));
  WarpedModel m;
  m.dim_ = dim;
  m.omega_ = unit_sphere_area(dim);
  m.r_min_ = table->x_front();
  m.r_max_ = table->x_back();
  m.pole_ = pole;
  m.f_ = [table](double r) { return (*table)(r); };
  m.fp_ = [table](double r) { return table->derivative(r); };
  return m;
}

double WarpedModel::curvature() const {
  if (!space_form_)
    fail_domain("WarpedModel: curvature() only defined for space forms");
  return k_;
}

double WarpedModel::warp(double r) const {
  if (!(r >= r_min_ && r <= r_max_ * (1.0 + 1e-12)))
    fail_domain("WarpedModel: warp evaluation at r=" + fmt(r) +
                " outside validity range [" + fmt(r_min_) + "," + fmt(r_max_) +
                "]");
  if (!space_form_) return f_(r);
  if (k_ < 0.0) {
    const double c = std::sqrt(-k_);
    return std::sinh(c * r) / c;
  }
  if (k_ == 0.0) return r;
  const double s = std::sqrt(k_);
  return std::sin(s * r) / s;
}

double WarpedModel::warp_prime(double r) const {
  if (!(r >= r_min_ && r <= r_max_ * (1.0 + 1e-12)))
    fail_domain("WarpedModel: warp' evaluation at r=" + fmt(r) +
                " outside validity range");
  if (!space_form_) return fp_(r);
  if (k_ < 0.0) return std::cosh(std::sqrt(-k_) * r);
  if (k_ == 0.0) return 1.0;
  return std::cos(std::sqrt(k_) * r);
}

bool WarpedModel::has_warp_second() const {
  return space_form_ || static_cast<bool>(fpp_);
}

double WarpedModel::warp_second(double r) const {
  if (space_form_) {
    if (k_ == 0.0) return 0.0;
    return -k_ * warp(r);  // f'' = -k f for the space-form family
  }
  if (!fpp_) fail_domain("WarpedModel: second derivative not available");
  return fpp_(r);
}

double WarpedModel::ratio_limit() const {
  if (space_form_ && k_ > 0.0)
    return std::min(r_max_, 0.5 * pi / std::sqrt(k_));
  return r_max_;
}

void WarpedModel::check_domain(const RadialDomain& domain) const {
  if (domain.kind == RadialDomain::Kind::ball && r_min_ > 0.0)
    fail_arg("WarpedModel: ball domain needs a model valid down to r=0 "
             "(warp table starts at r=" + fmt(r_min_) + ")");
  if (domain.inner() < r_min_)
    fail_arg("WarpedModel: domain inner radius " + fmt(domain.inner()) +
             " below model validity " + fmt(r_min_));
  if (domain.outer() > r_max_ * (1.0 + 1e-12))
    fail_arg("WarpedModel: domain outer radius " + fmt(domain.outer()) +
             " beyond model validity " + fmt(r_max_));
}

double warp_ratio(const WarpedModel& model, double r) {
  if (!(r > 0.0))
    fail_domain("warp_ratio: r must be positive, got " + fmt(r));
  if (r > model.r_max() * (1.0 + 1e-12))
    fail_domain("warp_ratio: r=" + fmt(r) + " beyond model validity " +
                fmt(model.r_max()));
  if (model.is_space_form()) {
    const double k = model.curvature();
    if (k < 0.0) {
      const double c = std::sqrt(-k);
      return c / std::tanh(c * r);
    }
    if (k == 0.0) return 1.0 / r;
    const double s = std::sqrt(k);
    if (!(r < 0.5 * pi / s))
      fail_domain("warp_ratio: r=" + fmt(r) +
                  " at or beyond pi/(2 sqrt k) = " + fmt(0.5 * pi / s) +
                  " where the positive-curvature ratio is not usable");
    return s * std::cos(s * r) / std::sin(s * r);
  }
  if (r < model.r_min())
    fail_domain("warp_ratio: r=" + fmt(r) + " below model validity " +
                fmt(model.r_min()));
  const double f = model.warp(r);
  if (!(f > 0.0))
    fail_domain("warp_ratio: warp vanishes at r=" + fmt(r) +
                " (pole or degenerate warp)");
  return model.warp_prime(r) / f;
}

double distance_laplacian(const WarpedModel& model, double r) {
  return (model.dim() - 1) * warp_ratio(model, r);
}

double radial_curvature(const WarpedModel& model, double r) {
  if (!(r > 0.0))
    fail_domain("radial_curvature: r must be positive, got " + fmt(r));
  if (r > model.r_max() * (1.0 + 1e-12))
    fail_domain("radial_curvature: r beyond model validity");
  if (model.is_space_form()) return model.curvature();
  const double f = model.warp(r);
  if (!(f > 0.0))
    fail_domain("radial_curvature: warp vanishes at r=" + fmt(r));
  if (model.has_warp_second()) return -model.warp_second(r) / f;
  // Finite-difference fallback; one-sided near the ends of validity.
  double h = std::max(1e-5, 1e-5 * r);
  h = std::min(h, 0.45 * (model.r_max() - model.r_min()));
  double fpp = 0.0;
  if (r - h > model.r_min()) {
    if (r + h > model.r_max()) {
      fpp = (model.warp(r - 2 * h) - 2.0 * model.warp(r - h) + f) / (h * h);
    } else {
      fpp = (model.warp(r - h) - 2.0 * f + model.warp(r + h)) / (h * h);
    }
  } else {
    fpp = (f - 2.0 * model.warp(r + h) + model.warp(r + 2 * h)) / (h * h);
  }
  return -fpp / f;
}

double sphere_area(const WarpedModel& model, double r) {
  if (r == 0.0 && model.has_pole()) return 0.0;
  if (!(r >= model.r_min()))
    fail_domain("sphere_area: r=" + fmt(r) + " below model validity");
  if (r > model.r_max() * (1.0 + 1e-12))
    fail_domain("sphere_area: r beyond model validity");
  if (r == 0.0) return model.omega() * std::pow(model.warp(0.0),
                                                model.dim() - 1);
  const double f = model.warp(r);
  if (f < 0.0)
    fail_domain("sphere_area: negative warp at r=" + fmt(r));
  return model.omega() * std::pow(f, model.dim() - 1);
}

double log_sphere_area(const WarpedModel& model, double r) {
  if (!(r > model.r_min() || (r > 0.0 && model.has_pole())))
    fail_domain("log_sphere_area: r must be interior, got " + fmt(r));
  if (r > model.r_max() * (1.0 + 1e-12))
    fail_domain("log_sphere_area: r beyond model validity");
  const int m = model.dim() - 1;
  if (model.is_space_form()) {
    const double k = model.curvature();
    double logf = 0.0;
    if (k < 0.0) {
      const double c = std::sqrt(-k);
      logf = log_sinh(c * r) - std::log(c);
    } else if (k == 0.0) {
      logf = std::log(r);
    } else {
      const double s = std::sqrt(k);
      logf = std::log(std::sin(s * r) / s);
    }
    return std::log(model.omega()) + m * logf;
  }
  const double f = model.warp(r);
  if (!(f > 0.0)) fail_domain("log_sphere_area: warp not positive");
  return std::log(model.omega()) + m * std::log(f);
}

double ball_volume(const WarpedModel& model, double r) {
  if (r == 0.0) return 0.0;
  if (!(r > 0.0)) fail_domain("ball_volume: r must be nonnegative");
  if (r > model.r_max() * (1.0 + 1e-12))
    fail_domain("ball_volume: r beyond model validity");
  if (model.r_min() > 0.0)
    fail_domain("ball_volume: model not valid down to r=0");
  const int n = model.dim();
  if (model.is_space_form()) {
    const double k = model.curvature();
    if (k == 0.0) return model.omega() * std::pow(r, n) / n;
    if (n <= 4) {
      const double c = std::sqrt(std::abs(k));
      const double F = (k < 0.0) ? int_sinh_pow(n - 1, c * r)
                                 : int_sin_pow(n - 1, c * r);
      return model.omega() / std::pow(c, n) * F;
    }
  }
  return adaptive_simpson([&](double t) { return sphere_area(model, t); }, 0.0,
                          r, 1e-10);
}

double log_ball_volume(const WarpedModel& model, double r) {
  if (!(r > 0.0)) fail_domain("log_ball_volume: r must be positive");
  if (r > model.r_max() * (1.0 + 1e-12))
    fail_domain("log_ball_volume: r beyond model validity");
  if (model.r_min() > 0.0)
    fail_domain("log_ball_volume: model not valid down to r=0");
  // The quadrature drops the t=0 endpoint, which is only exact when S(0)=0.
  if (!model.has_pole())
    fail_domain("log_ball_volume: model has no pole, balls have no center");
  // Composite Simpson accumulated in log space: the quadrature terms are
  // log(weight) + log(S), combined by log-sum-exp, so V far beyond double
  // range never materializes.
  auto log_term = [&](double t) -> double {
    if (t <= 0.0) return -1e308;  // pole contributes nothing
    return log_sphere_area(model, t);
  };
  auto pass = [&](int panels) -> double {
    const double h = r / panels;
    std::vector<double> terms;
    terms.reserve(2 * panels + 1);
    const double log_h6 = std::log(h / 6.0);
    for (int i = 0; i < panels; ++i) {
      const double a = i * h, b = a + h, m = a + 0.5 * h;
      terms.push_back(log_h6 + log_term(a));
      terms.push_back(log_h6 + std::log(4.0) + log_term(m));
      terms.push_back(log_h6 + log_term(b));
    }
    const double peak = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - peak);
    return peak + std::log(acc);
  };
  int panels = 256;
  double prev = pass(panels);
  for (int round = 0; round < 12; ++round) {
    panels *= 2;
    const double next = pass(panels);
    if (std::abs(next - prev) <= 1e-11 * std::max(1.0, std::abs(next)))
      return next;
    prev = next;
  }
  throw std::runtime_error(
      "log_ball_volume: quadrature did not reach tolerance");
}

}  // namespace ptone
