#include "mullkit/losses.hpp"

#include <cmath>
#include <numbers>

namespace mullkit {

namespace detail {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace detail

namespace {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

// Smoothed check loss l_h(u) and its first two derivatives in u.
double conquer_l(const LossSpec& s, double u) {
  const double tau = s.tau(), h = s.bandwidth();
  if (s.kernel() == Kernel::Gaussian)
    return h * detail::std_normal_pdf(u / h) + u * (tau - detail::std_normal_cdf(-u / h));
  if (u >= h) return tau * u;
  if (u <= -h) return (tau - 1.0) * u;
  return tau * u + (h - u) * (h - u) / (4.0 * h);
}

double conquer_l1(const LossSpec& s, double u) {
  const double tau = s.tau(), h = s.bandwidth();
  if (s.kernel() == Kernel::Gaussian) return tau - detail::std_normal_cdf(-u / h);
  if (u >= h) return tau;
  if (u <= -h) return tau - 1.0;
  return tau - (h - u) / (2.0 * h);
}

double conquer_l2(const LossSpec& s, double u) {
  const double h = s.bandwidth();
  if (s.kernel() == Kernel::Gaussian) return detail::std_normal_pdf(u / h) / h;
  return std::abs(u) < h ? 1.0 / (2.0 * h) : 0.0;
}

void check_label(const LossSpec& spec, double y) {
  switch (spec.kind()) {
    case LossKind::Logistic:
      if (y != 0.0 && y != 1.0)
        throw Error("logistic loss expects labels in {0,1}, got " + std::to_string(y));
      break;
    case LossKind::SmoothHinge:
      if (y != -1.0 && y != 1.0)
        throw Error("smooth hinge loss expects labels in {-1,+1}, got " + std::to_string(y));
      break;
    case LossKind::Conquer:
      if (!std::isfinite(y)) throw Error("conquer loss expects a finite response");
      break;
  }
}

double value_unchecked(const LossSpec& spec, double t, double y) {
  switch (spec.kind()) {
    case LossKind::Logistic:
      return -y * t + softplus(t);
    case LossKind::SmoothHinge: {
      double a = 1.0 - y * t;
      return 0.5 * a + 0.5 * std::sqrt(a * a + spec.sigma2());
    }
    case LossKind::Conquer:
      return conquer_l(spec, y - t);
  }
  return 0.0;
}

double d1_unchecked(const LossSpec& spec, double t, double y) {
  switch (spec.kind()) {
    case LossKind::Logistic:
      return -y + sigmoid(t);
    case LossKind::SmoothHinge: {
      double a = 1.0 - y * t;
      return -0.5 * y - 0.5 * y * a / std::sqrt(a * a + spec.sigma2());
    }
    case LossKind::Conquer:
      return -conquer_l1(spec, y - t);
  }
  return 0.0;
}

double d2_unchecked(const LossSpec& spec, double t, double y) {
  switch (spec.kind()) {
    case LossKind::Logistic: {
      double s = sigmoid(t);
      return s * (1.0 - s);
    }
    case LossKind::SmoothHinge: {
      double a = 1.0 - y * t;
      double r2 = a * a + spec.sigma2();
      return 0.5 * spec.sigma2() / (r2 * std::sqrt(r2));
    }
    case LossKind::Conquer:
      return conquer_l2(spec, y - t);
  }
  return 0.0;
}

void check_dims(const Dataset& data, const Coefficients& beta) {
  if (beta.size() != data.p())
    throw Error("coefficient length " + std::to_string(beta.size()) + " does not match p = " +
                std::to_string(data.p()));
  if (data.response.size() != data.n()) throw Error("response length does not match rows");
}

}  // namespace

LossSpec LossSpec::logistic() { return LossSpec{}; }

LossSpec LossSpec::smooth_hinge(double sigma2) {
  if (!(sigma2 > 0.0)) throw Error("smooth hinge requires sigma2 > 0");
  LossSpec s;
  s.kind_ = LossKind::SmoothHinge;
  s.sigma2_ = sigma2;
  return s;
}

LossSpec LossSpec::conquer(double tau, double bandwidth, Kernel kernel) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error("conquer requires 0 < tau < 1");
  if (!(bandwidth > 0.0)) throw Error("conquer requires bandwidth > 0");
  LossSpec s;
  s.kind_ = LossKind::Conquer;
  s.tau_ = tau;
  s.bandwidth_ = bandwidth;
  s.kernel_ = kernel;
  return s;
}

std::string LossSpec::name() const {
  switch (kind_) {
    case LossKind::Logistic: return "logistic";
    case LossKind::SmoothHinge: return "smooth-hinge";
    case LossKind::Conquer: return "conquer";
  }
  return "?";
}

double loss_value(const LossSpec& spec, double t, double y) {
  check_label(spec, y);
  return value_unchecked(spec, t, y);
}

double loss_d1(const LossSpec& spec, double t, double y) {
  check_label(spec, y);
  return d1_unchecked(spec, t, y);
}

double loss_d2(const LossSpec& spec, double t, double y) {
  check_label(spec, y);
  return d2_unchecked(spec, t, y);
}

double lipschitz_const(const LossSpec& spec) {
  if (spec.kind() == LossKind::Conquer) return std::max(spec.tau(), 1.0 - spec.tau());
  return 1.0;
}

double d2_max(const LossSpec& spec) {
  switch (spec.kind()) {
    case LossKind::Logistic: return 0.25;
    case LossKind::SmoothHinge: return 1.0 / (2.0 * std::sqrt(spec.sigma2()));
    case LossKind::Conquer:
      if (spec.kernel() == Kernel::Gaussian)
        return 1.0 / (spec.bandwidth() * std::sqrt(2.0 * std::numbers::pi));
      return 1.0 / (2.0 * spec.bandwidth());
  }
  return 0.0;
}

double default_bandwidth(double tau, Index n, Index p) {
  double h = std::sqrt(tau * (1.0 - tau)) *
             std::pow(std::log(static_cast<double>(std::max<Index>(p, 2))) / static_cast<double>(n), 0.25);
  return std::max(0.05, h);
}

void check_labels(const Dataset& data, const LossSpec& spec) {
  for (Index i = 0; i < data.response.size(); ++i) check_label(spec, data.response[i]);
}

Dataset to_loss_encoding(const Dataset& data, const LossSpec& spec) {
  if (spec.kind() != LossKind::SmoothHinge) return data;
  Dataset out = data;
  for (Index i = 0; i < out.response.size(); ++i)
    if (out.response[i] == 0.0) out.response[i] = -1.0;
  return out;
}

namespace detail {

void per_sample_d1(const LossSpec& spec, const VectorXd& t, const VectorXd& y, VectorXd& out) {
  out.resize(t.size());
  for (Index i = 0; i < t.size(); ++i) out[i] = d1_unchecked(spec, t[i], y[i]);
}

double mean_loss(const LossSpec& spec, const VectorXd& t, const VectorXd& y) {
  double s = 0.0;
  for (Index i = 0; i < t.size(); ++i) s += value_unchecked(spec, t[i], y[i]);
  return s / static_cast<double>(t.size());
}

}  // namespace detail

double empirical_loss(const Dataset& data, const LossSpec& spec, const Coefficients& beta) {
  check_dims(data, beta);
  check_labels(data, spec);
  VectorXd t = linear_predictor(data.features, beta);
  return detail::mean_loss(spec, t, data.response);
}

Gradient gradient(const Dataset& data, const LossSpec& spec, const Coefficients& beta) {
  check_dims(data, beta);
  check_labels(data, spec);
  VectorXd t = linear_predictor(data.features, beta);
  VectorXd d1;
  detail::per_sample_d1(spec, t, data.response, d1);
  const double n = static_cast<double>(data.n());
  Gradient g;
  g.beta = data.features.transpose() * d1 / n;
  if (beta.intercept) g.intercept = d1.sum() / n;
  return g;
}

MatrixXd curvature_matrix(const Dataset& data, const LossSpec& spec, const Coefficients& beta,
                          Index cap) {
  check_dims(data, beta);
  if (data.p() > cap)
    throw Error("curvature matrix for p = " + std::to_string(data.p()) + " exceeds the cap of " +
                std::to_string(cap) + "; use the analog solver or the hybrid pipeline");
  check_labels(data, spec);
  VectorXd t = linear_predictor(data.features, beta);
  const Index n = data.n(), p = data.p();
  const bool icpt = beta.intercept.has_value();
  VectorXd wts(n);
  for (Index i = 0; i < n; ++i) wts[i] = d2_unchecked(spec, t[i], data.response[i]) / static_cast<double>(n);

  const Index dim = icpt ? p + 1 : p;
  MatrixXd design(n, dim);
  design.leftCols(p) = data.features;
  if (icpt) design.col(p).setOnes();
  MatrixXd scaled = design.array().colwise() * wts.array();
  MatrixXd sigma = design.transpose() * scaled;
  // Round-off can leave the product slightly asymmetric.
  MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  return sym;
}

}  // namespace mullkit
