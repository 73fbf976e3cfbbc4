#include "aoi/kernels.hpp"

#include <cmath>

#include "aoi/error.hpp"

namespace aoi {

PolicyConstants compute_constants(const ModelParams& m) {
  PolicyConstants c{};
  const double lambda = m.lambda;
  // q = P(tau < theta ^ sigma) = lambda * int_0^theta exp(-lambda y) (1 - G(y)) dy
  c.q = m.theta.value() > 0.0
            ? lambda * truncated_survivor_transform(m.service, lambda, m.theta).real()
            : 0.0;
  const ExpSplit split = partial_exp_integral(m.service, lambda, m.theta);
  c.success = split.below + split.tail;
  c.g_lambda = m.service.laplace(lambda).real();
  c.p0 = c.g_lambda / c.success;
  const auto tail = tail_weighted_integrals(m.service, lambda, m.theta);
  c.p1 = tail ? tail->queued / c.success : 0.0;
  return c;
}

KernelTransforms::KernelTransforms(ModelParams model, const PolicyConstants& constants)
    : model_(std::move(model)),
      q_(constants.q),
      g_lambda_(constants.g_lambda),
      tail_(tail_weighted_integrals(model_.service, model_.lambda, model_.theta)) {}

Complex KernelTransforms::failed_attempt(Complex s) const {
  // With q = 0 the law is never used; 1 keeps the geometric factor finite.
  if (q_ <= 0.0) return 1.0;
  const Complex a = model_.lambda + s;
  return model_.lambda * truncated_survivor_transform(model_.service, a, model_.theta) / q_;
}

Complex KernelTransforms::service_no_arrival(Complex s) const {
  return model_.service.laplace(s + model_.lambda) / g_lambda_;
}

Complex KernelTransforms::service_with_queued(Complex s) const {
  if (!tail_) throw InvalidArgument("service_with_queued: no service mass above the threshold");
  return tail_weighted_transform(model_.service, model_.lambda, model_.theta.value(), s) /
         tail_->backward;
}

Complex KernelTransforms::queued_lead(Complex s) const {
  if (!tail_) throw InvalidArgument("queued_lead: no service mass above the threshold");
  const Complex a = model_.lambda + s;
  return model_.lambda * shifted_survivor_transform(model_.service, a, model_.theta.value()) /
         tail_->backward;
}

KernelTransforms build_kernels(const ModelParams& m, const PolicyConstants& c) {
  return KernelTransforms(m, c);
}

ConditionalTransforms::ConditionalTransforms(KernelTransforms kernels,
                                             const PolicyConstants& constants, QueuedAgeForm form)
    : kernels_(std::move(kernels)), constants_(constants), form_(form) {}

bool ConditionalTransforms::defined(Occupancy prev, Occupancy next) const noexcept {
  if (prev == Occupancy::kEmpty && next == Occupancy::kEmpty) return true;
  return kernels_.f1_defined() && constants_.p1 > 0.0;
}

Complex ConditionalTransforms::geometric_factor(Complex s) const {
  if (constants_.q <= 0.0) return 1.0;
  return constants_.success / (1.0 - constants_.q * kernels_.failed_attempt(s));
}

Complex ConditionalTransforms::successful_service(Occupancy next, Complex s) const {
  return next == Occupancy::kEmpty ? kernels_.service_no_arrival(s)
                                   : kernels_.service_with_queued(s);
}

Complex ConditionalTransforms::cycle(Occupancy prev, Occupancy next, Complex s) const {
  if (!defined(prev, next)) throw InvalidArgument("conditional cycle transform is absent");
  const double lambda = kernels_.model().lambda;
  // An empty system first waits for an arrival; a queued message starts at once.
  const Complex idle = prev == Occupancy::kEmpty ? lambda / (lambda + s) : Complex(1.0);
  return idle * geometric_factor(s) * successful_service(next, s);
}

Complex ConditionalTransforms::age(Occupancy prev, Occupancy next, Complex s) const {
  if (!defined(prev, next)) throw InvalidArgument("conditional age transform is absent");
  const Complex service = successful_service(next, s);
  if (prev == Occupancy::kEmpty) return service;

  // Some attempt was preempted (probability q): a fresh message is delivered.
  // Otherwise the queued message itself is delivered after lead V plus service.
  const double q = constants_.q;
  const Complex first_attempt_success = form_ == QueuedAgeForm::kServiceOnly
                                            ? service
                                            : cycle(prev, next, s);
  return q * service + (1.0 - q) * kernels_.queued_lead(s) * first_attempt_success;
}

ConditionalTransforms conditional_transforms(const KernelTransforms& k, const PolicyConstants& c,
                                             QueuedAgeForm form) {
  return ConditionalTransforms(k, c, form);
}

}  // namespace aoi
