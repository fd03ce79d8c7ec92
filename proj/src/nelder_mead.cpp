#include "nilcontrol/nelder_mead.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace nilcontrol {

namespace {

struct Context {
  const std::function<double(const Eigen::VectorXd&)>* f;
  Eigen::VectorXd scratch;
  Eigen::VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();
  int evals = 0;
};

double trampoline(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<Context*>(params);
  for (Eigen::Index i = 0; i < ctx->scratch.size(); ++i) {
    ctx->scratch(i) = gsl_vector_get(v, i);
  }
  ++ctx->evals;
  double value = (*ctx->f)(ctx->scratch);
  if (!std::isfinite(value)) value = std::numeric_limits<double>::max();
  if (value < ctx->best_f) {
    ctx->best_f = value;
    ctx->best_x = ctx->scratch;
  }
  return value;
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const {
    gsl_multimin_fminimizer_free(m);
  }
};

}  // namespace

SimplexResult minimize_simplex(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
    const SimplexOptions& options) {
  const auto n = static_cast<std::size_t>(x0.size());
  if (n == 0 || step.size() != x0.size()) {
    throw std::invalid_argument("minimize_simplex: bad dimensions");
  }
  gsl_set_error_handler_off();
  Context ctx{&f, Eigen::VectorXd(x0.size()), x0, 0.0, 0};
  ctx.best_f = std::numeric_limits<double>::infinity();

  std::unique_ptr<gsl_vector, VectorDeleter> start(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> steps(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(start.get(), i, x0(i));
    gsl_vector_set(steps.get(), i, step(i));
  }
  gsl_multimin_function fn{&trampoline, n, &ctx};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> minimizer(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(minimizer.get(), &fn, start.get(), steps.get());

  SimplexResult result;
  while (ctx.evals < options.max_evals && ctx.best_f > options.stop_below) {
    ++result.iterations;
    if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(minimizer.get());
    if (gsl_multimin_test_size(size, options.size_tol) == GSL_SUCCESS) break;
  }
  result.x = ctx.best_x;
  result.f = ctx.best_f;
  result.evals = ctx.evals;
  return result;
}

}  // namespace nilcontrol
