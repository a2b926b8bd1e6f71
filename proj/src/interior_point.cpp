#include "scengame/interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scengame {

namespace {

struct Residuals {
  Vector dual;    // G + Jc' v
  Vector primal;  // c + s
  Vector comp;    // s .* v - mu
  Vector c;
  Vector g;

  double merit() const {
    return dual.squaredNorm() + primal.squaredNorm() + comp.squaredNorm();
  }
  double inf_norm() const {
    double r = dual.size() ? dual.lpNorm<Eigen::Infinity>() : 0.0;
    if (primal.size()) {
      r = std::max(r, primal.lpNorm<Eigen::Infinity>());
      r = std::max(r, comp.lpNorm<Eigen::Infinity>());
    }
    return r;
  }
};

void evaluate(const KktSystem& sys, const Vector& w, const Vector& s, const Vector& v,
              double mu, Residuals& r, Matrix* jac_g, Matrix* jac_c) {
  sys.eval_operator(w, r.g, jac_g);
  Matrix local_jac;
  Matrix* jc = jac_c ? jac_c : &local_jac;
  sys.eval_constraints(w, r.c, jc);
  r.dual = r.g;
  if (sys.rows() > 0) r.dual.noalias() += jc->transpose() * v;
  r.primal = r.c + s;
  r.comp = s.cwiseProduct(v).array() - mu;
}

double max_step(const Vector& z, const Vector& dz, double tau) {
  double alpha = 1.0;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    if (dz[k] < 0.0) alpha = std::min(alpha, -tau * z[k] / dz[k]);
  }
  return alpha;
}

// Solves a * x = b, adding a growing multiple of the identity when the
// factorization is close to singular.
Vector regularized_solve(Matrix& a, const Vector& b) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  double shift = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::PartialPivLU<Matrix> lu(a);
    if (lu.rcond() > 1e-13) {
      Vector x = lu.solve(b);
      if (x.allFinite()) return x;
    }
    const double next = shift == 0.0 ? 1e-8 * scale : shift * 100.0;
    a.diagonal().array() += next - shift;
    shift = next;
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  return lu.solve(b);
}

}  // namespace

InteriorPointResult solve_kkt_system(const KktSystem& sys,
                                     const InteriorPointStart& start,
                                     const InteriorPointOptions& opt) {
  const int n = sys.dim();
  const int m = sys.rows();
  const double mu_min =
      0.1 * std::min(opt.complementarity_tol, opt.stationarity_tol);

  InteriorPointResult out;
  Vector w = start.w;
  Vector c;
  sys.eval_constraints(w, c, nullptr);

  const bool warm = start.v.has_value() && start.v->size() == m;
  double mu = warm ? opt.mu_warm : opt.mu_init;
  Vector s(m), v(m);
  if (warm) {
    // Re-centre the previous multipliers around the warm barrier parameter:
    // strongly active rows keep their multiplier with a small slack, inactive
    // rows keep their slack with a small multiplier.
    const double root = std::sqrt(mu);
    for (int k = 0; k < m; ++k) {
      const double vp = std::max((*start.v)[k], 0.0);
      s[k] = std::max(-c[k], mu / std::max(vp, root));
      v[k] = std::max(vp, mu / s[k]);
    }
  } else {
    for (int k = 0; k < m; ++k) {
      s[k] = std::max(-c[k], 1.0);
      v[k] = mu / s[k];
    }
  }

  Residuals r, trial;
  Matrix jac_g, jac_c, trial_jac_g, trial_jac_c;
  bool evaluated = false;  // r and the Jacobians already describe (w, s, v)
  int stalled = 0;
  int it = 0;
  for (;; ++it) {
    if (!evaluated) evaluate(sys, w, s, v, mu, r, &jac_g, &jac_c);
    evaluated = false;
    if (!r.dual.allFinite() || !r.primal.allFinite()) {
      out.outcome = InteriorPointOutcome::MaxIter;
      break;
    }

    const double stat = n ? r.dual.lpNorm<Eigen::Infinity>() : 0.0;
    double feas = 0.0, comp = 0.0;
    for (int k = 0; k < m; ++k) {
      feas = std::max(feas, r.c[k]);
      comp = std::max(comp, std::abs(v[k] * r.c[k]));
    }
    out.stationarity = stat;
    out.feasibility = feas;
    out.complementarity = comp;
    if (stat <= opt.stationarity_tol && feas <= opt.feasibility_tol &&
        comp <= opt.complementarity_tol) {
      out.outcome = InteriorPointOutcome::Converged;
      break;
    }
    if (m > 0 && v.lpNorm<Eigen::Infinity>() > opt.divergence_threshold) {
      out.outcome = InteriorPointOutcome::Infeasible;
      break;
    }
    if (it >= opt.max_iter) {
      // Out of iterations while still violating: if w is stationary for the
      // violation measure 1/2 |max(c, 0)|^2, no nearby point is feasible.
      out.outcome = InteriorPointOutcome::MaxIter;
      if (m > 0 && feas > opt.feasibility_tol) {
        const Vector viol = r.c.cwiseMax(0.0);
        const double grad = n ? (jac_c.transpose() * viol).lpNorm<Eigen::Infinity>() : 0.0;
        if (grad <= 1e-6 * viol.squaredNorm()) out.outcome = InteriorPointOutcome::Infeasible;
      }
      break;
    }

    while (mu > mu_min && r.inf_norm() <= opt.barrier_tolerance_factor * mu) {
      mu = std::max(mu_min, mu * opt.mu_decrease);
      r.comp = s.cwiseProduct(v).array() - mu;
    }

    // Newton step on the perturbed KKT system, slacks and multipliers
    // eliminated:  (K + Jc' S^-1 V Jc) dw = -r_d - Jc' S^-1 (-r_c + V r_p).
    Matrix newton = jac_g;
    Vector rhs = -r.dual;
    if (m > 0) {
      sys.add_curvature(w, v, newton);
      const Vector d = v.cwiseQuotient(s);
      newton.noalias() += jac_c.transpose() * d.asDiagonal() * jac_c;
      const Vector t = (-r.comp + v.cwiseProduct(r.primal)).cwiseQuotient(s);
      rhs.noalias() -= jac_c.transpose() * t;
    }
    const Vector dw = regularized_solve(newton, rhs);
    Vector ds(m), dv(m);
    if (m > 0) {
      ds = -r.primal - jac_c * dw;
      dv = (-r.comp - v.cwiseProduct(ds)).cwiseQuotient(s);
    }

    double alpha = std::min(max_step(s, ds, opt.boundary_fraction),
                            max_step(v, dv, opt.boundary_fraction));
    const double phi0 = r.merit();
    Vector w_try, s_try, v_try;
    double best_alpha = 0.0, best_phi = phi0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      w_try = w + alpha * dw;
      s_try = s + alpha * ds;
      v_try = v + alpha * dv;
      evaluate(sys, w_try, s_try, v_try, mu, trial, &trial_jac_g, &trial_jac_c);
      const double phi = trial.merit();
      if (std::isfinite(phi)) {
        if (phi <= (1.0 - 1e-4 * alpha) * phi0) {
          accepted = true;
          break;
        }
        if (phi < best_phi) {
          best_phi = phi;
          best_alpha = alpha;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      alpha = best_alpha;
      ++stalled;
    } else {
      stalled = 0;
      // The accepted trial point is the next iterate; keep its evaluation.
      std::swap(r, trial);
      std::swap(jac_g, trial_jac_g);
      std::swap(jac_c, trial_jac_c);
      evaluated = true;
    }
    if (alpha == 0.0) {
      // No decrease along the Newton direction; retry with a smaller barrier
      // parameter before giving up.
      if (mu > mu_min) {
        mu = std::max(mu_min, mu * opt.mu_decrease);
        continue;
      }
      if (feas > opt.feasibility_tol) {
        out.outcome = InteriorPointOutcome::Infeasible;
      } else {
        out.outcome = InteriorPointOutcome::MaxIter;
      }
      break;
    }
    if (accepted) {
      w = std::move(w_try);
      s = std::move(s_try);
      v = std::move(v_try);
    } else {
      w += alpha * dw;
      s += alpha * ds;
      v += alpha * dv;
    }
    if (stalled >= 10 && feas > opt.feasibility_tol) {
      out.outcome = InteriorPointOutcome::Infeasible;
      break;
    }
  }

  out.w = std::move(w);
  out.v = std::move(v);
  out.s = std::move(s);
  out.mu = mu;
  out.iterations = it;
  return out;
}

}  // namespace scengame
