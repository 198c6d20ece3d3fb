#include "fda/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace fda {

namespace {

// Real symmetric standard form: maximize <C,X> subject to
// <A_i,X> + D_i·u = b_i, X ⪰ 0 (PSD block), u ≥ 0 (slack block).
// Dual: minimize b^T y subject to A^T(y) − C = Z ⪰ 0, D^T y = z ≥ 0.
struct RealProblem {
  Mat C;
  std::vector<Mat> A;
  Mat D;  // m×p, one ±1 per inequality row
  Vec b;
  int n = 0, m = 0, p = 0;
};

bool llt_ok(const Mat& s) {
  Eigen::LLT<Mat> llt(s);
  return llt.info() == Eigen::Success;
}

double max_step_psd(const Mat& x, const Mat& dx) {
  if (llt_ok(x + dx)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 11; ++i) {
    const double mid = 0.5 * (lo + hi);
    (llt_ok(x + mid * dx) ? lo : hi) = mid;
  }
  return lo;
}

double max_step_lp(const Vec& v, const Vec& dv) {
  double a = 1.0;
  for (int k = 0; k < v.size(); ++k)
    if (dv(k) < 0.0) a = std::min(a, -v(k) / dv(k));
  return a;
}

double trace_prod(const Mat& a, const Mat& b) { return (a.cwiseProduct(b.transpose())).sum(); }

struct IpmResult {
  Mat X;
  double pobj = 0.0, dobj = 0.0;
  SdpStatus status = SdpStatus::max_iter;
  int iterations = 0;
};

// Infeasible-start Mehrotra predictor-corrector, HKM directions.
IpmResult ipm_solve(const RealProblem& prob, double tol, int max_iter) {
  const int n = prob.n, m = prob.m, p = prob.p;
  const double tau = 0.97;

  const double norm_b = std::max(1.0, prob.b.lpNorm<Eigen::Infinity>());
  const double norm_c = std::max(1.0, prob.C.norm());
  double amax = 1.0;
  for (const auto& a : prob.A) amax = std::max(amax, a.norm());

  const double xi_p = std::max(10.0, std::sqrt(double(n)) * norm_b);
  const double xi_d = std::max(10.0, std::sqrt(double(n)) * std::max(amax, norm_c));

  Mat X = xi_p * Mat::Identity(n, n);
  Mat Z = xi_d * Mat::Identity(n, n);
  Vec u = Vec::Constant(p, xi_p);
  Vec z = Vec::Constant(p, xi_d);
  Vec y = Vec::Zero(m);

  IpmResult res;
  Mat dX_aff(n, n), dZ_aff(n, n), dX(n, n), dZ(n, n);
  Vec du_aff(p), dz_aff(p), du(p), dz(p), dy_aff(m), dy(m);

  for (int iter = 0; iter <= max_iter; ++iter) {
    // Violations: fp = b − A(X) − D·u, rdual = A^T(y) − C − Z, rdual_lp = D^Ty − z.
    Vec fp = prob.b;
    for (int i = 0; i < m; ++i) fp(i) -= trace_prod(prob.A[i], X);
    if (p > 0) fp -= prob.D * u;

    Mat rdual = -prob.C - Z;
    for (int i = 0; i < m; ++i) rdual += y(i) * prob.A[i];
    Vec rdual_lp = p > 0 ? Vec(prob.D.transpose() * y - z) : Vec();

    const double pobj = trace_prod(prob.C, X);
    const double dobj = prob.b.dot(y);
    const double mu = (X.cwiseProduct(Z).sum() + u.dot(z)) / (n + p);
    const double pres = fp.lpNorm<Eigen::Infinity>() / norm_b;
    const double dres = std::max(rdual.norm() / norm_c,
                                 p > 0 ? rdual_lp.lpNorm<Eigen::Infinity>() / norm_c : 0.0);
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    static const bool trace = std::getenv("FDA_SDP_TRACE") != nullptr;
    if (trace)
      std::fprintf(stderr, "ipm %3d pobj %12.5e dobj %12.5e mu %9.2e pres %9.2e dres %9.2e\n",
                   iter, pobj, dobj, mu, pres, dres);

    res.X = X;
    res.pobj = pobj;
    res.dobj = dobj;
    res.iterations = iter;
    if (pres <= tol && dres <= tol && relgap <= tol) {
      res.status = SdpStatus::optimal;
      return res;
    }
    // A dual-feasible iterate driving b^T y toward −∞ is a Farkas certificate
    // of primal infeasibility.
    const bool dual_diverging = dres < 1e-6 && dobj < -1e7 * (1.0 + std::abs(pobj));
    if (!std::isfinite(mu) || dual_diverging || std::abs(dobj) > 1e14 ||
        y.lpNorm<Eigen::Infinity>() > 1e13) {
      res.status = SdpStatus::infeasible;
      return res;
    }
    if (iter == max_iter) break;

    Eigen::LLT<Mat> zllt(Z);
    if (zllt.info() != Eigen::Success) break;

    // Schur complement M_ij = Tr(A_i Z⁻¹ A_j X) + Σ_k D_ik (u_k/z_k) D_jk.
    std::vector<Mat> g(m);
    for (int j = 0; j < m; ++j) g[j] = zllt.solve(prob.A[j] * X);
    Mat schur(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) schur(i, j) = trace_prod(prob.A[i], g[j]);
    schur = symmetrize(schur);
    const Vec uz = p > 0 ? Vec(u.cwiseQuotient(z)) : Vec();
    if (p > 0) schur += prob.D * uz.asDiagonal() * prob.D.transpose();

    // Jacobi-equilibrated LDLT with ridge escalation and iterative refinement;
    // the Schur system turns severely ill-conditioned near degenerate optima.
    Vec equil = schur.diagonal().cwiseMax(1e-30).cwiseSqrt().cwiseInverse();
    Mat schur_eq = equil.asDiagonal() * schur * equil.asDiagonal();
    Eigen::LDLT<Mat> mldlt(schur_eq);
    double ridge = 0.0;
    while ((mldlt.info() != Eigen::Success || !mldlt.isPositive()) && ridge < 1e-4) {
      ridge = ridge == 0.0 ? 1e-14 : ridge * 100.0;
      mldlt.compute(schur_eq + ridge * Mat::Identity(m, m));
    }
    auto schur_solve = [&](const Vec& rhs) {
      Vec r = equil.asDiagonal() * rhs;
      Vec x = mldlt.solve(r);
      for (int refine = 0; refine < 2; ++refine) x += mldlt.solve(Vec(r - schur_eq * x));
      return Vec(equil.asDiagonal() * x);
    };

    const Mat h = zllt.solve(rdual * X);  // Z⁻¹ rdual X, shared by both directions

    // Newton direction for complementarity targets
    //   Z dX + dZ X = rc  (rc = −ZX + σµI − corr, passed without the −ZX part),
    //   z∘du + u∘dz = rc_lp (full right side).
    auto newton = [&](const Mat* rc, const Vec& rc_lp, Mat& dX_o, Mat& dZ_o, Vec& du_o, Vec& dz_o,
                      Vec& dy_o) {
      Mat k;
      if (rc) k = zllt.solve(*rc);
      Vec rhs = -prob.b;
      for (int i = 0; i < m; ++i) {
        double v = -trace_prod(prob.A[i], h);
        if (rc) v += trace_prod(prob.A[i], k);
        rhs(i) += v;
      }
      if (p > 0) {
        rhs += prob.D * u;
        rhs += prob.D * Vec(rc_lp.cwiseQuotient(z) - uz.cwiseProduct(rdual_lp));
      }
      dy_o = schur_solve(rhs);

      dZ_o = rdual;
      for (int i = 0; i < m; ++i) dZ_o += dy_o(i) * prob.A[i];
      dZ_o = symmetrize(dZ_o);
      dX_o = -X - zllt.solve(Mat(dZ_o * X));
      if (rc) dX_o += k;
      dX_o = symmetrize(dX_o);
      if (p > 0) {
        dz_o = prob.D.transpose() * dy_o + rdual_lp;
        du_o = rc_lp.cwiseQuotient(z) - uz.cwiseProduct(dz_o);
      }
    };

    // Predictor (affine scaling): rc = −ZX, rc_lp = −u∘z.
    const Vec rc_lp_aff = p > 0 ? Vec(-u.cwiseProduct(z)) : Vec();
    newton(nullptr, rc_lp_aff, dX_aff, dZ_aff, du_aff, dz_aff, dy_aff);
    double ap = std::min(max_step_psd(X, dX_aff), p > 0 ? max_step_lp(u, du_aff) : 1.0);
    double ad = std::min(max_step_psd(Z, dZ_aff), p > 0 ? max_step_lp(z, dz_aff) : 1.0);

    const double mu_aff = ((X + ap * dX_aff).cwiseProduct(Z + ad * dZ_aff).sum() +
                           (u + ap * du_aff).dot(z + ad * dz_aff)) /
                          (n + p);
    const double sigma = std::clamp(std::pow(std::max(0.0, mu_aff / mu), 3.0), 0.0, 1.0);

    // Corrector.
    const Mat rc = sigma * mu * Mat::Identity(n, n) - dZ_aff * dX_aff;
    Vec rc_lp;
    if (p > 0)
      rc_lp = Vec::Constant(p, sigma * mu) - u.cwiseProduct(z) - du_aff.cwiseProduct(dz_aff);
    newton(&rc, rc_lp, dX, dZ, du, dz, dy);

    ap = std::min(max_step_psd(X, dX), p > 0 ? max_step_lp(u, du) : 1.0);
    ad = std::min(max_step_psd(Z, dZ), p > 0 ? max_step_lp(z, dz) : 1.0);
    ap = ap >= 1.0 ? 1.0 : tau * ap;
    ad = ad >= 1.0 ? 1.0 : tau * ad;

    // Guard against runaway complementarity from a bad direction.
    auto mu_at = [&](double a_p, double a_d) {
      return ((X + a_p * dX).cwiseProduct(Z + a_d * dZ).sum() +
              (u + a_p * du).dot(z + a_d * dz)) /
             (n + p);
    };
    for (int shrink = 0; shrink < 30 && mu_at(ap, ad) > std::max(5.0 * mu, sigma * mu); ++shrink) {
      ap *= 0.5;
      ad *= 0.5;
    }

    if (trace)
      std::fprintf(stderr, "    sigma %9.2e ap %9.2e ad %9.2e |dX| %9.2e |dZ| %9.2e\n", sigma, ap,
                   ad, dX.norm() / X.norm(), dZ.norm() / Z.norm());
    if (ap < 1e-10 && ad < 1e-10) break;

    X = symmetrize(X + ap * dX);
    u += ap * du;
    y += ad * dy;
    Z = symmetrize(Z + ad * dZ);
    z += ad * dz;
  }
  res.status = SdpStatus::max_iter;
  return res;
}

void check_hermitian(const CMat& h, const char* what) {
  if (h.rows() != h.cols() || (h - h.adjoint()).norm() > 1e-9 * (1.0 + h.norm()))
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}

}  // namespace

Mat hermitian_to_real_embedding(const CMat& h) {
  check_hermitian(h, "hermitian_to_real_embedding");
  const int n = static_cast<int>(h.rows());
  Mat e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = h.real();
  e.topRightCorner(n, n) = -h.imag();
  e.bottomLeftCorner(n, n) = h.imag();
  e.bottomRightCorner(n, n) = h.real();
  return e;
}

CMat real_embedding_to_hermitian(const Mat& e) {
  const int n = static_cast<int>(e.rows()) / 2;
  CMat h(n, n);
  h.real() = 0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
  h.imag() = 0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
  return hermitize(h);
}

SdpSolution solve(const SdpProblem& problem, double tol, int max_iter) {
  check_hermitian(problem.objective, "sdp objective");
  if (problem.eq.empty() && problem.le.empty())
    throw std::invalid_argument("sdp: problem has no equality or <= constraint bounding the trace");

  const int nc = problem.dim();
  const int m = static_cast<int>(problem.eq.size() + problem.le.size() + problem.ge.size());
  const int p = static_cast<int>(problem.le.size() + problem.ge.size());

  RealProblem rp;
  rp.n = 2 * nc;
  rp.m = m;
  rp.p = p;
  rp.b.resize(m);
  rp.D = Mat::Zero(m, p);
  rp.A.reserve(m);

  // Embedded traces double, so right-hand sides double too. Each constraint is
  // scaled so max(‖A‖_F, |b|) = 1; the slack coefficient carries the same scale.
  const double cscale = std::max(1.0, problem.objective.norm());
  rp.C = hermitian_to_real_embedding(problem.objective) / cscale;

  int row = 0, slack = 0;
  auto add = [&](const SdpConstraint& c, int dir) {
    check_hermitian(c.matrix, "sdp constraint");
    if (c.matrix.rows() != nc) throw std::invalid_argument("sdp: constraint order mismatch");
    Mat a = hermitian_to_real_embedding(c.matrix);
    const double bv = 2.0 * c.value;
    const double s = std::max({a.norm(), std::abs(bv), 1e-12});
    rp.A.push_back(a / s);
    rp.b(row) = bv / s;
    if (dir != 0) {
      rp.D(row, slack) = dir / s;
      ++slack;
    }
    ++row;
  };
  for (const auto& c : problem.eq) add(c, 0);
  for (const auto& c : problem.le) add(c, +1);
  for (const auto& c : problem.ge) add(c, -1);

  IpmResult r = ipm_solve(rp, tol, max_iter);

  SdpSolution sol;
  sol.iterations = r.iterations;
  sol.status = r.status;
  sol.x_opt = real_embedding_to_hermitian(r.X);

  auto herm_trace = [](const CMat& a, const CMat& x) {
    return (a.conjugate().cwiseProduct(x)).sum().real();
  };
  sol.objective_value = herm_trace(problem.objective, sol.x_opt);
  const double dual_obj = 0.5 * r.dobj * cscale;  // undo embedding doubling and C scaling
  sol.duality_gap = std::abs(sol.objective_value - dual_obj);

  for (const auto& c : problem.eq)
    sol.max_eq_residual =
        std::max(sol.max_eq_residual, std::abs(herm_trace(c.matrix, sol.x_opt) - c.value));
  for (const auto& c : problem.le)
    sol.max_ineq_violation =
        std::max(sol.max_ineq_violation, herm_trace(c.matrix, sol.x_opt) - c.value);
  for (const auto& c : problem.ge)
    sol.max_ineq_violation =
        std::max(sol.max_ineq_violation, c.value - herm_trace(c.matrix, sol.x_opt));
  return sol;
}

void dump_problem(const SdpProblem& problem, std::ostream& os) {
  auto put = [&os](const char* name, size_t idx, const CMat& m, double v) {
    os << name << " " << idx << " " << v << "\n";
    os << m.real() << "\n" << m.imag() << "\n";
  };
  os << "sdp dim " << problem.dim() << " eq " << problem.eq.size() << " le " << problem.le.size()
     << " ge " << problem.ge.size() << "\n";
  put("objective", 0, problem.objective, 0.0);
  for (size_t i = 0; i < problem.eq.size(); ++i) put("eq", i, problem.eq[i].matrix, problem.eq[i].value);
  for (size_t i = 0; i < problem.le.size(); ++i) put("le", i, problem.le[i].matrix, problem.le[i].value);
  for (size_t i = 0; i < problem.ge.size(); ++i) put("ge", i, problem.ge[i].matrix, problem.ge[i].value);
}

}  // namespace fda
