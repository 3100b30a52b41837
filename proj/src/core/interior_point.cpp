// Homogeneous self-dual primal-dual interior point method for
//
//   minimize c'x  s.t.  A x = b,  G x + s = h,  s in K
//
// with K a product of nonnegative orthants, Lorentz cones and PSD cones, using
// Nesterov-Todd scaling and a Mehrotra predictor-corrector. Dense linear
// algebra throughout; the problems emitted by this project have at most a few
// hundred rows.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sparsecs/core/conic.hpp"

namespace sparsecs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class BlockKind { Linear, Lorentz, Psd };

struct Block {
  BlockKind kind;
  Index offset;
  Index size;   // rows in the stacked vector
  Index order;  // PSD matrix order
  bool rotated = false;
};

// Rotated cone rows (u, v, w) map to Lorentz rows ((u+v)/sqrt2, (u-v)/sqrt2, w).
// The map is an orthogonal involution, so it also maps back.
void rotate_rows(Eigen::Ref<Matrix> rows) {
  for (Index j = 0; j < rows.cols(); ++j) {
    const double u = rows(0, j);
    const double v = rows(1, j);
    rows(0, j) = (u + v) * M_SQRT1_2;
    rows(1, j) = (u - v) * M_SQRT1_2;
  }
}

void rotate_pair(Eigen::Ref<Vector> segment) {
  const double u = segment(0);
  const double v = segment(1);
  segment(0) = (u + v) * M_SQRT1_2;
  segment(1) = (u - v) * M_SQRT1_2;
}

struct StandardForm {
  Vector c;
  Matrix A;
  Vector b;
  Matrix G;
  Vector h;
  std::vector<Block> blocks;
  Index user_rows = 0;
  // Equilibration: the solver works with x~ = x / col_scale, eq rows times
  // eq_scale and cone rows times row_scale (constant per Lorentz block,
  // p_i p_j on PSD entry (i, j)), which maps each cone onto itself.
  Vector col_scale;
  Vector eq_scale;
  Vector row_scale;
};

// Ruiz-style equilibration restricted to cone-preserving row scalings.
void equilibrate(StandardForm& sf) {
  const Index n = sf.c.size();
  const Index p = sf.A.rows();
  const Index M = sf.G.rows();
  sf.col_scale = Vector::Ones(n);
  sf.eq_scale = Vector::Ones(p);
  sf.row_scale = Vector::Ones(M);
  auto safe_inv_sqrt = [](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 1.0; };
  for (int pass = 0; pass < 15; ++pass) {
    Vector col_norm = Vector::Zero(n);
    for (Index j = 0; j < n; ++j) {
      if (p) col_norm(j) = sf.A.col(j).cwiseAbs().maxCoeff();
      if (M) col_norm(j) = std::max(col_norm(j), sf.G.col(j).cwiseAbs().maxCoeff());
    }
    Vector d(n);
    for (Index j = 0; j < n; ++j) d(j) = safe_inv_sqrt(col_norm(j));

    Vector e(p);
    for (Index i = 0; i < p; ++i) e(i) = safe_inv_sqrt(sf.A.row(i).cwiseAbs().maxCoeff());

    Vector f(M);
    for (const Block& b : sf.blocks) {
      auto rows = sf.G.middleRows(b.offset, b.size);
      switch (b.kind) {
        case BlockKind::Linear:
          for (Index i = 0; i < b.size; ++i) f(b.offset + i) = safe_inv_sqrt(rows.row(i).cwiseAbs().maxCoeff());
          break;
        case BlockKind::Lorentz:
          f.segment(b.offset, b.size).setConstant(safe_inv_sqrt(rows.cwiseAbs().maxCoeff()));
          break;
        case BlockKind::Psd: {
          Vector mat_norm = Vector::Zero(b.order);
          Index idx = 0;
          for (Index j = 0; j < b.order; ++j) {
            for (Index i = j; i < b.order; ++i, ++idx) {
              const double v = rows.row(idx).cwiseAbs().maxCoeff();
              mat_norm(i) = std::max(mat_norm(i), v);
              mat_norm(j) = std::max(mat_norm(j), v);
            }
          }
          idx = 0;
          for (Index j = 0; j < b.order; ++j) {
            for (Index i = j; i < b.order; ++i, ++idx) {
              f(b.offset + idx) = std::sqrt(safe_inv_sqrt(mat_norm(i)) * safe_inv_sqrt(mat_norm(j)));
            }
          }
          break;
        }
      }
    }
    sf.A = e.asDiagonal() * sf.A * d.asDiagonal();
    sf.G = f.asDiagonal() * sf.G * d.asDiagonal();
    sf.col_scale.array() *= d.array();
    sf.eq_scale.array() *= e.array();
    sf.row_scale.array() *= f.array();
  }
  sf.c = sf.c.cwiseProduct(sf.col_scale);
  sf.b = sf.b.cwiseProduct(sf.eq_scale);
  sf.h = sf.h.cwiseProduct(sf.row_scale);
}

StandardForm standardize(const ConicProgram& program) {
  StandardForm sf;
  const Index n = program.num_variables();
  sf.c = program.objective;
  sf.A = program.eq_matrix.rows() ? program.eq_matrix : Matrix(0, n);
  sf.b = program.eq_rhs.size() ? program.eq_rhs : Vector(0);

  auto lower = [&](Index j) { return program.lower.size() ? program.lower(j) : -kInf; };
  auto upper = [&](Index j) { return program.upper.size() ? program.upper(j) : kInf; };
  // Fixed variables become equalities; a zero-width box has no interior.
  Index bound_rows = 0;
  for (Index j = 0; j < n; ++j) {
    if (lower(j) == upper(j)) {
      sf.A.conservativeResize(sf.A.rows() + 1, n);
      sf.A.row(sf.A.rows() - 1).setZero();
      sf.A(sf.A.rows() - 1, j) = 1.0;
      sf.b.conservativeResize(sf.b.size() + 1);
      sf.b(sf.b.size() - 1) = lower(j);
      continue;
    }
    if (std::isfinite(lower(j))) ++bound_rows;
    if (std::isfinite(upper(j))) ++bound_rows;
  }
  const Index user_rows = program.num_cone_rows();
  sf.user_rows = user_rows;
  sf.G = Matrix::Zero(user_rows + bound_rows, n);
  sf.h = Vector::Zero(user_rows + bound_rows);
  if (user_rows) {
    sf.G.topRows(user_rows) = program.cone_matrix;
    sf.h.head(user_rows) = program.cone_rhs;
  }

  Index offset = 0;
  for (const Cone& cone : program.cones) {
    Block block{BlockKind::Linear, offset, cone.rows(), cone.dim};
    switch (cone.kind) {
      case ConeKind::NonNegative: block.kind = BlockKind::Linear; break;
      case ConeKind::SecondOrder: block.kind = BlockKind::Lorentz; break;
      case ConeKind::RotatedSecondOrder:
        block.kind = BlockKind::Lorentz;
        block.rotated = true;
        rotate_rows(sf.G.middleRows(offset, 2));
        rotate_pair(sf.h.segment(offset, 2));
        break;
      case ConeKind::PositiveSemidefinite: block.kind = BlockKind::Psd; break;
    }
    sf.blocks.push_back(block);
    offset += cone.rows();
  }

  if (bound_rows) {
    Index row = user_rows;
    for (Index j = 0; j < n; ++j) {
      if (lower(j) == upper(j)) continue;
      if (std::isfinite(lower(j))) {
        sf.G(row, j) = -1.0;
        sf.h(row) = -lower(j);
        ++row;
      }
      if (std::isfinite(upper(j))) {
        sf.G(row, j) = 1.0;
        sf.h(row) = upper(j);
        ++row;
      }
    }
    sf.blocks.push_back(Block{BlockKind::Linear, user_rows, bound_rows, bound_rows});
  }
  equilibrate(sf);
  return sf;
}

// Cone-aware operations on stacked vectors, including the Nesterov-Todd scaling
// W at the current (s, z) pair:  W z = W^{-T} s = lambda.
class ConeAlgebra {
 public:
  ConeAlgebra(std::vector<Block> blocks, Index rows) : blocks_(std::move(blocks)), rows_(rows) {
    scalings_.resize(blocks_.size());
  }

  Index degree() const {
    Index d = 0;
    for (const Block& b : blocks_) d += b.kind == BlockKind::Lorentz ? 1 : (b.kind == BlockKind::Psd ? b.order : b.size);
    return d;
  }

  Vector identity() const {
    Vector e = Vector::Zero(rows_);
    for (const Block& b : blocks_) {
      switch (b.kind) {
        case BlockKind::Linear: e.segment(b.offset, b.size).setOnes(); break;
        case BlockKind::Lorentz: e(b.offset) = 1.0; break;
        case BlockKind::Psd: e.segment(b.offset, b.size) = svec(Matrix::Identity(b.order, b.order)); break;
      }
    }
    return e;
  }

  // Smallest "eigenvalue" of u in the Jordan-algebra sense; positive iff interior.
  double margin(const Vector& u) const {
    double out = kInf;
    for (const Block& b : blocks_) {
      auto seg = u.segment(b.offset, b.size);
      switch (b.kind) {
        case BlockKind::Linear: out = std::min(out, seg.minCoeff()); break;
        case BlockKind::Lorentz: out = std::min(out, seg(0) - seg.tail(b.size - 1).norm()); break;
        case BlockKind::Psd: {
          Eigen::SelfAdjointEigenSolver<Matrix> es(smat(seg, b.order), Eigen::EigenvaluesOnly);
          out = std::min(out, es.eigenvalues()(0));
          break;
        }
      }
    }
    return out;
  }

  double inner(const Vector& u, const Vector& v) const { return u.dot(v); }

  // Largest alpha with u + alpha d in K, for u in the interior.
  double max_step(const Vector& u, const Vector& d) const {
    double alpha = kInf;
    for (const Block& b : blocks_) {
      auto us = u.segment(b.offset, b.size);
      auto ds = d.segment(b.offset, b.size);
      switch (b.kind) {
        case BlockKind::Linear:
          for (Index i = 0; i < b.size; ++i) {
            if (ds(i) < 0.0) alpha = std::min(alpha, -us(i) / ds(i));
          }
          break;
        case BlockKind::Lorentz: alpha = std::min(alpha, lorentz_step(us, ds)); break;
        case BlockKind::Psd: alpha = std::min(alpha, psd_step(us, ds, b.order)); break;
      }
    }
    return alpha;
  }

  Vector product(const Vector& u, const Vector& v) const {
    Vector out(rows_);
    for (const Block& b : blocks_) {
      auto us = u.segment(b.offset, b.size);
      auto vs = v.segment(b.offset, b.size);
      auto os = out.segment(b.offset, b.size);
      switch (b.kind) {
        case BlockKind::Linear: os = us.cwiseProduct(vs); break;
        case BlockKind::Lorentz:
          os(0) = us.dot(vs);
          os.tail(b.size - 1) = us(0) * vs.tail(b.size - 1) + vs(0) * us.tail(b.size - 1);
          break;
        case BlockKind::Psd: {
          const Matrix U = smat(us, b.order);
          const Matrix V = smat(vs, b.order);
          os = svec(0.5 * (U * V + V * U));
          break;
        }
      }
    }
    return out;
  }

  // Returns false when (s, z) is not strictly interior.
  bool compute_scaling(const Vector& s, const Vector& z) {
    lambda_.resize(rows_);
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const Block& b = blocks_[k];
      Scaling& sc = scalings_[k];
      auto ss = s.segment(b.offset, b.size);
      auto zs = z.segment(b.offset, b.size);
      auto ls = lambda_.segment(b.offset, b.size);
      switch (b.kind) {
        case BlockKind::Linear:
          if ((ss.array() <= 0.0).any() || (zs.array() <= 0.0).any()) return false;
          sc.d = (ss.array() / zs.array()).sqrt();
          ls = (ss.array() * zs.array()).sqrt();
          break;
        case BlockKind::Lorentz: {
          const double s_det = ss(0) * ss(0) - ss.tail(b.size - 1).squaredNorm();
          const double z_det = zs(0) * zs(0) - zs.tail(b.size - 1).squaredNorm();
          if (ss(0) <= 0.0 || zs(0) <= 0.0 || s_det <= 0.0 || z_det <= 0.0) return false;
          const Vector s_bar = ss / std::sqrt(s_det);
          const Vector z_bar = zs / std::sqrt(z_det);
          const double gamma = std::sqrt(0.5 * (1.0 + s_bar.dot(z_bar)));
          Vector w_bar(b.size);
          w_bar(0) = (s_bar(0) + z_bar(0)) / (2.0 * gamma);
          w_bar.tail(b.size - 1) = (s_bar.tail(b.size - 1) - z_bar.tail(b.size - 1)) / (2.0 * gamma);
          sc.v = w_bar;
          sc.v(0) += 1.0;
          sc.v /= std::sqrt(2.0 * (w_bar(0) + 1.0));
          sc.beta = std::pow(s_det / z_det, 0.25);
          ls = lorentz_w(sc, zs);
          break;
        }
        case BlockKind::Psd: {
          Eigen::LLT<Matrix> ls_fact(smat(ss, b.order));
          Eigen::LLT<Matrix> lz_fact(smat(zs, b.order));
          if (ls_fact.info() != Eigen::Success || lz_fact.info() != Eigen::Success) return false;
          const Matrix Ls = ls_fact.matrixL();
          const Matrix Lz = lz_fact.matrixL();
          Eigen::JacobiSVD<Matrix> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
          const Vector sig = svd.singularValues();
          if (sig.minCoeff() <= 0.0) return false;
          const Vector isq = sig.array().rsqrt();
          sc.R = Ls * svd.matrixV() * isq.asDiagonal();
          sc.Rinv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
          ls = svec(Matrix(sig.asDiagonal()));
          sc.eig = sig;
          break;
        }
      }
    }
    return true;
  }

  const Vector& lambda() const { return lambda_; }

  // Solves lambda o x = d.
  Vector lambda_divide(const Vector& d) const {
    Vector out(rows_);
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const Block& b = blocks_[k];
      auto ls = lambda_.segment(b.offset, b.size);
      auto ds = d.segment(b.offset, b.size);
      auto os = out.segment(b.offset, b.size);
      switch (b.kind) {
        case BlockKind::Linear: os = ds.cwiseQuotient(ls); break;
        case BlockKind::Lorentz: {
          const double det = ls(0) * ls(0) - ls.tail(b.size - 1).squaredNorm();
          const double x0 = (ls(0) * ds(0) - ls.tail(b.size - 1).dot(ds.tail(b.size - 1))) / det;
          os(0) = x0;
          os.tail(b.size - 1) = (ds.tail(b.size - 1) - x0 * ls.tail(b.size - 1)) / ls(0);
          break;
        }
        case BlockKind::Psd: {
          const Vector& eig = scalings_[k].eig;
          Index idx = 0;
          for (Index j = 0; j < b.order; ++j) {
            for (Index i = j; i < b.order; ++i, ++idx) os(idx) = 2.0 * ds(idx) / (eig(i) + eig(j));
          }
          break;
        }
      }
    }
    return out;
  }

  enum class Op { W, Wt, Winv, Wtinv };

  Vector apply(Op op, const Vector& u) const {
    Vector out(rows_);
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const Block& b = blocks_[k];
      out.segment(b.offset, b.size) = apply_block(op, k, u.segment(b.offset, b.size));
    }
    return out;
  }

  // Column-wise W^{-T} of a stacked matrix.
  Matrix apply_wtinv(const Matrix& M) const {
    Matrix out(M.rows(), M.cols());
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const Block& b = blocks_[k];
      const Scaling& sc = scalings_[k];
      auto in = M.middleRows(b.offset, b.size);
      auto os = out.middleRows(b.offset, b.size);
      switch (b.kind) {
        case BlockKind::Linear: os = sc.d.cwiseInverse().asDiagonal() * in; break;
        case BlockKind::Lorentz: {
          // (1/beta) (2 J v v' J - J) M
          Vector jv = sc.v;
          jv.tail(b.size - 1) *= -1.0;
          const Eigen::RowVectorXd proj = jv.transpose() * in;
          os = 2.0 * jv * proj;
          os.row(0) -= in.row(0);
          os.bottomRows(b.size - 1) += in.bottomRows(b.size - 1);
          os /= sc.beta;
          break;
        }
        case BlockKind::Psd:
          for (Index j = 0; j < M.cols(); ++j) os.col(j) = apply_block(Op::Wtinv, k, in.col(j));
          break;
      }
    }
    return out;
  }

 private:
  struct Scaling {
    Vector d;
    double beta = 1.0;
    Vector v;
    Matrix R, Rinv;
    Vector eig;
  };

  static Vector lorentz_w(const Scaling& sc, const Eigen::Ref<const Vector>& u) {
    // beta (2 v v' - J) u
    Vector out = 2.0 * sc.v * sc.v.dot(u);
    out(0) -= u(0);
    out.tail(u.size() - 1) += u.tail(u.size() - 1);
    return sc.beta * out;
  }

  static Vector lorentz_winv(const Scaling& sc, const Eigen::Ref<const Vector>& u) {
    Vector jv = sc.v;
    jv.tail(u.size() - 1) *= -1.0;
    Vector out = 2.0 * jv * jv.dot(u);
    out(0) -= u(0);
    out.tail(u.size() - 1) += u.tail(u.size() - 1);
    return out / sc.beta;
  }

  Vector apply_block(Op op, std::size_t k, const Eigen::Ref<const Vector>& u) const {
    const Block& b = blocks_[k];
    const Scaling& sc = scalings_[k];
    switch (b.kind) {
      case BlockKind::Linear:
        return (op == Op::W || op == Op::Wt) ? Vector(sc.d.cwiseProduct(u)) : Vector(u.cwiseQuotient(sc.d));
      case BlockKind::Lorentz:
        return (op == Op::W || op == Op::Wt) ? lorentz_w(sc, u) : lorentz_winv(sc, u);
      case BlockKind::Psd: {
        const Matrix U = smat(u, b.order);
        switch (op) {
          case Op::W: return svec(sc.R.transpose() * U * sc.R);
          case Op::Wt: return svec(sc.R * U * sc.R.transpose());
          case Op::Winv: return svec(sc.Rinv.transpose() * U * sc.Rinv);
          case Op::Wtinv: return svec(sc.Rinv * U * sc.Rinv.transpose());
        }
      }
    }
    return Vector();
  }

  static double lorentz_step(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& d) {
    const Index p = u.size();
    const double a = d(0) * d(0) - d.tail(p - 1).squaredNorm();
    const double bq = u(0) * d(0) - u.tail(p - 1).dot(d.tail(p - 1));
    const double c = std::max(u(0) * u(0) - u.tail(p - 1).squaredNorm(), 0.0);
    // Smallest positive root of a t^2 + 2 bq t + c.
    const double scale = std::max({std::abs(a), std::abs(bq), c, 1e-300});
    if (std::abs(a) <= 1e-14 * scale) {
      if (bq < 0.0) return -c / (2.0 * bq);
      return d(0) >= 0.0 ? kInf : -u(0) / d(0);
    }
    const double disc = bq * bq - a * c;
    if (disc < 0.0) {
      // No sign change: the direction stays inside (a > 0) or we are degenerate.
      return a > 0.0 ? (d(0) >= 0.0 ? kInf : -u(0) / d(0)) : 0.0;
    }
    const double sq = std::sqrt(disc);
    const double q = -(bq + std::copysign(sq, bq));
    double r1 = q / a;
    double r2 = q != 0.0 ? c / q : kInf;
    double best = kInf;
    for (double r : {r1, r2}) {
      if (r > 0.0 && std::isfinite(r)) best = std::min(best, r);
    }
    if (a > 0.0 && best < kInf) {
      // Both roots positive means we exit and re-enter the double cone; the
      // first exit is real only if the leading coordinate stays positive.
      if (u(0) + best * d(0) < 0.0 && d(0) < 0.0) best = std::min(best, -u(0) / d(0));
    }
    return best;
  }

  static double psd_step(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& d, Index order) {
    Eigen::LLT<Matrix> llt(smat(u, order));
    if (llt.info() != Eigen::Success) return 0.0;
    Matrix D = smat(d, order);
    Matrix L = llt.matrixL();
    Matrix tmp = L.triangularView<Eigen::Lower>().solve(D);
    Matrix M = L.triangularView<Eigen::Lower>().solve(tmp.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    return lo < 0.0 ? -1.0 / lo : kInf;
  }

  std::vector<Block> blocks_;
  Index rows_;
  std::vector<Scaling> scalings_;
  Vector lambda_;
};

// Factorization of [[H, A'], [A, 0]] with H = Gs'Gs, Gs = W^{-T} G.
class KktSolver {
 public:
  bool factor(const Matrix& Gs, const Matrix& A) {
    const Index n = Gs.cols();
    const Index p = A.rows();
    Matrix H = Gs.transpose() * Gs;
    const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    p_ = p;
    if (p == 0) {
      llt_.compute(H);
      if (llt_.info() == Eigen::Success) {
        use_llt_ = true;
        return true;
      }
      H.diagonal().array() += 1e-13 * scale;
      llt_.compute(H);
      if (llt_.info() == Eigen::Success) {
        use_llt_ = true;
        return true;
      }
    }
    Matrix K = Matrix::Zero(n + p, n + p);
    K.topLeftCorner(n, n) = H;
    K.topLeftCorner(n, n).diagonal().array() += 1e-13 * scale;
    if (p) {
      K.topRightCorner(n, p) = A.transpose();
      K.bottomLeftCorner(p, n) = A;
      K.bottomRightCorner(p, p).diagonal().array() = -1e-13 * scale;
    }
    lu_.compute(K);
    use_llt_ = false;
    return true;
  }

  void solve(const Vector& rx, const Vector& ry, Vector& x, Vector& y) const {
    if (use_llt_) {
      x = llt_.solve(rx);
      y.resize(0);
      return;
    }
    Vector rhs(rx.size() + ry.size());
    rhs << rx, ry;
    const Vector sol = lu_.solve(rhs);
    x = sol.head(rx.size());
    y = sol.tail(ry.size());
  }

 private:
  Eigen::LLT<Matrix> llt_;
  Eigen::PartialPivLU<Matrix> lu_;
  bool use_llt_ = true;
  Index p_ = 0;
};

struct Direction {
  Vector x, y, z, s;
  double tau = 0.0, kappa = 0.0;
};

}  // namespace

ConicSolution InteriorPointBackend::solve(const ConicProgram& program, const ConicSettings& settings) {
  program.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start); };

  StandardForm sf = standardize(program);
  const Index n = sf.c.size();
  const Index p = sf.A.rows();
  const Index M = sf.G.rows();

  ConicSolution result;
  result.x = Vector::Zero(n);

  auto finish = [&](const Vector& x, const Vector& y, const Vector& s, const Vector& z, double tau) {
    result.x = x.cwiseProduct(sf.col_scale) / tau;
    result.eq_dual = (y.cwiseProduct(sf.eq_scale) / tau).head(program.eq_rhs.size());
    Vector su = s.cwiseQuotient(sf.row_scale).head(sf.user_rows) / tau;
    Vector zu = z.cwiseProduct(sf.row_scale).head(sf.user_rows) / tau;
    for (const Block& b : sf.blocks) {
      if (b.rotated) {
        rotate_pair(su.segment(b.offset, 2));
        rotate_pair(zu.segment(b.offset, 2));
      }
    }
    result.slack = std::move(su);
    result.cone_dual = std::move(zu);
  };

  if (M == 0) {
    // Only equality constraints: optimal iff c lies in the row space of A.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sf.A.rows() ? sf.A : Matrix::Zero(1, n));
    Vector x = p ? Vector(cod.solve(sf.b)) : Vector::Zero(n);
    const double infeas = p ? (sf.A * x - sf.b).norm() : 0.0;
    Vector y = p ? Vector(sf.A.transpose().completeOrthogonalDecomposition().solve(-sf.c)) : Vector::Zero(0);
    const double dual_res = (sf.c + (p ? Vector(sf.A.transpose() * y) : Vector::Zero(n))).norm();
    result.x = x.cwiseProduct(sf.col_scale);
    result.eq_dual = y.cwiseProduct(sf.eq_scale).head(program.eq_rhs.size());
    result.status.primal_residual = infeas;
    result.status.dual_residual = dual_res;
    if (infeas > settings.feasibility_tol * std::max(1.0, sf.b.norm())) {
      result.status.code = SolveCode::Infeasible;
    } else if (dual_res > settings.feasibility_tol * std::max(1.0, sf.c.norm())) {
      result.status.code = SolveCode::Unbounded;
    } else {
      result.status.code = SolveCode::Optimal;
      result.status.objective = sf.c.dot(x);
      result.status.dual_objective = result.status.objective;
      result.status.gap = 0.0;
    }
    return result;
  }

  ConeAlgebra cones(sf.blocks, M);
  const double degree = static_cast<double>(cones.degree());
  const Vector e = cones.identity();

  const double resx0 = std::max(1.0, sf.c.norm());
  const double resy0 = std::max(1.0, sf.b.norm());
  const double resz0 = std::max(1.0, sf.h.norm());

  KktSolver kkt;
  Matrix Gs;
  // Solves [[0, A', G'], [A, 0, 0], [G, 0, -W'W]] (x, y, z) = (bx, by, bz).
  auto reduced_solve = [&](const Vector& bx, const Vector& by, const Vector& bz, Vector& x, Vector& y, Vector& z,
                           bool identity_scaling) {
    const Vector wbz = identity_scaling ? bz : cones.apply(ConeAlgebra::Op::Wtinv, bz);
    kkt.solve(bx + Gs.transpose() * wbz, by, x, y);
    const Vector t = Gs * x - wbz;
    z = identity_scaling ? t : cones.apply(ConeAlgebra::Op::Winv, t);
  };
  // Solve plus iterative refinement against the unreduced system, whose
  // residual is computed with the original G rather than the scaled copy.
  auto kkt_solve = [&](const Vector& bx, const Vector& by, const Vector& bz, Vector& x, Vector& y, Vector& z,
                       bool identity_scaling) {
    reduced_solve(bx, by, bz, x, y, z, identity_scaling);
    for (int round = 0; round < 2; ++round) {
      Vector rx = bx - sf.G.transpose() * z;
      Vector ry = by;
      if (p) {
        rx -= sf.A.transpose() * y;
        ry -= sf.A * x;
      }
      const Vector wwz = identity_scaling ? z : cones.apply(ConeAlgebra::Op::Wt, cones.apply(ConeAlgebra::Op::W, z));
      const Vector rz = bz - sf.G * x + wwz;
      Vector dx, dy, dz;
      reduced_solve(rx, ry, rz, dx, dy, dz, identity_scaling);
      x += dx;
      if (p) y += dy;
      z += dz;
    }
  };

  // Starting point.
  Gs = sf.G;
  kkt.factor(Gs, sf.A);
  Vector x, y, z, s;
  {
    Vector z0;
    kkt_solve(Vector::Zero(n), sf.b, sf.h, x, y, z0, true);
    s = -z0;
    Vector xd, yd;
    kkt_solve(-sf.c, Vector::Zero(p), Vector::Zero(M), xd, yd, z, true);
    y = yd;
    const double ap = -cones.margin(s);
    if (ap >= 0.0) s += (1.0 + ap) * e;
    const double ad = -cones.margin(z);
    if (ad >= 0.0) z += (1.0 + ad) * e;
  }
  if (p == 0) y.resize(0);
  double tau = 1.0;
  double kappa = 1.0;

  struct Snapshot {
    Vector x, y, s, z;
    double tau = 1.0, pres = kInf, dres = kInf, gap = kInf, relgap = kInf, pcost = 0.0, dcost = 0.0, merit = kInf;
  } best;

  SolverStatus& status = result.status;
  int iter = 0;
  bool stalled = false;
  for (;; ++iter) {
    const Vector hrx = (p ? Vector(sf.A.transpose() * y) : Vector::Zero(n)) + sf.G.transpose() * z;
    const Vector hry = p ? Vector(sf.A * x) : Vector(0);
    const Vector hrz = sf.G * x + s;
    const double cx = sf.c.dot(x);
    const double by = p ? sf.b.dot(y) : 0.0;
    const double hz = sf.h.dot(z);
    const Vector rx = hrx + tau * sf.c;
    const Vector ry = p ? Vector(hry - tau * sf.b) : Vector(0);
    const Vector rz = hrz - tau * sf.h;
    const double rt = kappa + cx + by + hz;
    const double sz = s.dot(z);
    const double mu = (sz + tau * kappa) / (degree + 1.0);

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double pres = std::max(p ? ry.norm() / resy0 : 0.0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;
    const double gap = sz / (tau * tau);
    double relgap = kInf;
    if (pcost < 0.0) relgap = gap / -pcost;
    else if (dcost > 0.0) relgap = gap / dcost;
    const double pinfres = (hz + by < 0.0) ? hrx.norm() / resx0 / (-hz - by) : kInf;
    const double dinfres = (cx < 0.0) ? std::max(p ? hry.norm() / resy0 : 0.0, hrz.norm() / resz0) / (-cx) : kInf;

    status.iterations = iter;
    status.primal_residual = pres;
    status.dual_residual = dres;
    status.gap = gap;
    status.dual_objective = dcost;
    if (settings.verbose) {
      std::fprintf(stderr, "ipm %3d pcost=% .9e dcost=% .9e gap=%.2e pres=%.2e dres=%.2e tau=%.2e kappa=%.2e\n",
                   iter, pcost, dcost, gap, pres, dres, tau, kappa);
    }

    auto converged = [&](double tol) {
      return pres <= tol && dres <= tol && (gap <= tol || relgap <= tol);
    };
    if (converged(settings.feasibility_tol) ||
        (pres <= settings.feasibility_tol && dres <= settings.feasibility_tol &&
         (gap <= settings.gap_tol || relgap <= settings.gap_tol))) {
      status.code = SolveCode::Optimal;
      status.objective = pcost;
      finish(x, y, s, z, tau);
      return result;
    }
    if (pinfres <= settings.feasibility_tol) {
      status.code = SolveCode::Infeasible;
      const double scale = -hz - by;
      finish(Vector::Zero(n), y, Vector::Zero(M), z, scale);
      return result;
    }
    if (dinfres <= settings.feasibility_tol) {
      status.code = SolveCode::Unbounded;
      finish(x, Vector::Zero(p), s, Vector::Zero(M), -cx);
      return result;
    }
    // Remember the iterate with the best worst-case measure; late iterations
    // can lose primal accuracy once the scaling becomes ill-conditioned.
    const double merit = std::max({pres, dres, std::min(gap, relgap)});
    if (merit < best.merit) {
      best = Snapshot{x, y, s, z, tau, pres, dres, gap, relgap, pcost, dcost, merit};
    }
    const bool out_of_time = elapsed() >= settings.time_limit;
    // Stop early once the iterates clearly deteriorate past the best one.
    const bool diverging = best.merit <= settings.accepted_tol && merit > 1e3 * best.merit;
    if (stalled || diverging || iter >= settings.max_iterations || out_of_time) {
      const bool accepted = best.pres <= settings.accepted_tol && best.dres <= settings.accepted_tol &&
                            (best.gap <= settings.accepted_tol || best.relgap <= settings.accepted_tol);
      if (accepted) {
        status.code = SolveCode::Optimal;
        status.iterations = iter;
        status.primal_residual = best.pres;
        status.dual_residual = best.dres;
        status.gap = best.gap;
        status.objective = best.pcost;
        status.dual_objective = best.dcost;
        finish(best.x, best.y, best.s, best.z, best.tau);
        return result;
      }
      if (pinfres <= settings.accepted_tol) {
        status.code = SolveCode::Infeasible;
      } else if (dinfres <= settings.accepted_tol) {
        status.code = SolveCode::Unbounded;
      } else {
        status.code = out_of_time ? SolveCode::TimeLimit : SolveCode::NumericLimit;
        status.objective = pcost;
      }
      finish(x, y, s, z, tau);
      return result;
    }

    if (!cones.compute_scaling(s, z)) {
      if (settings.verbose) std::fprintf(stderr, "ipm: iterate left the cone interior\n");
      stalled = true;
      continue;
    }
    Gs = cones.apply_wtinv(sf.G);
    kkt.factor(Gs, sf.A);

    Vector x1, y1, z1;
    kkt_solve(-sf.c, sf.b, sf.h, x1, y1, z1, false);
    const double denom_tau = sf.c.dot(x1) + (p ? sf.b.dot(y1) : 0.0) + sf.h.dot(z1) - kappa / tau;

    const Vector& lam = cones.lambda();
    const Vector lam_sq = cones.product(lam, lam);

    Direction affine;
    double sigma = 0.0;
    Vector correction = Vector::Zero(M);
    double corr_tk = 0.0;
    Direction dir;
    double step = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      const bool predictor = pass == 0;
      const double keep = predictor ? 1.0 : 1.0 - sigma;
      const Vector ds = -lam_sq + (predictor ? Vector::Zero(M) : Vector(sigma * mu * e - correction));
      const double dk = -tau * kappa + (predictor ? 0.0 : sigma * mu - corr_tk);
      const Vector lds = cones.lambda_divide(ds);

      const Vector bx = -keep * rx;
      const Vector byv = p ? Vector(-keep * ry) : Vector(0);
      const Vector bz = -keep * rz - cones.apply(ConeAlgebra::Op::Wt, lds);
      Vector x2, y2, z2;
      kkt_solve(bx, byv, bz, x2, y2, z2, false);
      const double rhs_tau = -keep * rt - dk / tau;
      const double dtau = (rhs_tau - (sf.c.dot(x2) + (p ? sf.b.dot(y2) : 0.0) + sf.h.dot(z2))) / denom_tau;

      dir.tau = dtau;
      dir.x = x2 + dtau * x1;
      dir.y = p ? Vector(y2 + dtau * y1) : Vector(0);
      dir.z = z2 + dtau * z1;
      const Vector wdz = cones.apply(ConeAlgebra::Op::W, dir.z);
      dir.s = cones.apply(ConeAlgebra::Op::Wt, lds - wdz);
      dir.kappa = (dk - kappa * dtau) / tau;

      double amax = std::min(cones.max_step(s, dir.s), cones.max_step(z, dir.z));
      if (dir.tau < 0.0) amax = std::min(amax, -tau / dir.tau);
      if (dir.kappa < 0.0) amax = std::min(amax, -kappa / dir.kappa);

      if (predictor) {
        const double a = std::min(1.0, amax);
        sigma = std::pow(1.0 - a, 3.0);
        const Vector wis = cones.apply(ConeAlgebra::Op::Wtinv, dir.s);
        correction = cones.product(wis, wdz);
        corr_tk = dir.tau * dir.kappa;
      } else {
        step = std::min(1.0, 0.99 * amax);
      }
    }

    if (!(step > 1e-12) || !std::isfinite(step)) {
      if (settings.verbose) std::fprintf(stderr, "ipm: step length %g\n", step);
      stalled = true;
      continue;
    }
    x += step * dir.x;
    if (p) y += step * dir.y;
    z += step * dir.z;
    s += step * dir.s;
    tau += step * dir.tau;
    kappa += step * dir.kappa;
  }
}

}  // namespace sparsecs
