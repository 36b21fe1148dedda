#include <Eigen/Dense>

#include "lentparticle/smallmat.hpp"

namespace lp {

double min_eigenvalue(const SMat<double>& m) {
  const int n = m.rows();
  if (n == 0) return 0.0;
  if (n == 1) return m(0, 0);
  if (n == 2) {
    const double a = m(0, 0), d = m(1, 1), b = 0.5 * (m(0, 1) + m(1, 0));
    const double tr = 0.5 * (a + d);
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    return tr - disc;
  }
  Eigen::MatrixXd e(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e(i, j) = 0.5 * (m(i, j) + m(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace lp
