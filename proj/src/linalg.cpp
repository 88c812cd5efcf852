#include "lureobs/linalg.hpp"

#include <stdexcept>

namespace lureobs {

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

namespace {
Vec sym_eigenvalues(const Mat& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("sym_eig: matrix must be square");
  Mat s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sym_eig: eigensolver failed to converge");
  return es.eigenvalues();
}
}  // namespace

double sym_eig_max(const Mat& m) { return sym_eigenvalues(m).maxCoeff(); }

double sym_eig_min(const Mat& m) { return sym_eigenvalues(m).minCoeff(); }

bool all_finite(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

}  // namespace lureobs
