#include "qwadv/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qwadv {

PcaResult pca(const Dataset& ds, int k) {
  const auto count = static_cast<Eigen::Index>(ds.samples.size());
  if (count == 0) throw std::invalid_argument("empty dataset");
  const int n = static_cast<int>(ds.samples.front().adjacency.rows());
  const int d = n * n;
  if (k < 1 || k > d) throw std::invalid_argument("component count out of range");
  if (count <= k) throw std::invalid_argument("need more samples than components");

  Eigen::MatrixXd x(count, d);
  PcaResult res;
  res.labels.reserve(count);
  for (Eigen::Index s = 0; s < count; ++s) {
    const auto& a = ds.samples[s].adjacency;
    if (a.rows() != n) throw std::invalid_argument("mixed adjacency sizes");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x(s, i * n + j) = a(i, j);
    res.labels.push_back(ds.samples[s].label);
  }

  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(count - 1);
  res.total_variance = cov.trace();
  if (res.total_variance <= 1e-12)
    throw std::invalid_argument("dataset has no variance; principal directions undefined");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");

  // Eigenvalues arrive ascending; take the top k in descending order.
  res.components.resize(k, d);
  res.explained_variance.resize(k);
  for (int c = 0; c < k; ++c) {
    const int src = d - 1 - c;
    Eigen::VectorXd v = es.eigenvectors().col(src);
    // Sign convention: largest-magnitude coordinate positive.
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    res.components.row(c) = v.transpose();
    res.explained_variance(c) = std::max(0.0, es.eigenvalues()(src));
  }
  res.projected = x * res.components.transpose();
  return res;
}

std::string projection_to_csv(const PcaResult& r) {
  std::ostringstream ss;
  ss.precision(17);  // coordinates must survive a parse round trip
  const int k = static_cast<int>(r.components.rows());
  for (int c = 0; c < k; ++c) ss << "pc" << (c + 1) << ',';
  ss << "label\n";
  for (Eigen::Index s = 0; s < r.projected.rows(); ++s) {
    for (int c = 0; c < k; ++c) ss << r.projected(s, c) << ',';
    ss << r.labels[s] << '\n';
  }
  return ss.str();
}

std::string pca_summary_json(const PcaResult& r) {
  nlohmann::json j;
  j["k"] = r.components.rows();
  j["explained_variance"] = std::vector<double>(
      r.explained_variance.data(),
      r.explained_variance.data() + r.explained_variance.size());
  j["total_variance"] = r.total_variance;
  j["explained_fraction"] =
      r.total_variance > 0 ? r.explained_variance.sum() / r.total_variance : 0.0;
  j["preprocessing"]["centered"] = true;
  j["preprocessing"]["scaled"] = false;
  return j.dump();
}

}  // namespace qwadv
