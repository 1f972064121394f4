#pragma once

#include <random>
#include <vector>

#include "chandiv/channel.hpp"

namespace testsupport {

using namespace chandiv;

inline CMatrix ginibre(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n;
  CMatrix z(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) z(i, j) = cplx(n(rng), n(rng));
  return z;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
inline CMatrix random_unitary(std::mt19937_64& rng, int d) {
  const CMatrix z = ginibre(rng, d, d);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) q.col(k) *= std::polar(1.0, std::arg(r(k, k)));
  return q;
}

/// k Kraus operators of a random CPTP map: blocks of an isometry C^d -> C^{kd}.
inline std::vector<CMatrix> random_kraus(std::mt19937_64& rng, int d, int k) {
  const CMatrix z = ginibre(rng, k * d, d);
  Eigen::HouseholderQR<CMatrix> qr(z);
  const CMatrix v = qr.householderQ() * CMatrix::Identity(k * d, d);
  std::vector<CMatrix> out;
  for (int i = 0; i < k; ++i) out.push_back(v.block(i * d, 0, d, d));
  return out;
}

inline ChannelRep random_channel(std::mt19937_64& rng, int d, int k) {
  return ChannelRep::from_kraus(random_kraus(rng, d, k));
}

inline CMatrix random_density(std::mt19937_64& rng, int d) {
  const CMatrix z = ginibre(rng, d, d);
  const CMatrix rho = z * z.adjoint();
  return rho / rho.trace();
}

}  // namespace testsupport
