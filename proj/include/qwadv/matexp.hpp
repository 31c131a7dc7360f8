#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace qwadv {

// Dense matrix exponential via degree-13 Pade approximation with scaling and
// squaring. Works for real and complex matrices; accurate to near machine
// precision for the modest operator norms seen here.
template <typename Mat>
Mat expm(const Mat& a) {
  using Scalar = typename Mat::Scalar;
  const Eigen::Index n = a.rows();

  // 1-norm controls the scaling. theta_13 is the largest norm for which the
  // unscaled Pade-13 approximant stays below double-precision backward error.
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  const double theta13 = 5.371920351148152;
  int squarings = 0;
  Mat as = a;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    as = a / Scalar(std::ldexp(1.0, squarings));
  }

  static const double b[14] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};

  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = as * as;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;

  Mat u = as * (a6 * (Scalar(b[13]) * a6 + Scalar(b[11]) * a4 + Scalar(b[9]) * a2) +
                Scalar(b[7]) * a6 + Scalar(b[5]) * a4 + Scalar(b[3]) * a2 +
                Scalar(b[1]) * ident);
  Mat v = a6 * (Scalar(b[12]) * a6 + Scalar(b[10]) * a4 + Scalar(b[8]) * a2) +
          Scalar(b[6]) * a6 + Scalar(b[4]) * a4 + Scalar(b[2]) * a2 +
          Scalar(b[0]) * ident;

  Mat num = v + u;
  Mat den = v - u;
  Mat r = den.partialPivLu().solve(num);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace qwadv
