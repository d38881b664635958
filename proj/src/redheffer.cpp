// Scattering-matrix (Redheffer star product) assembly of the stack solve.
// Used when the direct interface solve reports poor conditioning; every block
// here stays bounded because propagation factors only ever decay.

#include <Eigen/Dense>

#include "nfdce/floquet.hpp"

namespace nfdce {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct SMat {
  Mat uu, ud, du, dd; // u_out = uu u_in + ud d_in ; d_out = du u_in + dd d_in
};

SMat interface_s(const Mat& phiL, const Mat& psiL, const Mat& phiU, const Mat& psiU) {
  const auto m = phiL.rows();
  Mat mout(2 * m, 2 * m), min(2 * m, 2 * m);
  mout.topLeftCorner(m, m) = phiU;
  mout.topRightCorner(m, m) = -phiL;
  mout.bottomLeftCorner(m, m) = psiU;
  mout.bottomRightCorner(m, m) = psiL;
  min.topLeftCorner(m, m) = phiL;
  min.topRightCorner(m, m) = -phiU;
  min.bottomLeftCorner(m, m) = psiL;
  min.bottomRightCorner(m, m) = psiU;
  const Mat s = mout.partialPivLu().solve(min);
  SMat out;
  out.uu = s.topLeftCorner(m, m);
  out.ud = s.topRightCorner(m, m);
  out.du = s.bottomLeftCorner(m, m);
  out.dd = s.bottomRightCorner(m, m);
  return out;
}

SMat propagation_s(const Vec& phase) {
  const auto m = phase.size();
  SMat s;
  s.uu = phase.asDiagonal();
  s.dd = phase.asDiagonal();
  s.ud = Mat::Zero(m, m);
  s.du = Mat::Zero(m, m);
  return s;
}

SMat star(const SMat& a, const SMat& b) {
  const auto m = a.uu.rows();
  const Mat inv = (Mat::Identity(m, m) - a.ud * b.du).partialPivLu().inverse();
  SMat s;
  s.uu = b.uu * inv * a.uu;
  s.ud = b.uu * inv * a.ud * b.dd + b.ud;
  s.du = a.du + a.dd * b.du * inv * a.uu;
  s.dd = a.dd * (b.du * inv * a.ud + Mat::Identity(m, m)) * b.dd;
  return s;
}

} // namespace

void StackScattering::assemble_redheffer() {
  const int m = basis_.size();
  const Mat id = Mat::Identity(m, m);

  std::vector<SMat> elems;
  elems.reserve(5);
  // body2 | layer at z = -h
  elems.push_back(interface_s(id, Mat(y2_.asDiagonal()), modes_.V, modes_.Psi));
  elems.push_back(propagation_s(P_));
  // layer | gap at z = 0
  elems.push_back(interface_s(modes_.V, modes_.Psi, id, Mat(yv_.asDiagonal())));
  elems.push_back(propagation_s(Egap_));
  // gap | body1 at z = d
  elems.push_back(interface_s(id, Mat(yv_.asDiagonal()), id, Mat(y1_.asDiagonal())));

  std::vector<SMat> prefix(5), suffix(5);
  prefix[0] = elems[0];
  for (int k = 1; k < 5; ++k) prefix[k] = star(prefix[k - 1], elems[k]);
  suffix[4] = elems[4];
  for (int k = 3; k >= 0; --k) suffix[k] = star(elems[k], suffix[k + 1]);
  const SMat& global = prefix[4];

  // joint resolvents (independent of the excitation)
  std::vector<Eigen::PartialPivLU<Mat>> joint_lu;
  for (int k = 1; k <= 4; ++k)
    joint_lu.emplace_back(Mat(id - prefix[k - 1].ud * suffix[k].du));

  sols_.assign(2 * m, StackSolution{});
  for (int side = 0; side < 2; ++side) {
    for (int li = 0; li < m; ++li) {
      Vec u_in = Vec::Zero(m), d_in = Vec::Zero(m);
      if (side == 0) d_in[li] = 1.0;
      else u_in[li] = 1.0;

      Vec uj[4], dj[4];
      for (int k = 1; k <= 4; ++k) {
        const SMat& L = prefix[k - 1];
        const SMat& R = suffix[k];
        uj[k - 1] = joint_lu[k - 1].solve(L.uu * u_in + L.ud * (R.dd * d_in));
        dj[k - 1] = R.du * uj[k - 1] + R.dd * d_in;
      }

      StackSolution& sol = sols_[side * m + li];
      sol.a = uj[0];
      sol.b = dj[1];
      sol.U = uj[2];
      sol.D = dj[3];
      sol.t = global.uu * u_in + global.ud * d_in;
      sol.c = global.du * u_in + global.dd * d_in;
    }
  }
}

} // namespace nfdce
