#include "s1d/optimizer.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace s1d {

namespace {

struct Simplex {
  std::vector<Eigen::VectorXd> x;
  std::vector<double> f;

  void order() {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [this](auto a, auto b) { return f[a] < f[b]; });
    std::vector<Eigen::VectorXd> xs;
    std::vector<double> fs;
    for (auto i : idx) {
      xs.push_back(std::move(x[i]));
      fs.push_back(f[i]);
    }
    x = std::move(xs);
    f = std::move(fs);
  }
};

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& steps, const NelderMeadOptions& opts) {
  const Eigen::Index n = x0.size();
  const double dn = static_cast<double>(std::max<Eigen::Index>(n, 1));
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dn;
  const double contract = 0.75 - 1.0 / (2.0 * dn);
  const double shrink = 1.0 - 1.0 / dn;

  NelderMeadResult res;
  res.x = x0;
  res.value = f(x0);
  res.evals = 1;
  if (n == 0) {
    res.converged = true;
    return res;
  }

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    const double start_value = res.value;
    Simplex s;
    s.x.push_back(res.x);
    s.f.push_back(res.value);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd v = res.x;
      v(i) += steps(i);
      s.f.push_back(f(v));
      s.x.push_back(std::move(v));
      ++res.evals;
    }
    s.order();

    bool converged = false;
    while (res.evals < opts.max_evals) {
      if (s.f.back() - s.f.front() <= opts.ftol) {
        converged = true;
        break;
      }
      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i) centroid += s.x[i];
      centroid /= dn;

      const Eigen::VectorXd& worst = s.x[n];
      Eigen::VectorXd xr = centroid + reflect * (centroid - worst);
      const double fr = f(xr);
      ++res.evals;
      if (fr < s.f[0]) {
        Eigen::VectorXd xe = centroid + expand * (xr - centroid);
        const double fe = f(xe);
        ++res.evals;
        if (fe < fr) {
          s.x[n] = std::move(xe);
          s.f[n] = fe;
        } else {
          s.x[n] = std::move(xr);
          s.f[n] = fr;
        }
      } else if (fr < s.f[n - 1]) {
        s.x[n] = std::move(xr);
        s.f[n] = fr;
      } else {
        const bool outside = fr < s.f[n];
        Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + contract * (xr - centroid))
                                     : Eigen::VectorXd(centroid - contract * (centroid - worst));
        const double fc = f(xc);
        ++res.evals;
        if (fc < (outside ? fr : s.f[n])) {
          s.x[n] = std::move(xc);
          s.f[n] = fc;
        } else {
          for (Eigen::Index i = 1; i <= n; ++i) {
            s.x[i] = s.x[0] + shrink * (s.x[i] - s.x[0]);
            s.f[i] = f(s.x[i]);
            ++res.evals;
          }
        }
      }
      s.order();
    }

    if (s.f[0] <= res.value) {
      res.x = s.x[0];
      res.value = s.f[0];
    }
    res.converged = converged;
    if (!converged || start_value - res.value <= opts.ftol) break;
  }
  return res;
}

}  // namespace s1d
