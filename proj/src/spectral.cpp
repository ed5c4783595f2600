#include "isograph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "isograph/graph_io.hpp"

namespace isograph {

const char* to_string(Normalization n) {
  return n == Normalization::L1Positive ? "l1_positive" : "l2_unit";
}

Complex EigenPair::at(Vertex v) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
  if (it == vertices.end() || *it != v) return {};
  return vector(it - vertices.begin());
}

nlohmann::json EigenPair::to_json() const {
  nlohmann::json ids = nlohmann::json::array();
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    ids.push_back(vertices[k] + 1);
    values.push_back(complex_to_json(vector(Eigen::Index(k))));
  }
  return {{"normalization", to_string(normalization)},
          {"lambda", complex_to_json(lambda)},
          {"vertices", std::move(ids)},
          {"vector", std::move(values)}};
}

EigenPair EigenPair::from_json(const nlohmann::json& j) {
  EigenPair e;
  const auto tag = j.at("normalization").get<std::string>();
  if (tag == "l1_positive")
    e.normalization = Normalization::L1Positive;
  else if (tag == "l2_unit")
    e.normalization = Normalization::L2Unit;
  else
    throw Error(ErrorKind::InvalidInput, "unknown normalization tag " + tag);
  e.lambda = complex_from_json(j.at("lambda"));
  const auto& ids = j.at("vertices");
  const auto& values = j.at("vector");
  if (ids.size() != values.size())
    throw Error(ErrorKind::InvalidInput, "eigenvector vertices and values differ in length");
  e.vector.resize(Eigen::Index(values.size()));
  for (std::size_t k = 0; k < ids.size(); ++k) {
    e.vertices.push_back(ids[k].get<Vertex>() - 1);
    e.vector(Eigen::Index(k)) = complex_from_json(values[k]);
  }
  return e;
}

void normalize(Eigen::VectorXcd& v, Normalization n) {
  if (n == Normalization::L1Positive) {
    const Complex sum = v.sum();
    if (std::abs(sum) > 0.0) v /= sum;
  } else {
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
  }
}

bool is_primitive_matrix(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  if (n == 0 || a.cols() != n) return false;
  const Eigen::MatrixXd pattern = (a.array() > 0.0).cast<double>();
  // pattern^e by repeated squaring, re-thresholded so entries stay 0/1.
  auto boolean_product = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return Eigen::MatrixXd(((x * y).array() > 0.0).cast<double>());
  };
  std::size_t exponent = static_cast<std::size_t>((n - 1) * (n - 1) + 1);
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd base = pattern;
  while (exponent > 0) {
    if (exponent & 1U) result = boolean_product(result, base);
    exponent >>= 1U;
    if (exponent > 0) base = boolean_product(base, base);
  }
  return (result.array() > 0.0).all();
}

namespace {

template <class Apply>
PowerIterationResult iterate(Apply&& apply, std::size_t n, const PowerIterationOptions& opts) {
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::VectorXd v;
  if (opts.initial.size() == 0) {
    v = Eigen::VectorXd::Constant(size, 1.0 / double(n));
  } else {
    if (opts.initial.size() != size)
      throw Error(ErrorKind::InvalidInput, "initial vector has the wrong length");
    v = opts.initial.cwiseAbs();
    const double sum = v.sum();
    if (!(sum > 0.0)) throw Error(ErrorKind::InvalidInput, "initial vector is zero");
    v /= sum;
  }

  PowerIterationResult result;
  Eigen::VectorXd w(size);
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    apply(v, w);
    if (opts.lazy) w = 0.5 * (w + v);
    const double sum = w.sum();
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw Error(ErrorKind::IterationFailed,
                  "power iterate vanished at step " + std::to_string(it));
    w /= sum;
    const double change = (w - v).lpNorm<1>();
    v.swap(w);
    result.iterations = it;
    if (change < opts.tol) {
      result.converged = true;
      break;
    }
  }

  apply(v, w);
  const double lambda = w.sum();
  result.residual = (w - lambda * v).lpNorm<1>();
  result.pair.lambda = lambda;
  result.pair.vector = v.cast<Complex>();
  result.pair.normalization = Normalization::L1Positive;
  result.pair.vertices.resize(n);
  for (std::size_t k = 0; k < n; ++k) result.pair.vertices[k] = k;
  return result;
}

}  // namespace

PowerIterationResult power_iteration(const Eigen::MatrixXd& a, const PowerIterationOptions& opts) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorKind::InvalidInput, "power iteration needs a nonempty square matrix");
  if ((a.array() < 0.0).any())
    throw Error(ErrorKind::InvalidInput, "power iteration needs a non-negative matrix");
  if (opts.primitivity == PowerIterationOptions::Primitivity::Check) {
    const Eigen::MatrixXd iterated =
        opts.lazy ? Eigen::MatrixXd(0.5 * (a + Eigen::MatrixXd::Identity(a.rows(), a.cols()))) : a;
    if (!is_primitive_matrix(iterated))
      throw Error(ErrorKind::NotPrimitive, "no power of the matrix up to n^2 is positive");
  }
  return iterate([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = a * x; },
                 static_cast<std::size_t>(a.rows()), opts);
}

PowerIterationResult power_iteration(const CsrMatrix& a, const PowerIterationOptions& opts,
                                     const WeightedDigraph* pattern) {
  if (a.rows == 0) throw Error(ErrorKind::InvalidInput, "power iteration needs a nonempty matrix");
  if (opts.primitivity == PowerIterationOptions::Primitivity::Check && pattern != nullptr) {
    const bool ok = opts.lazy ? is_strongly_connected(*pattern) : is_primitive(*pattern);
    if (!ok) throw Error(ErrorKind::NotPrimitive, "graph is not strongly connected and aperiodic");
  }
  return iterate(
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        spmv(a, std::span<const double>(x.data(), a.rows), std::span<double>(y.data(), a.rows));
      },
      a.rows, opts);
}

Theorem1Check verify_theorem1(const WeightedDigraph& g, const StructuralSet& s, const EigenPair& eig,
                              double tol) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::VectorXcd u_s(n);
  for (Eigen::Index k = 0; k < n; ++k) u_s(k) = eig.at(s.members[std::size_t(k)]);

  Theorem1Check check;
  const double scale = eig.vector.norm();
  if (u_s.norm() <= 1e-14 * scale || scale == 0.0) {
    check.degenerate = true;
    return check;
  }
  const auto r = reduced_matrix(g, s, eig.lambda, tol);
  check.residual = (r.entries * u_s - eig.lambda * u_s).norm() / u_s.norm();
  return check;
}

EigenPair lift_eigenvector(const WeightedDigraph& g, const StructuralSet& s, Complex lambda,
                           const Eigen::VectorXcd& u_s, Normalization norm, double tol) {
  if (u_s.size() != static_cast<Eigen::Index>(s.size()))
    throw Error(ErrorKind::InvalidInput, "reduced eigenvector length differs from |S|");
  if (s.depth_of.size() != g.slot_count())
    throw Error(ErrorKind::InvalidInput, "structural set belongs to a different graph");

  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(Eigen::Index(g.slot_count()));
  for (std::size_t k = 0; k < s.size(); ++k) full(Eigen::Index(s.members[k])) = u_s(Eigen::Index(k));

  for (Vertex l : s.depth_order()) {
    if (s.depth_of[l] == 0) continue;
    const Complex denom = lambda - g.loop_weight(l);
    if (std::abs(denom) <= tol)
      throw Error(ErrorKind::SingularWeight,
                  "lambda equals the loop weight of vertex " + std::to_string(l + 1));
    Complex sum{};
    for (const auto& [j, w] : g.out_edges(l))
      if (j != l) sum += w * full(Eigen::Index(j));
    full(Eigen::Index(l)) = sum / denom;
  }

  EigenPair out;
  out.lambda = lambda;
  out.vertices = g.live_vertices();
  out.vector.resize(Eigen::Index(out.vertices.size()));
  for (std::size_t k = 0; k < out.vertices.size(); ++k)
    out.vector(Eigen::Index(k)) = full(Eigen::Index(out.vertices[k]));
  out.normalization = norm;
  normalize(out.vector, norm);
  return out;
}

namespace {

[[noreturn]] void co_iteration_failed(const std::string& why, const std::vector<double>& trace) {
  std::ostringstream msg;
  msg.precision(10);
  msg << why << "; lambda trace:";
  for (double l : trace) msg << ' ' << l;
  throw Error(ErrorKind::IterationFailed, msg.str());
}

}  // namespace

CoIterationResult reduced_eigen_co_iteration(const WeightedDigraph& g, const StructuralSet& s,
                                             double initial_lambda,
                                             const Eigen::VectorXd& initial_u_s,
                                             const CoIterationOptions& opts) {
  const auto n = static_cast<Eigen::Index>(s.size());
  if (n == 0) throw Error(ErrorKind::InvalidInput, "empty structural set");
  for (Vertex v : g.live_vertices())
    for (const auto& [j, w] : g.out_edges(v))
      if (w.real() < 0.0 || w.imag() != 0.0)
        throw Error(ErrorKind::InvalidInput, "co-iteration needs real non-negative weights");

  const auto branches = enumerate_branches(g, s, {.starts_in_s = true, .ends_in_s = true});
  CoIterationResult result;

  auto reduced_at = [&](double lambda) -> Eigen::MatrixXd {
    try {
      return reduced_matrix(g, s, branches, Complex{lambda, 0.0}, opts.tol).entries.real();
    } catch (const Error& e) {
      co_iteration_failed(e.what(), result.trace);
    }
  };

  Eigen::VectorXd u = initial_u_s.size() == 0 ? Eigen::VectorXd(Eigen::VectorXd::Ones(n)) : Eigen::VectorXd(initial_u_s.cwiseAbs());
  if (u.size() != n) throw Error(ErrorKind::InvalidInput, "initial u_S has the wrong length");
  if (!(u.norm() > 0.0)) throw Error(ErrorKind::InvalidInput, "initial u_S is zero");
  u.normalize();

  auto finish = [&](double lambda) {
    result.lambda = lambda;
    result.u_s.lambda = lambda;
    result.u_s.vertices = s.members;
    result.u_s.vector = u.cast<Complex>();
    result.u_s.normalization = Normalization::L2Unit;
    return result;
  };
  auto close = [&](double a, double b) { return std::abs(a - b) <= opts.tol * std::max(1.0, std::abs(b)); };

  if (opts.mode == CoIterationOptions::Mode::Plain) {
    double lambda = initial_lambda;
    for (std::size_t it = 1; it <= opts.max_iters; ++it) {
      const Eigen::VectorXd w = reduced_at(lambda) * u;
      const double norm = w.norm();
      const double next = norm / u.norm();
      result.trace.push_back(next);
      result.iterations = it;
      if (!(norm > 0.0) || !std::isfinite(norm) || next > 1e12 || next < 1e-12)
        co_iteration_failed("iterates diverged", result.trace);
      const Eigen::VectorXd u_next = w / norm;
      const double step = (u_next - u).norm();
      u = u_next;
      if (close(next, lambda) && step <= std::sqrt(opts.tol)) return finish(next);
      lambda = next;
    }
    co_iteration_failed("no fixed point within the iteration cap", result.trace);
  }

  // g(lambda) = spectral radius of R(lambda) via a shifted inner power iteration;
  // the shift by the current estimate damps the peripheral eigenvalues of a periodic R.
  auto spectral_radius = [&](double lambda) {
    const Eigen::MatrixXd r = reduced_at(lambda);
    const double shift = (r * u).norm();
    for (std::size_t k = 0; k < opts.inner_iters; ++k) {
      Eigen::VectorXd w = r * u + shift * u;
      const double norm = w.norm();
      if (!(norm > 0.0) || !std::isfinite(norm)) return 0.0;
      w /= norm;
      const double step = (w - u).norm();
      u = w;
      if (step <= opts.tol) break;
    }
    const double radius = (r * u).norm();
    result.trace.push_back(radius);
    ++result.iterations;
    return radius;
  };

  // h(lambda) = g(lambda) - lambda is decreasing above the largest complement loop weight.
  double floor = 0.0;
  for (Vertex v : s.complement()) floor = std::max(floor, g.loop_weight(v).real());
  double a = initial_lambda > floor ? initial_lambda : floor + 1.0;
  double ha = spectral_radius(a) - a;
  if (std::abs(ha) <= opts.tol * std::max(1.0, a)) return finish(a);

  double b = a;
  double hb = ha;
  while ((hb > 0.0) == (ha > 0.0)) {
    if (result.iterations >= opts.max_iters) co_iteration_failed("could not bracket the fixed point", result.trace);
    b = ha > 0.0 ? 2.0 * b : floor + 0.5 * (b - floor);
    if (b - floor < 1e-300) co_iteration_failed("bracket collapsed onto a pole", result.trace);
    hb = spectral_radius(b) - b;
    if (std::abs(hb) <= opts.tol * std::max(1.0, b)) return finish(b);
  }

  // Illinois regula falsi on the bracket [a, b].
  while (result.iterations < opts.max_iters) {
    const double c = (a * hb - b * ha) / (hb - ha);
    const double hc = spectral_radius(c) - c;
    if (std::abs(hc) <= opts.tol * std::max(1.0, c) || close(a, b)) return finish(c);
    if ((hc > 0.0) != (hb > 0.0)) {
      a = b;
      ha = hb;
    } else {
      ha *= 0.5;
    }
    b = c;
    hb = hc;
  }
  co_iteration_failed("no fixed point within the iteration cap", result.trace);
}

}  // namespace isograph
