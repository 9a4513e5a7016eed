#include "liees/chenfliess.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace liees {

namespace {

std::size_t ipow(int b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(b);
  return r;
}

std::size_t word_index(const std::vector<int>& word, int letters) {
  std::size_t k = 0;
  for (int w : word) {
    require(w >= 1 && w <= letters, ErrorKind::invalid_parameter, "word letter out of range");
    k = k * letters + static_cast<std::size_t>(w - 1);
  }
  return k;
}

void check_shape(const TruncatedTensor& a, const TruncatedTensor& b) {
  require(a.letters == b.letters && a.depth == b.depth, ErrorKind::invalid_parameter,
          "tensor shapes differ");
}

}  // namespace

TruncatedTensor::TruncatedTensor(int n, int d) : letters(n), depth(d), level(d + 1) {
  require(n >= 1 && d >= 0, ErrorKind::invalid_parameter, "bad tensor shape");
  for (int l = 0; l <= d; ++l) level[l].assign(ipow(n, l), 0.0);
}

TruncatedTensor TruncatedTensor::unit(int n, int d) {
  TruncatedTensor t(n, d);
  t.level[0][0] = 1.0;
  return t;
}

double& TruncatedTensor::at(const std::vector<int>& word) {
  require(static_cast<int>(word.size()) <= depth, ErrorKind::invalid_parameter,
          "word longer than tensor depth");
  return level[word.size()][word_index(word, letters)];
}

double TruncatedTensor::at(const std::vector<int>& word) const {
  require(static_cast<int>(word.size()) <= depth, ErrorKind::invalid_parameter,
          "word longer than tensor depth");
  return level[word.size()][word_index(word, letters)];
}

double TruncatedTensor::max_abs_difference(const TruncatedTensor& o) const {
  check_shape(*this, o);
  double m = 0.0;
  for (int l = 0; l <= depth; ++l)
    for (std::size_t i = 0; i < level[l].size(); ++i)
      m = std::max(m, std::abs(level[l][i] - o.level[l][i]));
  return m;
}

TruncatedTensor operator+(const TruncatedTensor& a, const TruncatedTensor& b) {
  check_shape(a, b);
  TruncatedTensor r = a;
  for (int l = 0; l <= a.depth; ++l)
    for (std::size_t i = 0; i < r.level[l].size(); ++i) r.level[l][i] += b.level[l][i];
  return r;
}

TruncatedTensor operator-(const TruncatedTensor& a, const TruncatedTensor& b) {
  return a + (-1.0) * b;
}

TruncatedTensor operator*(double s, const TruncatedTensor& a) {
  TruncatedTensor r = a;
  for (auto& lv : r.level)
    for (double& v : lv) v *= s;
  return r;
}

TruncatedTensor operator*(const TruncatedTensor& a, const TruncatedTensor& b) {
  check_shape(a, b);
  TruncatedTensor r(a.letters, a.depth);
  for (int i = 0; i <= a.depth; ++i) {
    for (int j = 0; i + j <= a.depth; ++j) {
      const auto& la = a.level[i];
      const auto& lb = b.level[j];
      auto& out = r.level[i + j];
      const std::size_t nb = lb.size();
      for (std::size_t p = 0; p < la.size(); ++p) {
        if (la[p] == 0.0) continue;
        for (std::size_t q = 0; q < nb; ++q) out[p * nb + q] += la[p] * lb[q];
      }
    }
  }
  return r;
}

TruncatedTensor tensor_log(const TruncatedTensor& a) {
  require(std::abs(a.level[0][0] - 1.0) < 1e-12, ErrorKind::invalid_parameter,
          "tensor_log needs a unit constant term");
  TruncatedTensor x = a;
  x.level[0][0] = 0.0;
  TruncatedTensor result(a.letters, a.depth);
  TruncatedTensor power = x;
  for (int k = 1; k <= a.depth; ++k) {
    result = result + ((k % 2 ? 1.0 : -1.0) / k) * power;
    power = power * x;
  }
  return result;
}

TruncatedTensor tensor_exp(const TruncatedTensor& a) {
  TruncatedTensor x = a;
  const double c0 = x.level[0][0];
  x.level[0][0] = 0.0;
  TruncatedTensor result = TruncatedTensor::unit(a.letters, a.depth);
  TruncatedTensor term = TruncatedTensor::unit(a.letters, a.depth);
  for (int k = 1; k <= a.depth; ++k) {
    term = (1.0 / k) * (term * x);
    result = result + term;
  }
  return std::exp(c0) * result;
}

TruncatedTensor bracket_tensor(const BracketIndex& idx, int letters, int depth) {
  require(idx.length() >= 1 && idx.length() <= depth, ErrorKind::invalid_parameter,
          "bracket longer than tensor depth");
  TruncatedTensor e(letters, depth);
  e.at({idx.idx[0]}) = 1.0;
  for (int k = 1; k < idx.length(); ++k) {
    TruncatedTensor g(letters, depth);
    g.at({idx.idx[k]}) = 1.0;
    e = e * g - g * e;
  }
  return e;
}

namespace {

struct BasisLevel {
  int length = 0;
  std::vector<BracketIndex> elements;
  Eigen::MatrixXd expansion;  // words x elements
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
};

struct Basis {
  std::vector<BracketIndex> all;
  std::vector<BasisLevel> levels;  // levels[l-1]
};

std::vector<std::vector<int>> all_words(int letters, int length) {
  std::vector<std::vector<int>> out;
  std::vector<int> w(length, 1);
  const std::size_t total = ipow(letters, length);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t r = k;
    for (int i = length - 1; i >= 0; --i) {
      w[i] = static_cast<int>(r % letters) + 1;
      r /= letters;
    }
    out.push_back(w);
  }
  return out;
}

std::unique_ptr<Basis> build_basis(int letters, int depth) {
  auto b = std::make_unique<Basis>();
  for (int l = 1; l <= depth; ++l) {
    BasisLevel lv;
    lv.length = l;
    std::vector<std::vector<int>> cands;
    for (auto& w : all_words(letters, l))
      if (l == 1 || w[0] < w[1]) cands.push_back(w);
    if (l > 1)
      for (auto& w : all_words(letters, l))
        if (w[0] > w[1]) cands.push_back(w);

    const std::size_t nw = ipow(letters, l);
    std::vector<Eigen::VectorXd> ortho;
    std::vector<Eigen::VectorXd> raw;
    for (auto& c : cands) {
      const TruncatedTensor t = bracket_tensor(BracketIndex(c), letters, l);
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(t.level[l].data(), nw);
      const double norm = v.norm();
      if (norm == 0.0) continue;
      Eigen::VectorXd r = v;
      for (const auto& q : ortho) r -= q.dot(r) * q;
      if (r.norm() > 1e-8 * norm) {
        ortho.push_back(r / r.norm());
        raw.push_back(v);
        lv.elements.emplace_back(c);
      }
    }
    lv.expansion.resize(nw, raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) lv.expansion.col(j) = raw[j];
    if (!raw.empty()) lv.qr.compute(lv.expansion);
    for (auto& e : lv.elements) b->all.push_back(e);
    b->levels.push_back(std::move(lv));
  }
  return b;
}

const Basis& basis_for(int letters, int depth) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<Basis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{letters, depth}];
  if (!slot) slot = build_basis(letters, depth);
  return *slot;
}

}  // namespace

const std::vector<BracketIndex>& lie_basis(int letters, int depth) {
  require(letters >= 1 && letters <= 4 && depth >= 1 && depth <= 4,
          ErrorKind::invalid_parameter, "lie basis supports at most 4 letters and depth 4");
  return basis_for(letters, depth).all;
}

double Signature::entry(const std::vector<int>& word) const {
  std::vector<int> rev(word.rbegin(), word.rend());
  return tensor.at(rev);
}

double Signature::time_ordered(const std::vector<int>& word) const { return tensor.at(word); }

int default_quadrature_steps(const std::vector<DitherSpec>& dithers) {
  if (const char* env = std::getenv("LIEES_QUAD_STEPS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    require(end != env && *end == '\0' && v > 0, ErrorKind::invalid_parameter,
            "LIEES_QUAD_STEPS must be a positive integer");
    return static_cast<int>(v);
  }
  int f = 1;
  for (const auto& d : dithers) f = std::max(f, fastest_harmonic(d));
  return 8192 * f;
}

Signature compute_signature(const std::vector<DitherSpec>& dithers, int depth, int steps) {
  require(!dithers.empty(), ErrorKind::invalid_parameter, "signature needs at least one dither");
  require(dithers.size() <= 4, ErrorKind::invalid_parameter, "signature supports at most 4 channels");
  require(depth >= 1 && depth <= 4, ErrorKind::invalid_parameter, "signature depth must be in 1..4");
  const double eps = dithers.front().epsilon;
  int fastest = 1;
  for (const auto& d : dithers) {
    validate(d);
    require(std::abs(d.epsilon - eps) <= 1e-12 * eps, ErrorKind::invalid_parameter,
            "dithers must share one period");
    fastest = std::max(fastest, fastest_harmonic(d));
  }
  if (steps == 0) steps = default_quadrature_steps(dithers);
  if (steps < 16 * fastest)
    fail(ErrorKind::resolution, "signature quadrature below 16 samples per fastest harmonic");

  const int n = static_cast<int>(dithers.size());
  Signature sig;
  sig.depth = depth;
  sig.channels = n;
  sig.epsilon = eps;
  sig.quadrature_steps = steps;
  for (const auto& d : dithers) sig.exponents.push_back(amplitude_exponent(d));

  // Progressive trapezoid: F_{w j}(t) = int_0^t F_w(s) u_j(s) ds.
  const double h = eps / steps;
  std::vector<std::vector<double>> prev(depth + 1), cur(depth + 1);
  for (int l = 0; l <= depth; ++l) {
    prev[l].assign(ipow(n, l), 0.0);
    cur[l].assign(ipow(n, l), 0.0);
  }
  prev[0][0] = cur[0][0] = 1.0;
  std::vector<double> u_prev(n), u_cur(n);
  for (int j = 0; j < n; ++j) u_prev[j] = eval_dither(dithers[j], 0.0);

  for (int k = 1; k <= steps; ++k) {
    const double t = eps * static_cast<double>(k) / steps;
    for (int j = 0; j < n; ++j) u_cur[j] = eval_dither(dithers[j], t);
    for (int l = 1; l <= depth; ++l) {
      const auto& pp = prev[l - 1];
      const auto& pc = cur[l - 1];
      auto& out = cur[l];
      const auto& old = prev[l];
      for (std::size_t p = 0; p < pp.size(); ++p)
        for (int j = 0; j < n; ++j) {
          const std::size_t w = p * n + j;
          out[w] = old[w] + 0.5 * h * (pp[p] * u_prev[j] + pc[p] * u_cur[j]);
        }
    }
    std::swap(prev, cur);
    cur[0][0] = 1.0;
    std::swap(u_prev, u_cur);
  }

  sig.tensor = TruncatedTensor(n, depth);
  for (int l = 0; l <= depth; ++l) sig.tensor.level[l] = prev[l];
  return sig;
}

const BracketCoefficient* BracketCoefficients::find(const BracketIndex& idx) const {
  for (const auto& c : items)
    if (c.index == idx) return &c;
  return nullptr;
}

BracketCoefficients log_signature(const Signature& sig) {
  const Basis& basis = basis_for(sig.channels, sig.depth);
  const TruncatedTensor lg = tensor_log(sig.tensor);
  BracketCoefficients out;
  out.epsilon = sig.epsilon;
  out.depth = sig.depth;
  for (const auto& lv : basis.levels) {
    const std::size_t nw = lg.level[lv.length].size();
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(lg.level[lv.length].data(), nw);
    if (lv.elements.empty()) {
      out.projection_residual = std::max(out.projection_residual, v.cwiseAbs().maxCoeff());
      continue;
    }
    const Eigen::VectorXd c = lv.qr.solve(v);
    const Eigen::VectorXd r = lv.expansion * c - v;
    out.projection_residual = std::max(out.projection_residual, r.cwiseAbs().maxCoeff());
    for (std::size_t j = 0; j < lv.elements.size(); ++j) {
      BracketCoefficient bc;
      bc.index = lv.elements[j];
      bc.value = c[j];
      bc.per_period = c[j] / sig.epsilon;
      double p = 0.0;
      for (int letter : bc.index.idx) p += sig.exponents[letter - 1];
      bc.epsilon_order = bc.index.length() - p;
      bc.scale_free = c[j] / std::pow(sig.epsilon, bc.epsilon_order);
      out.items.push_back(bc);
    }
  }
  return out;
}

ExcitationReport verify_excitation(const std::vector<DitherSpec>& dithers,
                                   const std::vector<BracketIndex>& targets, double tol,
                                   int steps) {
  require(!targets.empty(), ErrorKind::invalid_parameter, "excitation check needs a target");
  require(tol > 0.0, ErrorKind::invalid_parameter, "excitation tolerance must be positive");
  int depth = 4;
  for (const auto& t : targets) {
    require(t.length() >= 1 && t.length() <= 4, ErrorKind::invalid_parameter,
            "target bracket length must be in 1..4");
    depth = std::max(depth, t.length());
  }
  const BracketCoefficients coeffs = log_signature(compute_signature(dithers, depth, steps));

  ExcitationReport rep;
  rep.targets = targets;
  rep.tol = tol;
  double max_order = 0.0;
  double min_target = std::numeric_limits<double>::infinity();
  for (const auto& t : targets) {
    const BracketCoefficient* c = coeffs.find(t);
    require(c != nullptr, ErrorKind::invalid_parameter,
            "target " + t.str() + " is not a basis bracket");
    rep.target_coeffs.push_back(c->scale_free);
    min_target = std::min(min_target, std::abs(c->scale_free));
    max_order = std::max(max_order, c->epsilon_order);
  }
  rep.target_coeff = rep.target_coeffs.front();
  for (const auto& c : coeffs.items) {
    if (std::find(targets.begin(), targets.end(), c.index) != targets.end()) continue;
    const double a = std::abs(c.scale_free);
    if (c.epsilon_order <= max_order + 1e-9) {
      if (a >= rep.max_offtarget) {
        rep.max_offtarget = a;
        rep.worst_offtarget = c.index;
      }
    } else if (a >= rep.max_remainder) {
      rep.max_remainder = a;
      rep.worst_remainder = c.index;
    }
  }
  rep.ok = min_target > tol && rep.max_offtarget < tol * min_target;
  return rep;
}

ExcitationReport verify_excitation(const std::vector<DitherSpec>& dithers,
                                   const BracketIndex& target, double tol, int steps) {
  return verify_excitation(dithers, std::vector<BracketIndex>{target}, tol, steps);
}

double endpoint_prediction(const ESSystem& system, const BracketCoefficients& coeffs, double x0,
                           int order) {
  require(order >= 1 && order <= coeffs.depth, ErrorKind::invalid_parameter,
          "prediction order exceeds the signature depth");
  const auto shapes = system.shapes();
  double x = x0;
  for (const auto& c : coeffs.items) {
    if (c.index.length() > order || c.value == 0.0) continue;
    x += c.value * iterated_bracket(system.cost, shapes, c.index, x0);
  }
  return x;
}

double endpoint_prediction(const ESSystem& system, double x0, int order) {
  require(order >= 1 && order <= 4, ErrorKind::invalid_parameter, "prediction order must be in 1..4");
  system.validate();
  const auto coeffs = log_signature(compute_signature(system.dithers(), order));
  return endpoint_prediction(system, coeffs, x0, order);
}

}  // namespace liees
