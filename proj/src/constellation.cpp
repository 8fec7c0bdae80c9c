#include "pcs/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pcs {

namespace {

std::uint32_t gray(std::uint32_t i) { return i ^ (i >> 1); }

int log2_exact(int v) {
  int b = 0;
  while ((1 << b) < v) ++b;
  return b;
}

}  // namespace

std::vector<double> checked_pmf(std::vector<double> pmf, std::size_t m) {
  if (pmf.size() != m)
    throw std::invalid_argument("pmf length " + std::to_string(pmf.size()) +
                                " does not match alphabet size " + std::to_string(m));
  double sum = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("pmf entries must be finite and nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("pmf does not sum to one (sum = " + std::to_string(sum) + ")");
  for (double& p : pmf) p /= sum;
  return pmf;
}

double entropy_bits(std::span<const double> pmf) {
  double h = 0.0;
  for (double p : pmf)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

Constellation Constellation::qam(int order) {
  if (order != 4 && order != 16 && order != 64)
    throw std::invalid_argument("unsupported QAM order " + std::to_string(order) +
                                " (supported: 4, 16, 64)");
  Constellation c;
  c.bits_ = log2_exact(order);
  c.levels_ = 1 << (c.bits_ / 2);
  const int half = c.bits_ / 2;
  const int L = c.levels_;
  c.template_.reserve(order);
  c.labels_.reserve(order);
  for (int i = 0; i < L; ++i) {
    for (int q = 0; q < L; ++q) {
      c.template_.emplace_back(2 * i - (L - 1), 2 * q - (L - 1));
      c.labels_.push_back((gray(i) << half) | gray(q));
    }
  }
  c.label_to_index_.assign(order, 0);
  for (std::size_t i = 0; i < c.labels_.size(); ++i) c.label_to_index_[c.labels_[i]] = i;
  c.pmf_.assign(order, 1.0 / order);
  // Uniform template energy is 2(M-1)/3.
  c.scaling_ = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
  c.rebuild_points();
  return c;
}

Constellation Constellation::with_labels(std::vector<std::uint32_t> labels) const {
  if (labels.size() != template_.size())
    throw std::invalid_argument("label count does not match constellation order");
  std::vector<std::size_t> inv(labels.size(), labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= labels.size() || inv[labels[i]] != labels.size())
      throw std::invalid_argument("labels must be a permutation of 0..M-1");
    inv[labels[i]] = i;
  }
  Constellation c = *this;
  c.labels_ = std::move(labels);
  c.label_to_index_ = std::move(inv);
  return c;
}

Constellation Constellation::with_pmf(std::vector<double> pmf) const {
  Constellation c = *this;
  c.pmf_ = checked_pmf(std::move(pmf), template_.size());
  return c;
}

Constellation Constellation::with_scaling(double scaling) const {
  if (!(scaling > 0.0) || !std::isfinite(scaling))
    throw std::invalid_argument("constellation scaling must be positive");
  Constellation c = *this;
  c.scaling_ = scaling;
  c.rebuild_points();
  return c;
}

Constellation Constellation::with_power(double power) const {
  if (!(power > 0.0)) throw std::invalid_argument("target power must be positive");
  double e = 0.0;
  for (std::size_t i = 0; i < template_.size(); ++i) e += pmf_[i] * std::norm(template_[i]);
  return with_scaling(std::sqrt(power / e));
}

void Constellation::rebuild_points() {
  points_.resize(template_.size());
  for (std::size_t i = 0; i < template_.size(); ++i) points_[i] = scaling_ * template_[i];
}

double Constellation::average_power() const {
  double e = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) e += pmf_[i] * std::norm(points_[i]);
  return e;
}

double Constellation::min_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      best = std::min(best, std::abs(points_[i] - points_[j]));
  return best;
}

BitLevelMarginals Constellation::bit_marginals() const {
  BitLevelMarginals m;
  m.p_one.assign(bits_, 0.0);
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (int b = 0; b < bits_; ++b)
      if (bit(i, b)) m.p_one[b] += pmf_[i];
  return m;
}

double Constellation::entropy() const { return entropy_bits(pmf_); }

void Constellation::write_table(std::ostream& os) const {
  os << "# order " << order() << " scaling " << std::setprecision(17) << scaling_ << "\n";
  os << "# index label re im pmf\n";
  for (std::size_t i = 0; i < points_.size(); ++i) {
    os << i << ' ';
    for (int b = 0; b < bits_; ++b) os << bit(i, b);
    os << ' ' << std::setprecision(17) << points_[i].real() << ' ' << points_[i].imag() << ' '
       << pmf_[i] << '\n';
  }
}

Constellation Constellation::read_table(std::istream& is) {
  std::string line;
  int order = 0;
  double scaling = 0.0;
  std::vector<std::uint32_t> labels;
  std::vector<double> pmf;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "order") {
        std::string skey;
        ls >> order >> skey >> scaling;
      }
      continue;
    }
    std::size_t idx;
    std::string bits;
    double re, im, p;
    if (!(ls >> idx >> bits >> re >> im >> p))
      throw std::runtime_error("malformed constellation table line: " + line);
    std::uint32_t label = 0;
    for (char ch : bits) label = (label << 1) | static_cast<std::uint32_t>(ch == '1');
    labels.push_back(label);
    pmf.push_back(p);
  }
  Constellation c = qam(order);
  if (labels.size() != static_cast<std::size_t>(order))
    throw std::runtime_error("constellation table has wrong number of rows");
  return c.with_labels(std::move(labels)).with_pmf(std::move(pmf)).with_scaling(scaling);
}

}  // namespace pcs
