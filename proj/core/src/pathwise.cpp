#include "gwpath/pathwise.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gwpath/errors.hpp"

namespace gwpath {

std::int64_t sample_geometric_tree_count(TiltRoot root, Stream& rng) {
  const double g = std::floor(-std::log(rng.uniform()) / root.xi);
  return g > 9.0e18 ? std::numeric_limits<std::int64_t>::max() : static_cast<std::int64_t>(g);
}

SpinePair sample_spine_pair(const OffspringLaw& law, TiltRoot root, Stream& rng) {
  const double xi = root.xi;
  std::int64_t n;
  do {
    n = law.sample(rng);
  } while (n < 1 || !(rng.uniform() < -std::expm1(-xi * static_cast<double>(n))));
  const double w = -std::expm1(-xi * static_cast<double>(n));
  const double b = std::ceil(-std::log1p(-rng.uniform() * w) / xi) - 1.0;
  return {std::clamp(static_cast<std::int64_t>(std::max(b, 0.0)), std::int64_t{0}, n - 1), n};
}

PathwiseSampler::PathwiseSampler(LawPtr law, std::int64_t max_tilted_length)
    : law_(std::move(law)), root_(find_xi(*law_)), tilted_(tilt(*law_, root_)), max_tilted_length_(max_tilted_length) {}

PathwiseBundle PathwiseSampler::build(std::int64_t horizon, Stream rng) const {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  if (horizon + 2 > max_tilted_length_) throw HorizonOverflow("horizon exceeds the tilted-walk cap");
  Stream walk_rng = rng.split("tilted_walk");
  Stream count_rng = rng.split("tree_count");
  Stream pair_rng = rng.split("spine_pairs");

  PathwiseBundle out;
  out.g = sample_geometric_tree_count(root_, count_rng);
  out.q.push_back(out.g);
  out.d.push_back(out.g);

  std::vector<std::int64_t> hat_s{0}, hat_i{0}, hat_h;
  IncrementalHeight hat_height;
  hat_h.push_back(hat_height.push(0));
  auto extend_hat = [&](std::int64_t j) {
    if (j >= max_tilted_length_) throw HorizonOverflow("tilted walk longer than cap");
    while (static_cast<std::int64_t>(hat_s.size()) <= j) {
      const std::int64_t v = checked_add(hat_s.back(), tilted_->sample(walk_rng) - 1);
      hat_s.push_back(v);
      hat_i.push_back(std::min(hat_i.back(), v));
      hat_h.push_back(hat_height.push(v));
    }
  };
  auto extend_pairs = [&](std::int64_t l) {
    while (static_cast<std::int64_t>(out.d.size()) <= l) {
      const SpinePair pr = sample_spine_pair(*law_, root_, pair_rng);
      out.pairs.push_back(pr);
      out.q.push_back(checked_add(out.q.back(), pr.n_children));
      out.d.push_back(checked_add(out.d.back(), pr.b));
    }
  };

  const std::size_t len = static_cast<std::size_t>(horizon) + 2;
  std::vector<std::int64_t> s(len);
  out.s_minus_ffinf.resize(len);
  out.f.resize(len);
  out.h.resize(len - 1);
  std::int64_t l = 0;
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(len); ++k) {
    if (k > 0) {
      for (;; ++l) {
        const std::int64_t idx = k - 1 - l;
        if (idx < 0) break;
        extend_hat(idx);
        extend_pairs(l);
        if (-hat_i[idx] < out.d[l]) break;
      }
    }
    extend_pairs(l);
    const std::int64_t j = k - l;
    extend_hat(j);
    out.f[k] = l;
    s[k] = -out.g + hat_s[j] + out.q[l] - l;
    out.s_minus_ffinf[k] = hat_s[j] + out.d[l];
    if (k + 1 < static_cast<std::int64_t>(len)) out.h[k] = hat_h[j] + l;
  }
  out.s = Path(std::move(s));
  out.s_minus_ffinf.pop_back();
  out.f.pop_back();
  return out;
}

PathwiseBundle build_pathwise(LawPtr law, std::int64_t horizon, std::uint64_t seed) {
  return PathwiseSampler(std::move(law)).build(horizon, make_stream(seed, "pathwise"));
}

DirectSample sample_direct(const OffspringLaw& law, std::int64_t horizon, Stream& rng) {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  std::vector<std::int64_t> v(static_cast<std::size_t>(horizon) + 2);
  v[0] = 0;
  for (std::size_t i = 1; i < v.size(); ++i) v[i] = checked_add(v[i - 1], law.sample(rng) - 1);
  DirectSample out{Path(std::move(v)), {}};
  out.h = height_process(out.s);
  return out;
}

void write_bundle_csv(std::ostream& out, const PathwiseBundle& bundle) {
  out << "k,S,S_minus_ffinf,H,F\n";
  for (std::size_t k = 0; k < bundle.h.size(); ++k) {
    out << k << ',' << bundle.s[k] << ',' << bundle.s_minus_ffinf[k] << ',' << bundle.h[k] << ',' << bundle.f[k]
        << '\n';
  }
}

}  // namespace gwpath
