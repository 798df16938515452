#include "gwpath/walk.hpp"

#include <algorithm>
#include <ostream>

#include "gwpath/errors.hpp"

namespace gwpath {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw PathOverflow("partial sum exceeds 64 bits");
  return r;
}

Path::Path(std::vector<std::int64_t> values) : values_(std::move(values)) {
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i] - values_[i - 1] < -1) throw InvalidPath("step below -1 at index " + std::to_string(i - 1));
  }
}

Path Path::from_steps(std::span<const std::int64_t> steps) {
  std::vector<std::int64_t> v;
  v.reserve(steps.size() + 1);
  v.push_back(0);
  for (auto s : steps) v.push_back(checked_add(v.back(), s));
  return Path(std::move(v));
}

std::vector<std::int64_t> Path::steps() const {
  std::vector<std::int64_t> s;
  if (values_.size() > 1) s.reserve(values_.size() - 1);
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) s.push_back(step(i));
  return s;
}

std::int64_t IncrementalHeight::push(std::int64_t x) {
  if (have_prev_) {
    stack_.push_back(prev_);
    while (!stack_.empty() && stack_.back() > x) stack_.pop_back();
  }
  prev_ = x;
  have_prev_ = true;
  return static_cast<std::int64_t>(stack_.size());
}

Path lukasiewicz_from_degrees(std::span<const std::int64_t> degrees) {
  if (degrees.empty()) return Path();
  std::vector<std::int64_t> steps;
  steps.reserve(degrees.size());
  for (auto d : degrees) {
    if (d < 0) throw InvalidPath("negative degree");
    steps.push_back(d - 1);
  }
  return Path::from_steps(steps);
}

HeightSeq height_process(std::span<const std::int64_t> values) {
  HeightSeq h;
  if (values.size() < 2) return h;
  h.resize(values.size() - 1);
  IncrementalHeight inc;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) h[i] = inc.push(values[i]);
  return h;
}

HeightSeq height_process_bruteforce(std::span<const std::int64_t> values) {
  HeightSeq h;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    std::int64_t count = 0;
    for (std::size_t j = 0; j < i; ++j) {
      auto lo = *std::min_element(values.begin() + j, values.begin() + i + 1);
      if (values[j] == lo) ++count;
    }
    h.push_back(count);
  }
  return h;
}

Path future_infimum_transform(const Path& path) {
  const auto& x = path.values();
  std::vector<std::int64_t> out(x.size());
  std::int64_t running = 0;
  for (std::size_t k = x.size(); k-- > 0;) {
    running = (k + 1 == x.size()) ? x[k] : std::min(running, x[k]);
    out[k] = x[k] - running;
  }
  return Path(std::move(out));
}

void write_path_csv(std::ostream& out, const Path& path, const HeightSeq& heights) {
  out << "index,S,H\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << i << ',' << path[i] << ',';
    if (i < heights.size()) out << heights[i];
    out << '\n';
  }
}

}  // namespace gwpath
