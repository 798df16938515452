#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace gwpath {

using HeightSeq = std::vector<std::int64_t>;

// Integer walk with steps >= -1, stored by its values.
class Path {
 public:
  Path() = default;
  // Throws InvalidPath if some step is below -1.
  explicit Path(std::vector<std::int64_t> values);

  static Path from_steps(std::span<const std::int64_t> steps);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::int64_t operator[](std::size_t i) const { return values_[i]; }
  std::int64_t step(std::size_t i) const { return values_[i + 1] - values_[i]; }
  const std::vector<std::int64_t>& values() const noexcept { return values_; }
  std::vector<std::int64_t> steps() const;

 private:
  std::vector<std::int64_t> values_;
};

// Online height computation: feed x(0), x(1), ... and get h(i) back.
class IncrementalHeight {
 public:
  std::int64_t push(std::int64_t x);
  void reset() { stack_.clear(); have_prev_ = false; }
  std::int64_t current() const noexcept { return static_cast<std::int64_t>(stack_.size()); }

 private:
  std::vector<std::int64_t> stack_;
  std::int64_t prev_ = 0;
  bool have_prev_ = false;
};

Path lukasiewicz_from_degrees(std::span<const std::int64_t> degrees);

// h(i) = #{j < i : x(j) = min_{j<=k<=i} x(k)} for i < size - 1.
HeightSeq height_process(std::span<const std::int64_t> values);
inline HeightSeq height_process(const Path& path) { return height_process(path.values()); }

// Quadratic evaluation of the defining formula; kept for cross-checks.
HeightSeq height_process_bruteforce(std::span<const std::int64_t> values);

// X - X̲̲ with X̲̲(k) = min{X(m) : k <= m < size}.
Path future_infimum_transform(const Path& path);

std::int64_t checked_add(std::int64_t a, std::int64_t b);

void write_path_csv(std::ostream& out, const Path& path, const HeightSeq& heights);

}  // namespace gwpath
