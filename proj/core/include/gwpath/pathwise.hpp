#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gwpath/offspring.hpp"
#include "gwpath/rng.hpp"
#include "gwpath/walk.hpp"

namespace gwpath {

struct SpinePair {
  std::int64_t b = 0;
  std::int64_t n_children = 1;
};

// Joint construction of (S, S - future infimum, H) for a supercritical law.
// s has horizon + 2 entries; h, s_minus_ffinf, f have horizon + 1.
struct PathwiseBundle {
  std::int64_t g = 0;
  std::vector<SpinePair> pairs;
  Path s;
  std::vector<std::int64_t> s_minus_ffinf;
  HeightSeq h;
  std::vector<std::int64_t> f;
  // q(l), d(l) for l = 0 .. pairs.size().
  std::vector<std::int64_t> q;
  std::vector<std::int64_t> d;
};

std::int64_t sample_geometric_tree_count(TiltRoot root, Stream& rng);
SpinePair sample_spine_pair(const OffspringLaw& law, TiltRoot root, Stream& rng);

class PathwiseSampler {
 public:
  explicit PathwiseSampler(LawPtr law, std::int64_t max_tilted_length = std::int64_t{1} << 28);

  PathwiseBundle build(std::int64_t horizon, Stream rng) const;

  TiltRoot root() const noexcept { return root_; }
  const OffspringLaw& law() const noexcept { return *law_; }
  const TabulatedLaw& tilted() const noexcept { return *tilted_; }

 private:
  LawPtr law_;
  TiltRoot root_;
  std::shared_ptr<const TabulatedLaw> tilted_;
  std::int64_t max_tilted_length_;
};

PathwiseBundle build_pathwise(LawPtr law, std::int64_t horizon, std::uint64_t seed);

struct DirectSample {
  Path s;
  HeightSeq h;
};

// i.i.d. steps D - 1; s has horizon + 2 entries and h has horizon + 1.
DirectSample sample_direct(const OffspringLaw& law, std::int64_t horizon, Stream& rng);

void write_bundle_csv(std::ostream& out, const PathwiseBundle& bundle);

}  // namespace gwpath
