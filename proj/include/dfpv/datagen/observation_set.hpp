#pragma once

#include <optional>

#include "dfpv/numkit/dense_matrix.hpp"

namespace dfpv::datagen {

using numkit::DenseMatrix;
using numkit::Vector;

// One block of records. Row i of a, z, w and entry i of y belong to the same draw.
// Stage-1 consumers read (a, z, w); stage-2 consumers read (a, z, y). Generators fill all
// four so the out-of-sample tuning losses can be computed; w or y may be left empty
// (zero rows) for data that only carries one stage's variables.
struct Split {
  DenseMatrix a;
  DenseMatrix z;
  DenseMatrix w;
  Vector y;

  std::size_t size() const noexcept { return a.rows(); }
  bool has_w() const noexcept { return w.rows() == a.rows() && w.cols() > 0; }
  bool has_y() const noexcept { return y.size() == a.rows(); }
  Split subset(std::span<const std::size_t> rows) const;
};

struct ObservationSet {
  Split stage1;
  Split stage2;
  // Extra outcome-proxy samples S_W for the mean feature; stage-1 w is used when absent.
  std::optional<DenseMatrix> extra_w;
  // Held-out policy-evaluation block; contexts are read from its a or z columns.
  std::optional<Split> ope;

  // Throws InvalidArgument on empty stages, inconsistent dimensions, or nonfinite y.
  void validate() const;
  bool has_full_splits() const noexcept {
    return stage1.has_w() && stage1.has_y() && stage2.has_w() && stage2.has_y();
  }
  const DenseMatrix& outcome_proxy_samples() const noexcept { return extra_w ? *extra_w : stage1.w; }
};

}  // namespace dfpv::datagen
