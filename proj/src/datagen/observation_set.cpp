#include "dfpv/datagen/observation_set.hpp"

#include <cmath>
#include <string>

#include "dfpv/errors.hpp"

namespace dfpv::datagen {

Split Split::subset(std::span<const std::size_t> rows) const {
  Split out;
  out.a = numkit::take_rows(a, rows);
  out.z = numkit::take_rows(z, rows);
  if (has_w()) out.w = numkit::take_rows(w, rows);
  if (has_y()) {
    out.y.reserve(rows.size());
    for (std::size_t r : rows) out.y.push_back(y.at(r));
  }
  return out;
}

namespace {

void check_split(const Split& s, const char* name, bool need_w, bool need_y) {
  const std::string n(name);
  if (s.size() == 0) throw InvalidArgument(n + ": no records");
  if (s.a.cols() == 0 || s.z.cols() == 0) throw InvalidArgument(n + ": a and z need at least one column");
  if (s.z.rows() != s.size()) throw InvalidArgument(n + ": z row count differs from a");
  if (s.w.rows() != 0 && s.w.rows() != s.size()) throw InvalidArgument(n + ": w row count differs from a");
  if (!s.y.empty() && s.y.size() != s.size()) throw InvalidArgument(n + ": y length differs from a");
  if (need_w && !s.has_w()) throw InvalidArgument(n + ": outcome proxy w is required");
  if (need_y && !s.has_y()) throw InvalidArgument(n + ": outcome y is required");
  if (!s.a.all_finite() || !s.z.all_finite() || !s.w.all_finite())
    throw InvalidArgument(n + ": nonfinite entries");
  for (double v : s.y)
    if (!std::isfinite(v)) throw InvalidArgument(n + ": nonfinite outcome");
}

}  // namespace

void ObservationSet::validate() const {
  check_split(stage1, "stage1", true, false);
  check_split(stage2, "stage2", false, true);
  if (stage1.a.cols() != stage2.a.cols() || stage1.z.cols() != stage2.z.cols())
    throw InvalidArgument("stage1/stage2 treatment or proxy dimensions differ");
  if (stage2.has_w() && stage2.w.cols() != stage1.w.cols())
    throw InvalidArgument("stage1/stage2 outcome-proxy dimensions differ");
  if (extra_w) {
    if (extra_w->rows() == 0) throw InvalidArgument("extra_w: no samples");
    if (extra_w->cols() != stage1.w.cols()) throw InvalidArgument("extra_w: dimension differs from stage1 w");
  }
  if (ope) {
    check_split(*ope, "ope", true, false);
    if (ope->a.cols() != stage1.a.cols() || ope->z.cols() != stage1.z.cols() ||
        ope->w.cols() != stage1.w.cols())
      throw InvalidArgument("ope: dimensions differ from stage1");
  }
}

}  // namespace dfpv::datagen
