#include "formalcalc/base_space.hpp"

#include <algorithm>
#include <sstream>

#include "formalcalc/errors.hpp"

namespace formalcalc {

std::shared_ptr<const BaseSpace> BaseSpace::discrete(std::vector<std::string> labels) {
  std::set<std::string> unique(labels.begin(), labels.end());
  if (unique.size() != labels.size()) throw PreconditionError("discrete base point labels must be unique");
  return std::shared_ptr<const BaseSpace>(new BaseSpace(Kind::kDiscrete, std::move(labels)));
}

std::shared_ptr<const BaseSpace> BaseSpace::smooth_line() {
  static const std::shared_ptr<const BaseSpace> line(new BaseSpace(Kind::kSmoothLine, {}));
  return line;
}

std::size_t BaseSpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw ParseError("unknown point label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t Point::index() const {
  if (!is_discrete()) throw PreconditionError("point is not a discrete point");
  return std::get<std::size_t>(value_);
}

const Rational& Point::coordinate() const {
  if (is_discrete()) throw PreconditionError("point is not a line point");
  return std::get<Rational>(value_);
}

std::string Point::to_string(const BaseSpace& base) const {
  if (is_discrete()) return base.labels().at(index());
  return coordinate().get_str();
}

Region Region::whole(const BaseSpace& base) {
  if (!base.is_discrete()) return intervals(IntervalSet::line());
  std::set<std::size_t> all;
  for (std::size_t i = 0; i < base.point_count(); ++i) all.insert(i);
  return points(std::move(all));
}

Region Region::nothing(const BaseSpace& base) {
  if (base.is_discrete()) return points({});
  return intervals(IntervalSet());
}

const std::set<std::size_t>& Region::point_set() const {
  if (!is_discrete()) throw PreconditionError("region is not a discrete point set");
  return std::get<std::set<std::size_t>>(value_);
}

const IntervalSet& Region::interval_set() const {
  if (is_discrete()) throw PreconditionError("region is not an interval union");
  return std::get<IntervalSet>(value_);
}

void Region::require_same_flavor(const Region& other) const {
  if (is_discrete() != other.is_discrete()) throw MismatchError("regions belong to different base kinds");
}

bool Region::empty() const { return is_discrete() ? point_set().empty() : interval_set().empty(); }

bool Region::contains(const Point& p) const {
  if (is_discrete() != p.is_discrete()) throw MismatchError("point and region belong to different base kinds");
  if (is_discrete()) return point_set().count(p.index()) > 0;
  return interval_set().contains(p.coordinate());
}

Region Region::intersect(const Region& other) const {
  require_same_flavor(other);
  if (!is_discrete()) return intervals(interval_set().intersect(other.interval_set()));
  std::set<std::size_t> out;
  std::set_intersection(point_set().begin(), point_set().end(), other.point_set().begin(), other.point_set().end(),
                        std::inserter(out, out.begin()));
  return points(std::move(out));
}

Region Region::unite(const Region& other) const {
  require_same_flavor(other);
  if (!is_discrete()) return intervals(interval_set().unite(other.interval_set()));
  std::set<std::size_t> out = point_set();
  out.insert(other.point_set().begin(), other.point_set().end());
  return points(std::move(out));
}

Region Region::minus(const Region& other) const {
  require_same_flavor(other);
  if (!is_discrete()) return intervals(interval_set().minus(other.interval_set()));
  std::set<std::size_t> out;
  std::set_difference(point_set().begin(), point_set().end(), other.point_set().begin(), other.point_set().end(),
                      std::inserter(out, out.begin()));
  return points(std::move(out));
}

bool Region::subset_of(const Region& other) const {
  require_same_flavor(other);
  if (!is_discrete()) return interval_set().subset_of(other.interval_set());
  return std::includes(other.point_set().begin(), other.point_set().end(), point_set().begin(), point_set().end());
}

bool Region::is_compact() const {
  if (is_discrete()) return true;
  return interval_set().bounded() && interval_set().is_closed();
}

bool Region::compactly_inside(const Region& open) const { return is_compact() && subset_of(open); }

std::string Region::to_string(const BaseSpace& base) const {
  if (!is_discrete()) return interval_set().to_string();
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (auto i : point_set()) {
    if (!first) os << ", ";
    first = false;
    os << base.labels().at(i);
  }
  os << '}';
  return os.str();
}

void require_same_base(const BasePtr& a, const BasePtr& b) {
  if (a != b) throw MismatchError("objects live on different base spaces");
}

}  // namespace formalcalc
