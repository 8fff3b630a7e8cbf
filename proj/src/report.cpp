#include "dirac/report.hpp"

#include <algorithm>

namespace dirac {

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Unknown:
      return "unknown";
    case Status::Fail:
      return "fail";
    case Status::Invalid:
      return "invalid";
  }
  return "invalid";
}

Status worst(Status a, Status b) { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

Entries point_entries(const expr::ExactPoint& p) {
  Entries out;
  for (const auto& [k, v] : p) out.emplace_back(k, expr::to_string(v));
  return out;
}

Check& Report::add(Check c) {
  checks_.push_back(std::move(c));
  return checks_.back();
}

void Report::append(const Report& other) {
  for (const auto& c : other.checks_) checks_.push_back(c);
  for (const auto& t : other.tables_) tables_.push_back(t);
}

Status Report::status() const {
  Status s = Status::Pass;
  for (const auto& c : checks_) s = worst(s, c.status);
  return s;
}

const Check* Report::find(const std::string& id) const {
  auto it = std::find_if(checks_.begin(), checks_.end(), [&](const Check& c) { return c.id == id; });
  return it == checks_.end() ? nullptr : &*it;
}

Status Report::status_of(const std::string& id) const {
  const Check* c = find(id);
  return c == nullptr ? Status::Invalid : c->status;
}

Check zero_check(std::string id, std::string anchor, const expr::ZeroVerdict& v, const std::string& label) {
  Check c;
  c.id = std::move(id);
  c.anchor = std::move(anchor);
  switch (v.status) {
    case expr::ZeroVerdict::Status::Zero:
      c.status = Status::Pass;
      break;
    case expr::ZeroVerdict::Status::SampledZero:
      c.status = Status::Pass;
      c.exact = false;
      c.note = "vanishes at all sample points (transcendental terms)";
      break;
    case expr::ZeroVerdict::Status::NonZero: {
      c.status = Status::Fail;
      Witness w;
      if (v.witness) w.point = point_entries(*v.witness);
      w.values.emplace_back(label, v.value);
      c.witnesses.push_back(std::move(w));
      break;
    }
    case expr::ZeroVerdict::Status::Unknown:
      c.status = Status::Unknown;
      c.note = v.note;
      break;
  }
  return c;
}

void absorb(Check& c, const expr::ZeroVerdict& v, const Entries& context, const std::string& label) {
  Check one = zero_check(c.id, c.anchor, v, label);
  c.status = worst(c.status, one.status);
  if (!one.exact) c.exact = false;
  if (one.status == Status::Unknown && c.note.empty()) c.note = one.note;
  constexpr std::size_t kMaxWitnesses = 4;
  for (auto& w : one.witnesses) {
    if (c.witnesses.size() >= kMaxWitnesses) break;
    w.values.insert(w.values.begin(), context.begin(), context.end());
    c.witnesses.push_back(std::move(w));
  }
}

}  // namespace dirac
