#include "tap/trace.hpp"

#include <json.hpp>

namespace tap {

using nlohmann::json;

namespace {

template <class E, std::size_t N>
E enum_from(const std::string& s, const E (&all)[N]) {
  for (E e : all)
    if (s == to_string(e)) return e;
  throw ParseError(0, 0, "unknown trace value '" + s + "'");
}

constexpr CoverMode kModes[] = {CoverMode::accumulate, CoverMode::listing};
constexpr StepKind kKinds[] = {StepKind::independence, StepKind::extra_credit, StepKind::primal_dual,
                               StepKind::root_final};
constexpr StepCase kCases[] = {StepCase::independence, StepCase::pattern,      StepCase::merged_paths,
                               StepCase::small_tree,   StepCase::many_matched, StepCase::enlarged,
                               StepCase::constant_size, StepCase::basic,       StepCase::root,
                               StepCase::gap};
constexpr CreditSource kSources[] = {CreditSource::leaf, CreditSource::banked, CreditSource::deferred};

}  // namespace

std::string trace_to_json(const CoverResult& result, int indent) {
  const CoverTrace& t = result.trace;
  json j;
  j["mode"] = to_string(t.mode);
  j["solution"] = result.solution.links;
  j["iterations"] = t.iterations;
  j["restarts"] = t.restarts;
  j["initial_cover3"] = t.initial_cover3;
  j["initial_matched"] = t.initial_matched;
  j["initial_unmatched"] = t.initial_unmatched;
  j["stem_matchings"] = t.stem_matchings;
  j["weight_increases"] = t.weight_increases;
  j["unusable_matchings"] = t.unusable_matchings;
  j["steps"] = json::array();
  for (const CoverStep& s : t.steps) {
    json links = json::array();
    for (const LinkUse& u : s.links) links.push_back({u.origin, u.u, u.v});
    json consumed = json::array();
    for (const Consumption& c : s.consumed) consumed.push_back({c.unit, c.counted3});
    j["steps"].push_back({{"index", s.index},
                          {"round", s.round},
                          {"root", s.root},
                          {"kind", to_string(s.kind)},
                          {"rule", to_string(s.rule)},
                          {"links", links},
                          {"credit3", s.credit3},
                          {"cost3", s.cost3},
                          {"banked3", s.banked3},
                          {"leaves", s.leaves},
                          {"matched", s.matched},
                          {"unmatched", s.unmatched},
                          {"covers", s.covers},
                          {"discarded", s.discarded},
                          {"consumed", consumed}});
  }
  j["units"] = json::array();
  for (const CreditUnit& u : t.units) {
    j["units"].push_back({{"id", u.id},
                          {"node", u.node},
                          {"amount3", u.amount3},
                          {"source", to_string(u.source)},
                          {"created_by", u.created_by},
                          {"spent_by", u.spent_by}});
  }
  j["falsifications"] = json::array();
  for (const Falsification& f : t.falsifications)
    j["falsifications"].push_back({{"kind", f.kind}, {"step", f.step}, {"detail", f.detail}});
  return j.dump(indent);
}

CoverTrace parse_trace(std::string_view text) {
  CoverTrace t;
  try {
    json j = json::parse(text);
    t.mode = enum_from(j.at("mode").get<std::string>(), kModes);
    t.iterations = j.value("iterations", 0);
    t.restarts = j.value("restarts", 0);
    t.initial_cover3 = j.value("initial_cover3", 0LL);
    t.initial_matched = j.value("initial_matched", 0);
    t.initial_unmatched = j.value("initial_unmatched", 0);
    t.stem_matchings = j.value("stem_matchings", 0);
    t.weight_increases = j.value("weight_increases", 0);
    t.unusable_matchings = j.value("unusable_matchings", 0);
    for (const json& s : j.at("steps")) {
      CoverStep c;
      c.index = s.at("index");
      c.round = s.value("round", 0);
      c.root = s.at("root");
      c.kind = enum_from(s.at("kind").get<std::string>(), kKinds);
      c.rule = enum_from(s.at("rule").get<std::string>(), kCases);
      for (const json& l : s.at("links")) c.links.push_back(LinkUse{l.at(0), l.at(1), l.at(2)});
      c.credit3 = s.at("credit3");
      c.cost3 = s.at("cost3");
      c.banked3 = s.value("banked3", 0);
      c.leaves = s.value("leaves", 0);
      c.matched = s.value("matched", 0);
      c.unmatched = s.value("unmatched", 0);
      c.covers = s.value("covers", true);
      c.discarded = s.value("discarded", false);
      for (const json& k : s.at("consumed")) c.consumed.push_back(Consumption{k.at(0), k.at(1)});
      t.steps.push_back(std::move(c));
    }
    for (const json& u : j.at("units")) {
      CreditUnit c;
      c.id = u.at("id");
      c.node = u.at("node");
      c.amount3 = u.value("amount3", 3);
      c.source = enum_from(u.at("source").get<std::string>(), kSources);
      c.created_by = u.value("created_by", -1);
      c.spent_by = u.value("spent_by", -1);
      t.units.push_back(c);
    }
    if (j.contains("falsifications")) {
      for (const json& f : j.at("falsifications"))
        t.falsifications.push_back(Falsification{f.at("kind"), f.value("step", -1), f.value("detail", "")});
    }
  } catch (const json::exception& e) {
    throw ParseError(0, 0, std::string("bad trace: ") + e.what());
  }
  return t;
}

}  // namespace tap
