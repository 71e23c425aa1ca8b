#pragma once

#include <flagalg/instance.hpp>
#include <flagalg/predicates.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace flagalg {

using Json = nlohmann::ordered_json;

// ---- JSON encodings ----------------------------------------------------

inline Json subgroup_json(const ClosedSubgroup& h) {
  Json j;
  j["name"] = h.name();
  j["ambient_rank"] = h.ambient_rank();
  Json basis = Json::array();
  for (std::size_t i = 0; i < h.annihilator().basis().rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < h.annihilator().basis().cols(); ++k)
      row.push_back(h.annihilator().basis().at(i, k).str());
    basis.push_back(row);
  }
  j["annihilator_basis"] = basis;
  return j;
}

inline ClosedSubgroup subgroup_from_json(const Json& j) {
  std::size_t r = j.at("ambient_rank").get<std::size_t>();
  const Json& basis = j.at("annihilator_basis");
  IntMatrix m(basis.size(), r);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t k = 0; k < r; ++k) m.at(i, k) = Int(basis[i][k].get<std::string>());
  return ClosedSubgroup(r, Lattice(r, m), j.value("name", ""));
}

inline Json poset_json(const Poset& p) {
  Json j;
  Json nodes = Json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    Json n;
    n["label"] = p.node(i).label;
    if (p.node(i).subgroup) n["subgroup"] = subgroup_json(*p.node(i).subgroup);
    if (p.node(i).level) n["level"] = *p.node(i).level;
    nodes.push_back(n);
  }
  j["nodes"] = nodes;
  Json rel = Json::array();
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = 0; b < p.size(); ++b)
      if (a != b && p.leq(a, b)) rel.push_back(Json::array({a, b}));
  j["leq"] = rel;
  j["top"] = p.top();
  return j;
}

inline Json ring_json(const Ring& r) {
  Json comps = Json::array();
  for (const auto& c : r.components) {
    Json jc;
    jc["label"] = c.label;
    Json gens = Json::array();
    for (const auto& g : c.gens) {
      Json jg;
      jg["name"] = g.name;
      Json ch = Json::array();
      for (const auto& v : g.character) ch.push_back(v.str());
      jg["character"] = ch;
      gens.push_back(jg);
    }
    jc["generators"] = gens;
    Json inv = Json::array();
    for (const auto& s : c.inverted) inv.push_back(s.str(c.names()));
    jc["inverted"] = inv;
    comps.push_back(jc);
  }
  return Json{{"components", comps}};
}

inline Json ring_diagram_json(const RingDiagram& rd) {
  Json j;
  switch (rd.flavor()) {
    case DiagramFlavor::Splitting: j["flavor"] = "splitting"; break;
    case DiagramFlavor::Coefficient: j["flavor"] = "coefficient"; break;
    case DiagramFlavor::Pair: j["flavor"] = "pair"; break;
  }
  Json values = Json::array();
  for (std::size_t i = 0; i < rd.size(); ++i) {
    Json v;
    v["object"] = rd.index().label(i);
    v["ring"] = ring_json(rd.value(i));
    values.push_back(v);
  }
  j["values"] = values;
  return j;
}

inline Json module_json(const ModuleDiagram& m) {
  Json j;
  Json values = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json v;
    v["object"] = m.over().index().label(i);
    Json comps = Json::array();
    for (std::size_t c = 0; c < m.value(i).comps.size(); ++c) {
      const CompModule& cm = m.value(i).comps[c];
      const RingComponent& rc = m.over().value(i)[c];
      Json jc;
      switch (cm.backend) {
        case CompModule::Backend::Zero: jc["backend"] = "zero"; break;
        case CompModule::Backend::Free: jc["backend"] = "free"; break;
        case CompModule::Backend::Presented: jc["backend"] = "presented"; break;
        case CompModule::Backend::Windowed: jc["backend"] = "windowed"; break;
      }
      if (cm.backend == CompModule::Backend::Free ||
          cm.backend == CompModule::Backend::Presented) {
        jc["generator_degrees"] = cm.gen_degrees;
        Json rels = Json::array();
        for (const auto& rel : cm.relations) {
          Json row = Json::array();
          for (const auto& p : rel) row.push_back(p.str(rc.names()));
          rels.push_back(row);
        }
        jc["relations"] = rels;
      }
      if (cm.backend == CompModule::Backend::Windowed) {
        Json dims = Json::object();
        for (auto& [deg, dim] : cm.win_dims) dims[std::to_string(deg)] = dim;
        jc["dims"] = dims;
      }
      comps.push_back(jc);
    }
    v["components"] = comps;
    values.push_back(v);
  }
  j["values"] = values;
  return j;
}

inline Json predicate_json(const PredicateReport& r) {
  Json j;
  j["predicate"] = r.predicate;
  j["verdict"] = r.pass ? "pass-on-window" : "fail";
  if (!r.pass) j["witness"] = r.witness;
  j["window"] = Json{{"lo", r.window.lo}, {"hi", r.window.hi}, {"den_bound", r.window.den_bound}};
  j["checks"] = r.checks;
  return j;
}

inline Json instance_json(const Instance& inst) {
  Json j;
  j["name"] = inst.name;
  j["rank"] = inst.rank;
  Json uni = Json::array();
  for (const auto& h : inst.universe) uni.push_back(subgroup_json(h));
  j["universe"] = uni;
  j["closure_added"] = inst.closure_added;
  j["sigma_a"] = poset_json(*inst.sigma_a);
  j["sigma_c"] = poset_json(*inst.sigma_c);
  j["sigma_d"] = poset_json(*inst.sigma_d);
  j["coefficient_system"] = ring_diagram_json(inst.rc_f);
  return j;
}

// ---- DOT exports ---------------------------------------------------------

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"') out += "\\\"";
    else out += c;
  }
  return out;
}

// covering relation of an arbitrary reflexive order
template <typename Leq>
inline bool is_cover(std::size_t a, std::size_t b, std::size_t n, Leq&& leq) {
  if (a == b || !leq(a, b)) return false;
  for (std::size_t m = 0; m < n; ++m)
    if (m != a && m != b && leq(a, m) && leq(m, b)) return false;
  return true;
}

}  // namespace detail

inline std::string poset_dot(const Poset& p, const std::string& name) {
  std::ostringstream os;
  os << "digraph \"" << detail::dot_escape(name) << "\" {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    os << "  n" << i << " [label=\"" << detail::dot_escape(p.node(i).label) << "\"];\n";
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = 0; b < p.size(); ++b)
      if (detail::is_cover(a, b, p.size(), [&](std::size_t x, std::size_t y) { return p.leq(x, y); }))
        os << "  n" << a << " -> n" << b << ";\n";
  os << "}\n";
  return os.str();
}

inline std::string flag_poset_dot(const FlagPoset& fp, const std::string& name) {
  std::ostringstream os;
  os << "digraph \"" << detail::dot_escape(name) << "\" {\n  rankdir=BT;\n";
  const Poset& base = fp.base();
  for (std::size_t i = 0; i < fp.size(); ++i) {
    std::string label;
    for (std::size_t k = 0; k < fp.flag(i).terms.size(); ++k) {
      if (k) label += " > ";
      label += base.node(fp.flag(i).terms[k]).label;
    }
    os << "  f" << i << " [label=\"(" << detail::dot_escape(label) << ")\"];\n";
  }
  for (std::size_t a = 0; a < fp.size(); ++a)
    for (std::size_t b = 0; b < fp.size(); ++b)
      if (detail::is_cover(a, b, fp.size(), [&](std::size_t x, std::size_t y) { return fp.leq(x, y); }))
        os << "  f" << a << " -> f" << b << ";\n";
  os << "}\n";
  return os.str();
}

// pair category with horizontal and vertical generators distinguished
inline std::string pair_poset_dot(const PairPoset& qp, const std::string& name) {
  std::ostringstream os;
  os << "digraph \"" << detail::dot_escape(name) << "\" {\n  rankdir=BT;\n";
  const Poset& base = qp.base();
  for (std::size_t i = 0; i < qp.size(); ++i) {
    const PairObj& p = qp.pair(i);
    os << "  p" << i << " [label=\"(" << detail::dot_escape(base.node(p.first).label) << " >= "
       << detail::dot_escape(base.node(p.last).label) << ")\"];\n";
  }
  for (std::size_t a = 0; a < qp.size(); ++a)
    for (std::size_t b = 0; b < qp.size(); ++b) {
      if (!detail::is_cover(a, b, qp.size(), [&](std::size_t x, std::size_t y) { return qp.leq(x, y); }))
        continue;
      const char* style = qp.horizontal(a, b) ? "solid" : (qp.vertical(a, b) ? "dashed" : "dotted");
      os << "  p" << a << " -> p" << b << " [style=" << style << "];\n";
    }
  os << "}\n";
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << content;
}

}  // namespace flagalg
