#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "tips/geom.hpp"
#include "tips/report.hpp"
#include "tips/serialize.hpp"

namespace tips {

using nlohmann::json;

void to_json(json& j, const SceneState& s) {
  json tips = json::object();
  for (const auto& [id, tip] : s.toolTips) {
    tips[id] = {{"tip", tip.tip}, {"activated", tip.activated}};
  }
  json dropped = json::array();
  for (const auto& d : s.droppedClips) {
    dropped.push_back({{"vesselId", d.vesselId}, {"position", d.position}});
  }
  json edges = json::array();
  for (const auto& e : s.attachments) edges.push_back({e.childId, e.parentId});
  j = {{"t", s.t},
       {"toolTips", tips},
       {"clipMap", s.clipMap},
       {"droppedClips", dropped},
       {"attachments", edges}};
}

namespace {

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Bounds {
  double minX = std::numeric_limits<double>::infinity();
  double minY = std::numeric_limits<double>::infinity();
  double maxX = -std::numeric_limits<double>::infinity();
  double maxY = -std::numeric_limits<double>::infinity();

  void add(const Vec3& p, double pad = 0.0) {
    minX = std::min(minX, p.x - pad);
    minY = std::min(minY, p.y - pad);
    maxX = std::max(maxX, p.x + pad);
    maxY = std::max(maxY, p.y + pad);
  }
  bool empty() const { return minX > maxX; }
};

class Projector {
 public:
  explicit Projector(const Bounds& b) : b_(b) {
    double w = std::max(b.maxX - b.minX, 1.0);
    double h = std::max(b.maxY - b.minY, 1.0);
    scale_ = kWidth / w;
    height_ = h * scale_;
  }
  double x(const Vec3& p) const { return (p.x - b_.minX) * scale_ + kMargin; }
  double y(const Vec3& p) const { return (b_.maxY - p.y) * scale_ + kMargin; }
  double len(double mm) const { return mm * scale_; }
  double width() const { return kWidth + 2 * kMargin; }
  double height() const { return height_ + 2 * kMargin + kCaption; }
  double caption_y() const { return height_ + 2 * kMargin + kCaption * 0.6; }

 private:
  static constexpr double kWidth = 800.0;
  static constexpr double kMargin = 20.0;
  static constexpr double kCaption = 30.0;
  Bounds b_;
  double scale_ = 1.0;
  double height_ = 0.0;
};

void add_bounds(Bounds& b, const GeometryPrimitive& g) {
  struct Visitor {
    Bounds& b;
    void operator()(const Sphere& s) const { b.add(s.center, s.radius); }
    void operator()(const Capsule& c) const {
      b.add(c.a, c.radius);
      b.add(c.b, c.radius);
    }
    void operator()(const TriangleMesh& m) const {
      for (const auto& v : m.vertices) b.add(v);
    }
  };
  std::visit(Visitor{b}, g);
}

std::string draw(const Projector& pr, const GeometryPrimitive& g, const std::string& stroke) {
  struct Visitor {
    const Projector& pr;
    const std::string& stroke;
    std::string operator()(const Sphere& s) const {
      return "<circle cx=\"" + num(pr.x(s.center)) + "\" cy=\"" + num(pr.y(s.center)) +
             "\" r=\"" + num(pr.len(s.radius)) + "\" fill=\"#f2d7c9\" fill-opacity=\"0.5\" stroke=\"" +
             stroke + "\"/>";
    }
    std::string operator()(const Capsule& c) const {
      std::string line = "x1=\"" + num(pr.x(c.a)) + "\" y1=\"" + num(pr.y(c.a)) + "\" x2=\"" +
                         num(pr.x(c.b)) + "\" y2=\"" + num(pr.y(c.b)) + "\"";
      return "<line " + line + " stroke=\"" + stroke + "\" stroke-opacity=\"0.35\" stroke-width=\"" +
             num(pr.len(2 * c.radius)) + "\" stroke-linecap=\"round\"/><line " + line +
             " stroke=\"" + stroke + "\" stroke-width=\"1\"/>";
    }
    std::string operator()(const TriangleMesh& m) const {
      std::string out;
      for (const auto& t : m.triangles) {
        out += "<polygon points=\"";
        for (std::size_t k = 0; k < 3; ++k) {
          const Vec3& v = m.vertices[t[k]];
          out += (k ? " " : "") + num(pr.x(v)) + "," + num(pr.y(v));
        }
        out += "\" fill=\"#f2d7c9\" fill-opacity=\"0.5\" stroke=\"" + stroke + "\"/>";
      }
      return out;
    }
  };
  return std::visit(Visitor{pr, stroke}, g);
}

std::string marker(const Projector& pr, const Vec3& p, const std::string& cls,
                   const std::string& fill) {
  return "<rect class=\"" + cls + "\" x=\"" + num(pr.x(p) - 3) + "\" y=\"" + num(pr.y(p) - 3) +
         "\" width=\"6\" height=\"6\" fill=\"" + fill + "\"/>";
}

std::string caption(const Violation& v) {
  std::string text = "t=" + std::to_string(v.t) + " ms, type " + std::string(to_roman(v.errorType));
  for (const auto& q : v.measured) {
    char buf[48];
    std::snprintf(buf, sizeof buf, " %g %s", q.value, q.unit.c_str());
    text += buf;
  }
  return text;
}

}  // namespace

std::string render_svg(const Scene& scene, const SceneState& state, const Violation* violation) {
  Bounds bounds;
  for (const auto& [id, simlet] : scene.instances) {
    for (const auto& g : simlet.geometry) add_bounds(bounds, g);
  }
  for (const auto& [id, tip] : state.toolTips) bounds.add(tip.tip, 2.0);
  if (bounds.empty()) bounds.add({}, 10.0);
  Projector pr(bounds);

  std::set<std::string> subjects;
  if (violation) subjects.insert(violation->subjectIds.begin(), violation->subjectIds.end());

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(pr.width()) << "\" height=\""
     << num(pr.height()) << "\" viewBox=\"0 0 " << num(pr.width()) << " " << num(pr.height())
     << "\">\n";
  os << "<title>" << escape_xml(violation ? caption(*violation) : "scene") << "</title>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  os << "<g class=\"simlets\">\n";
  for (const auto& [id, simlet] : scene.instances) {
    bool subject = subjects.count(id) != 0;
    std::string stroke = subject ? "#d40000" : "#555555";
    os << "<g id=\"simlet-" << escape_xml(id) << "\" class=\"simlet" << (subject ? " subject" : "")
       << "\">";
    for (const auto& g : simlet.geometry) os << draw(pr, g, stroke);
    os << "</g>\n";
  }
  os << "</g>\n<g class=\"clips\">\n";
  for (const auto& [vessel, clips] : state.clipMap) {
    const Simlet* s = scene.instances.count(vessel) ? &scene.instances.at(vessel) : nullptr;
    if (!s) continue;
    for (double c : clips) os << marker(pr, geom::vessel_point(*s, c), "clip", "#1f4e9c") << "\n";
  }
  for (const auto& d : state.droppedClips) {
    const Simlet* s = scene.instances.count(d.vesselId) ? &scene.instances.at(d.vesselId) : nullptr;
    if (!s) continue;
    os << marker(pr, geom::vessel_point(*s, d.position), "clip dropped", "#ff8c00") << "\n";
  }
  os << "</g>\n<g class=\"tools\">\n";
  for (const auto& [id, tip] : state.toolTips) {
    os << "<circle class=\"tool-tip\" data-tool=\"" << escape_xml(id) << "\" cx=\""
       << num(pr.x(tip.tip)) << "\" cy=\"" << num(pr.y(tip.tip)) << "\" r=\"4\" fill=\""
       << (tip.activated ? "#ff0000" : "#2a7f2a") << "\"/>\n";
  }
  os << "</g>\n";
  if (violation) {
    os << "<text x=\"20\" y=\"" << num(pr.caption_y())
       << "\" font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(caption(*violation))
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

SnapshotFiles snapshot(const Scene& scene, const SceneState& state, const Violation& v,
                       const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create snapshot directory " + dir.string() + ": " + ec.message());

  SnapshotFiles files{v.snapshotBaseName + ".json", v.snapshotBaseName + ".svg"};
  json doc = {{"violation", v}, {"scene", state}};
  {
    std::ofstream out(dir / files.json, std::ios::binary);
    if (!out) throw Error("cannot write snapshot " + (dir / files.json).string());
    out << doc.dump(2) << "\n";
  }
  {
    std::ofstream out(dir / files.svg, std::ios::binary);
    if (!out) throw Error("cannot write snapshot " + (dir / files.svg).string());
    out << render_svg(scene, state, &v);
  }
  return files;
}

}  // namespace tips
