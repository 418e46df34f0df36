#include "calibra/fixtures.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace calibra {

namespace {

AnalyticCurve curve_from(const IniDoc& doc) {
    const std::string kind = doc.get("curve", "kind");
    AnalyticCurve c;
    if (kind == "line") {
        c = make_line({doc.get_num("curve", "x0", 0.0),
                       doc.get_num("curve", "y0", 0.0)},
                      doc.get_num("curve", "angle", 0.0),
                      doc.get_num("curve", "len", 2.0));
    } else if (kind == "circle") {
        c = make_circle_arc(doc.get_num("curve", "radius", 1.0),
                            doc.get_num("curve", "phi0", 0.0),
                            doc.get_num("curve", "arc_len", 1.0),
                            doc.get_flag("curve", "clockwise", false));
    } else if (kind == "sine") {
        c = make_sine(doc.get_num("curve", "amplitude", 0.1),
                      doc.get_num("curve", "wavenumber", 1.0),
                      doc.get_num("curve", "x_span", 2.0));
    } else if (kind == "ellipse") {
        c = make_ellipse_arc(doc.get_num("curve", "ax", 1.0),
                             doc.get_num("curve", "ay", 1.0),
                             doc.get_num("curve", "t0", 0.0),
                             doc.get_num("curve", "t1", 1.0));
    } else if (kind.empty()) {
        throw Error("missing [curve] kind");
    } else {
        throw Error("unknown curve kind: " + kind);
    }
    if (doc.get_flag("curve", "recenter", true)) c = recentered(c);
    return c;
}

AnalyticFn fn_from(const IniDoc& doc, const std::string& section,
                   const std::string& key) {
    const std::string* v = doc.find(section, key);
    if (!v) return AnalyticFn();
    return AnalyticFn::poly(parse_number_list(*v, "[" + section + "] " + key));
}

}  // namespace

Fixture fixture_from_ini(const IniDoc& doc, const std::string& origin) {
    try {
        Fixture f;
        f.name = doc.get("fixture", "name", origin);
        f.chart = build_chart(curve_from(doc),
                              doc.get_num("chart", "halfwidth", 0.0));
        if (doc.has("traces", "lower") != doc.has("traces", "upper"))
            throw Error("[traces] needs both lower and upper");
        if (doc.has("traces", "lower")) {
            f.candidate = make_candidate(f.chart, fn_from(doc, "traces", "lower"),
                                         fn_from(doc, "traces", "upper"),
                                         fn_from(doc, "normals", "lower"),
                                         fn_from(doc, "normals", "upper"));
            f.has_candidate = true;
        }
        return f;
    } catch (const FixtureError&) {
        throw;
    } catch (const Error& e) {
        throw FixtureError("fixture " + origin + ": " + e.what());
    }
}

Fixture load_fixture(const std::string& ref) {
    std::vector<std::string> tried;
    std::string path;
    for (std::string cand : {ref, ref + ".ini", "fixtures/" + ref + ".ini"}) {
        if (std::ifstream(cand).good()) {
            path = cand;
            break;
        }
        tried.push_back(cand);
    }
    if (path.empty()) {
        if (const char* dir = std::getenv("CALIBRA_FIXTURES")) {
            std::string cand = std::string(dir) + "/" + ref + ".ini";
            if (std::ifstream(cand).good())
                path = cand;
            else
                tried.push_back(cand);
        }
    }
    if (path.empty()) {
        std::string msg = "fixture not found: " + ref + " (tried";
        for (const std::string& t : tried) msg += " " + t;
        throw FixtureError(msg + ")");
    }
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    IniDoc doc;
    try {
        doc = parse_ini(buf.str());
    } catch (const Error& e) {
        throw FixtureError("fixture " + path + ": " + e.what());
    }
    return fixture_from_ini(doc, path);
}

}  // namespace calibra
