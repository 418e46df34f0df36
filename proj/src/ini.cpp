#include "calibra/ini.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace calibra {

namespace {

std::string trimmed(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

const std::string* IniDoc::find(const std::string& section,
                                const std::string& key) const {
    for (const IniEntry& e : entries)
        if (e.section == section && e.key == key) return &e.value;
    return nullptr;
}

std::string IniDoc::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
    const std::string* v = find(section, key);
    return v ? *v : fallback;
}

double IniDoc::get_num(const std::string& section, const std::string& key,
                       double fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    return parse_number(*v, "[" + section + "] " + key);
}

bool IniDoc::get_flag(const std::string& section, const std::string& key,
                      bool fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw Error("[" + section + "] " + key + ": not a boolean: " + *v);
}

bool IniDoc::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

void IniDoc::set(const std::string& section, const std::string& key,
                 const std::string& value) {
    for (IniEntry& e : entries)
        if (e.section == section && e.key == key) {
            e.value = value;
            return;
        }
    entries.push_back({section, key, value});
}

bool operator==(const IniEntry& a, const IniEntry& b) {
    return a.section == b.section && a.key == b.key && a.value == b.value;
}

bool operator==(const IniDoc& a, const IniDoc& b) {
    return a.entries == b.entries;
}

IniDoc parse_ini(const std::string& text) {
    IniDoc doc;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trimmed(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3)
                throw Error("ini line " + std::to_string(lineno) +
                            ": malformed section header: " + t);
            section = trimmed(t.substr(1, t.size() - 2));
            if (section.empty())
                throw Error("ini line " + std::to_string(lineno) +
                            ": empty section name");
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw Error("ini line " + std::to_string(lineno) +
                        ": expected key = value, got: " + t);
        std::string key = trimmed(t.substr(0, eq));
        if (key.empty())
            throw Error("ini line " + std::to_string(lineno) + ": empty key");
        doc.entries.push_back({section, key, trimmed(t.substr(eq + 1))});
    }
    return doc;
}

std::string serialize_ini(const IniDoc& doc) {
    std::string out;
    std::string section;
    bool first = true;
    for (const IniEntry& e : doc.entries) {
        if (e.section != section || (first && !e.section.empty())) {
            if (e.section.empty())
                throw Error(
                    "entry without a section after '" + section +
                    "': not representable, sectionless keys must come first");
            if (!first) out += '\n';
            out += '[' + e.section + "]\n";
            section = e.section;
        }
        out += e.key + " = " + e.value + '\n';
        first = false;
    }
    return out;
}

double parse_number(const std::string& text, const std::string& context) {
    const std::string t = trimmed(text);
    if (t.empty()) throw Error(context + ": empty number");
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw Error(context + ": not a number: " + t);
    return v;
}

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& context) {
    std::vector<double> out;
    size_t pos = 0;
    while (true) {
        size_t comma = text.find(',', pos);
        std::string piece = text.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        out.push_back(parse_number(piece, context));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string number_to_string(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

}  // namespace calibra
