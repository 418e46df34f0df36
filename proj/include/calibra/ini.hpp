#pragma once

// Flat key-value config with [section] headers.  Entries keep file order, so
// parse -> serialize -> parse reproduces the document exactly (comments are
// the one thing dropped).  Duplicate keys are legal; lookups take the first.

#include <string>
#include <vector>

#include "calibra/common.hpp"

namespace calibra {

struct IniEntry {
    std::string section;  // "" before the first header
    std::string key;
    std::string value;
};

struct IniDoc {
    std::vector<IniEntry> entries;

    const std::string* find(const std::string& section,
                            const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = "") const;
    double get_num(const std::string& section, const std::string& key,
                   double fallback) const;
    bool get_flag(const std::string& section, const std::string& key,
                  bool fallback) const;
    bool has(const std::string& section, const std::string& key) const;
    void set(const std::string& section, const std::string& key,
             const std::string& value);
};

bool operator==(const IniEntry& a, const IniEntry& b);
bool operator==(const IniDoc& a, const IniDoc& b);

IniDoc parse_ini(const std::string& text);
std::string serialize_ini(const IniDoc& doc);

// Number parsing that rejects trailing garbage, with the context in the
// error message.  parse_number_list splits on commas: "1, 2.5, -3".
double parse_number(const std::string& text, const std::string& context);
std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& context);

// Shortest decimal that scans back to the same double.
std::string number_to_string(double v);

}  // namespace calibra
