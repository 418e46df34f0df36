#pragma once

// Named geometry + candidate setups loaded from small config files, so the
// command line and the tests exercise the exact same inputs.  A fixture is a
// collar chart and optionally a trace pair on it; see fixtures/*.ini for the
// shipped ones.

#include <string>

#include "calibra/curve_geometry.hpp"
#include "calibra/euler_check.hpp"
#include "calibra/ini.hpp"

namespace calibra {

// Anything wrong with a fixture reference: file missing, unknown curve kind,
// traces that cross.  Mapped to its own exit code by the scenario runner.
struct FixtureError : Error {
    explicit FixtureError(const std::string& what) : Error(what) {}
};

struct Fixture {
    std::string name;
    CurveChart chart;
    Candidate candidate;          // meaningful only when has_candidate
    bool has_candidate = false;
};

Fixture fixture_from_ini(const IniDoc& doc, const std::string& origin);

// Accepts a path or a bare name; bare names are tried as <name>.ini under
// ./fixtures and under $CALIBRA_FIXTURES.
Fixture load_fixture(const std::string& ref);

}  // namespace calibra
