#pragma once

#include <stdexcept>
#include <string>

namespace c3vg {

// A 3D point projected to z_c <= near plane. Carries the offending control
// point index when raised from a curve projection (-1 for a lone point).
class BehindCameraError : public std::runtime_error {
public:
    explicit BehindCameraError(const std::string& what, int control_point = -1)
        : std::runtime_error(what), control_point_index(control_point) {}
    int control_point_index;
};

// Malformed or inconsistent on-disk input (scene JSON, guidance directory).
class IngestError : public std::runtime_error {
public:
    explicit IngestError(const std::string& what, std::string file = {})
        : std::runtime_error(what), path(std::move(file)) {}
    std::string path;
};

// Inconsistent runtime wiring, e.g. depth maps whose cameras do not form an
// antipodal pair.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fit loop cannot continue (guidance exhausted before total_steps, ...).
class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace c3vg
