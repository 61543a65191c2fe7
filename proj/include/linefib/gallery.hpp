#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "linefib/errors.hpp"
#include "linefib/field.hpp"

namespace linefib {

/// Built-in example field. `theta` is the closed-form angle profile for the
/// horizontal normal-form family, where one exists.
struct GalleryEntry {
    std::string name;
    std::array<std::string, 3> components;
    bool normalize;
    std::optional<std::string> theta;
    std::string description;
};

inline const std::vector<GalleryEntry>& example_gallery() {
    static const std::vector<GalleryEntry> entries = {
        {"constant",
         {"1", "0", "0"},
         false,
         std::nullopt,
         "uniform field; fibration by parallel lines, plane field is a foliation"},
        {"theta-linear",
         {"cos(z)", "-sin(z)", "0"},
         false,
         std::string("z"),
         "horizontal normal-form field with unit twist rate"},
        {"theta-cubic",
         {"cos(z+z^3/3)", "-sin(z+z^3/3)", "0"},
         false,
         std::string("z+z^3/3"),
         "horizontal normal-form field with growing twist rate"},
        {"theta-sine",
         {"cos(sin(z))", "-sin(sin(z))", "0"},
         false,
         std::string("sin(z)"),
         "horizontal field whose twist rate cos(z) vanishes at |z| = pi/2"},
        {"skew-hopf",
         {"z*x-y", "x+z*y", "1+z^2"},
         true,
         std::nullopt,
         "skew nondegenerate line fibration; dV has rank 2 everywhere"},
        {"helix-not-straight",
         {"-y", "x", "1"},
         true,
         std::nullopt,
         "unit field with helical integral curves; not a line fibration"},
    };
    return entries;
}

inline const GalleryEntry& find_example(const std::string& name) {
    for (const auto& e : example_gallery())
        if (e.name == name) return e;
    throw Error("unknown example '" + name + "'");
}

inline VectorFieldSpec make_field(const GalleryEntry& entry) {
    return parse_field(entry.components[0], entry.components[1], entry.components[2],
                       entry.normalize);
}

}  // namespace linefib
