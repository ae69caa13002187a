// Cell agent state: position, size, phenotype and intracellular metabolite pools.
#pragma once

#include <cstdint>
#include <string>

#include "spheroid/error.hpp"
#include "spheroid/metabolism.hpp"
#include "spheroid/vec3.hpp"

namespace spheroid {

// Phenotype classes. Apoptotic cells stop cycling and are removed at the
// phenotype update following the one that marked them.
enum class Phenotype : std::uint8_t {
    Apoptotic = 0,
    Quiescent = 1,
    Proliferating = 2,
};

inline const char* to_string(Phenotype p) {
    switch (p) {
        case Phenotype::Apoptotic: return "apoptotic";
        case Phenotype::Quiescent: return "quiescent";
        case Phenotype::Proliferating: return "proliferating";
    }
    return "unknown";
}

inline Phenotype phenotype_from_string(const std::string& s) {
    if (s == "apoptotic") return Phenotype::Apoptotic;
    if (s == "quiescent") return Phenotype::Quiescent;
    if (s == "proliferating") return Phenotype::Proliferating;
    throw InputError("unknown phenotype label: " + s);
}

struct Cell {
    std::uint64_t id = 0;
    Vec3 position{};
    double radius = 6.0;          // um
    Phenotype phenotype = Phenotype::Quiescent;
    MetabolicState metabolic{};
};

}  // namespace spheroid
