#pragma once

#include <string>

#include "peelab/errors.hpp"
#include "peelab/exact.hpp"

namespace peelab {

/// The three lattice models. TypeII: triangulations without loops (the
/// default throughout). TypeI: triangulations with loops allowed. Quad:
/// quadrangulations, where boundary size means half the perimeter.
enum class ModelId { TypeII, TypeI, Quad };

inline const char* model_name(ModelId m) {
    switch (m) {
        case ModelId::TypeII: return "type2";
        case ModelId::TypeI: return "type1";
        case ModelId::Quad: return "quad";
    }
    return "?";
}

inline ModelId parse_model(const std::string& s) {
    if (s == "type2" || s == "typeII" || s == "2") return ModelId::TypeII;
    if (s == "type1" || s == "typeI" || s == "1") return ModelId::TypeI;
    if (s == "quad" || s == "q") return ModelId::Quad;
    throw DomainError("unknown model '" + s + "' (expected type2, type1 or quad)");
}

/// Smallest admissible boundary size (half-perimeter for Quad).
inline int min_boundary(ModelId m) {
    switch (m) {
        case ModelId::TypeII: return 2;
        case ModelId::TypeI: return 1;
        case ModelId::Quad: return 1;
    }
    return 2;
}

/// Critical Boltzmann weight per inner vertex: 2/27, 1/(12 sqrt 3), 1/12.
inline ExactScalar critical_weight(ModelId m) {
    switch (m) {
        case ModelId::TypeII: return ExactScalar(Rat(2, 27));
        case ModelId::TypeI: return ExactScalar(Rat(0), Rat(1, 36)); // sqrt(3)/36
        case ModelId::Quad: return ExactScalar(Rat(1, 12));
    }
    return ExactScalar(Rat(0));
}

/// Growth base of the boundary-size tables: C(p) ~ const * sqrt(p) * base^p.
inline long kernel_base(ModelId m) {
    switch (m) {
        case ModelId::TypeII: return 9;
        case ModelId::TypeI: return 12;
        case ModelId::Quad: return 54;
    }
    return 9;
}

} // namespace peelab
