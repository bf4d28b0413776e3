#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "peelab/models.hpp"

namespace peelab {

/// One recorded chain state. Layer runs fill n,P,V,H,A,U,G; first-passage
/// runs fill k(tau index, stored in n),tau,P,V; plain peeling fills n,P,V.
struct TraceRow {
    long n = 0;
    long P = 0;
    long V = 0;
    long H = 0;
    long A = 0;
    long U = 0;
    long G = 0;
    double tau = 0;
};

struct Trace {
    ModelId model = ModelId::TypeII;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    long steps = 0;
    bool truncated = false;
    std::vector<TraceRow> rows;

    const char* header() const {
        if (algorithm == "fpp") return "k,tau,P,V";
        if (algorithm == "layers" || algorithm == "dual" || algorithm == "map-layers")
            return "n,P,V,H,A,U,G";
        return "n,P,V";
    }

    void write_csv(std::ostream& os) const {
        os << header() << "\n";
        char buf[160];
        for (const auto& r : rows) {
            if (algorithm == "fpp")
                std::snprintf(buf, sizeof buf, "%ld,%.17g,%ld,%ld", r.n, r.tau, r.P, r.V);
            else if (algorithm == "layers" || algorithm == "dual" || algorithm == "map-layers")
                std::snprintf(buf, sizeof buf, "%ld,%ld,%ld,%ld,%ld,%ld,%ld", r.n, r.P, r.V,
                              r.H, r.A, r.U, r.G);
            else
                std::snprintf(buf, sizeof buf, "%ld,%ld,%ld", r.n, r.P, r.V);
            os << buf << "\n";
        }
    }
};

} // namespace peelab
