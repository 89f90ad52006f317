#include "scwd/field.hpp"

#include "scwd/errors.hpp"
#include "scwd/grid.hpp"

namespace scwd {

void FieldStack::validate() const {
    if (timestamps.empty()) {
        throw InvalidArgumentError("FieldStack: no timesteps");
    }
    if (values.size() != timestamps.size() * grid.cell_count()) {
        throw InvalidArgumentError("FieldStack: value array shape mismatch");
    }
}

FieldStack regrid_nearest(const FieldStack& stack, const LatLonGrid& dst) {
    if (stack.grid == dst) return stack;
    const auto src_of = nearest_cell_map(stack.grid, dst);
    FieldStack out;
    out.grid = dst;
    out.timestamps = stack.timestamps;
    out.variable = stack.variable;
    out.units = stack.units;
    out.values.resize(stack.timesteps() * dst.cell_count());
    for (std::size_t t = 0; t < stack.timesteps(); ++t) {
        const float* src = stack.frame(t);
        float* d = out.frame(t);
        for (std::size_t c = 0; c < dst.cell_count(); ++c) {
            d[c] = src[src_of[c]];
        }
    }
    return out;
}

}  // namespace scwd
