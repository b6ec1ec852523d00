#include "adaptdiff/kern/kernels.hpp"

namespace adaptdiff::kern {

const Ops& scalar_table() {
    static const Ops t = {
        &ref::conv3x3<float>,
        &ref::conv3x3_wgrad<float>,
        &ref::conv1x1<float>,
        &ref::conv1x1_wgrad<float>,
        &ref::silu<float>,
        &ref::silu_bwd<float>,
        &ref::sigmoid<float>,
        &ref::shift_scale_add<float>,
        &ref::mul_add_maps<float>,
        &ref::axpy<float>,
        &ref::sum_sq<float>,
        &ref::adam<float>,
    };
    return t;
}

}  // namespace adaptdiff::kern
