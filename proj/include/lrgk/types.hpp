#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace lrgk {

using u8  = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// Dense math types. Scalar-templated aliases so numeric kernels can be
// instantiated at other precisions; the pipeline runs at double.
template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Mat = MatX<double>;
using Vec = VecX<double>;

using MatRef  = Eigen::Ref<Mat>;
using CMatRef = Eigen::Ref<const Mat>;
using VecRef  = Eigen::Ref<Vec>;
using CVecRef = Eigen::Ref<const Vec>;

}  // namespace lrgk
