#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>

namespace tcas {

inline constexpr int kNumFeatures = 47;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using FeatureRow = Eigen::Matrix<double, 1, kNumFeatures>;

enum class Device { phone, tablet };

std::string_view to_string(Device d);
Device parse_device(std::string_view s);  // throws ConfigError

}  // namespace tcas
